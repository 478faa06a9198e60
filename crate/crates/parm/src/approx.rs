//! Stratified vertex sampling and the frequency estimator.
//!
//! Vertices with no frequent attribute cannot source a frequent pattern and
//! are excluded outright. The rest are grouped into strata by their full
//! frequent-attribute signature; each stratum contributes a seeded uniform
//! without-replacement draw of `ceil(rate * stratum size)` vertices. A
//! pattern's matched count inside the sample scales by `1 / rate` into the
//! frequency estimate.
//!
//! The interval uses the indicator sample variance with a finite-population
//! correction of `sqrt(1 - rate)`: the draw is without replacement, so the
//! uncorrected interval would systematically over-cover (and would not
//! collapse at rate 1, where the sample is exhaustive).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{AttrId, PropertyGraph, VertexId};
use crate::pattern::AttrSet;

/// Seeded stratified sample of the vertices that carry frequent attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    strata: BTreeMap<AttrSet, Vec<VertexId>>,
    sampled: Vec<VertexId>,
    rate: f64,
    seed: u64,
    /// Total vertices across all strata.
    universe: usize,
}

impl SamplePlan {
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Sorted sampled vertex ids.
    pub fn sampled(&self) -> &[VertexId] {
        &self.sampled
    }

    pub fn strata(&self) -> &BTreeMap<AttrSet, Vec<VertexId>> {
        &self.strata
    }

    /// Per-vertex membership mask over `vertex_count` ids.
    pub fn mask(&self, vertex_count: usize) -> Vec<bool> {
        let mut m = vec![false; vertex_count];
        for &v in &self.sampled {
            m[v as usize] = true;
        }
        m
    }

    /// Frequency estimate from the number of sampled vertices that matched.
    pub fn estimate_frequency(&self, matched_in_sample: usize, z: f64) -> FrequencyEstimate {
        estimate_frequency(
            matched_in_sample,
            self.sampled.len(),
            self.universe,
            self.rate,
            z,
        )
    }
}

/// Point estimate with variance and confidence interval for a matched
/// vertex count under sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEstimate {
    pub point: f64,
    /// Indicator sample variance; absent when the sample holds fewer than
    /// two vertices.
    pub variance: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
}

/// Builds the seeded stratified plan. Strata are keyed by each vertex's
/// full sorted set of frequent attributes; vertices carrying none are
/// absent. Each stratum yields `ceil(rate * size)` vertices, drawn
/// uniformly without replacement.
pub fn build_sample(
    graph: &PropertyGraph,
    frequent_attrs: &[AttrId],
    rate: f64,
    seed: u64,
) -> SamplePlan {
    assert!(rate > 0.0 && rate <= 1.0, "sampling rate must lie in (0, 1]");
    let mut strata: BTreeMap<AttrSet, Vec<VertexId>> = BTreeMap::new();
    for v in 0..graph.vertex_count() as u32 {
        let signature: AttrSet = graph
            .attrs_of(v)
            .iter()
            .copied()
            .filter(|a| frequent_attrs.binary_search(a).is_ok())
            .collect();
        if !signature.is_empty() {
            strata.entry(signature).or_default().push(v);
        }
    }
    let universe: usize = strata.values().map(Vec::len).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = Vec::new();
    for vertices in strata.values() {
        let want = ((rate * vertices.len() as f64).ceil() as usize).min(vertices.len());
        let mut pool = vertices.clone();
        pool.shuffle(&mut rng);
        sampled.extend_from_slice(&pool[..want]);
    }
    sampled.sort_unstable();
    SamplePlan {
        strata,
        sampled,
        rate,
        seed,
        universe,
    }
}

/// The estimator behind [`SamplePlan::estimate_frequency`], exposed for
/// direct use: `matched` of `sampled` drawn vertices matched, out of a
/// `universe` sampled at `rate`.
pub fn estimate_frequency(
    matched: usize,
    sampled: usize,
    universe: usize,
    rate: f64,
    z: f64,
) -> FrequencyEstimate {
    let point = matched as f64 / rate;
    let n_nominal = rate * universe as f64;
    if sampled < 2 || n_nominal <= 1.0 {
        return FrequencyEstimate {
            point,
            variance: None,
            ci_low: point,
            ci_high: point,
            z,
        };
    }
    let mean = point / universe as f64;
    let sq_sum =
        matched as f64 * (1.0 - mean).powi(2) + (sampled - matched) as f64 * mean.powi(2);
    let variance = sq_sum / (n_nominal - 1.0);
    let s = variance.sqrt();
    let half = z * (1.0 - rate).sqrt() * s / n_nominal.sqrt() * universe as f64;
    FrequencyEstimate {
        point,
        variance: Some(variance),
        ci_low: (point - half).max(0.0),
        ci_high: point + half,
        z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::test_fixtures::random_graph;

    fn strata_graph(sizes: &[usize]) -> PropertyGraph {
        let mut b = GraphBuilder::new();
        for (si, &size) in sizes.iter().enumerate() {
            let attr = format!("a{si}");
            for i in 0..size {
                b.add_vertex(&format!("v{si}_{i}"), &[attr.as_str()]).unwrap();
            }
        }
        b.build()
    }

    #[test]
    fn full_rate_takes_every_stratum_vertex() {
        let g = strata_graph(&[7, 3]);
        let freq: Vec<u32> = (0..2).collect();
        let plan = build_sample(&g, &freq, 1.0, 42);
        assert_eq!(plan.sampled().len(), 10);
        assert_eq!(plan.universe(), 10);
    }

    #[test]
    fn ceiling_arithmetic_per_stratum() {
        let g = strata_graph(&[10, 4]);
        let plan = build_sample(&g, &[0, 1], 0.5, 1);
        let s0: Vec<_> = plan.sampled().iter().filter(|&&v| v < 10).collect();
        let s1: Vec<_> = plan.sampled().iter().filter(|&&v| v >= 10).collect();
        assert_eq!(s0.len(), 5);
        assert_eq!(s1.len(), 2);
    }

    #[test]
    fn vertices_without_frequent_attrs_are_excluded() {
        let mut b = GraphBuilder::new();
        b.add_vertex("a", &["hot"]).unwrap();
        b.add_vertex("b", &["cold"]).unwrap();
        b.add_vertex("c", &[]).unwrap();
        let g = b.build();
        let hot = g.attributes().id("hot").unwrap();
        let plan = build_sample(&g, &[hot], 1.0, 0);
        assert_eq!(plan.sampled(), &[g.vertex_id("a").unwrap()]);
        assert_eq!(plan.universe(), 1);
    }

    #[test]
    fn same_seed_same_plan() {
        let g = random_graph(60, 120, 3, 5, 2.0, 9);
        let freq: Vec<u32> = (0..g.attributes().len() as u32).collect();
        let a = build_sample(&g, &freq, 0.37, 123);
        let b = build_sample(&g, &freq, 0.37, 123);
        assert_eq!(a, b);
        let c = build_sample(&g, &freq, 0.37, 124);
        assert_ne!(a.sampled(), c.sampled());
    }

    #[test]
    fn point_estimate_divides_by_rate() {
        let est = estimate_frequency(5, 10, 20, 0.5, 1.96);
        assert_eq!(est.point, 10.0);
        assert!(est.ci_low <= est.point && est.point <= est.ci_high);
    }

    #[test]
    fn all_matching_sample_gives_degenerate_interval() {
        let est = estimate_frequency(10, 10, 20, 0.5, 1.96);
        assert_eq!(est.point, 20.0);
        assert_eq!(est.variance, Some(0.0));
        assert_eq!((est.ci_low, est.ci_high), (20.0, 20.0));
    }

    #[test]
    fn rate_one_interval_collapses() {
        let est = estimate_frequency(7, 20, 20, 1.0, 1.96);
        assert_eq!(est.point, 7.0);
        assert_eq!((est.ci_low, est.ci_high), (7.0, 7.0));
    }

    #[test]
    fn single_vertex_sample_has_no_variance() {
        let est = estimate_frequency(1, 1, 2, 0.5, 1.96);
        assert_eq!(est.variance, None);
        assert_eq!((est.ci_low, est.ci_high), (est.point, est.point));
    }

    #[test]
    fn estimator_is_unbiased_on_average() {
        // planted truth: 60 matching vertices of 200, one stratum
        let g = strata_graph(&[200]);
        let truth: Vec<u32> = (0..60).collect();
        let mut total = 0.0;
        let runs = 400;
        for seed in 0..runs {
            let plan = build_sample(&g, &[0], 0.4, seed);
            let matched = plan
                .sampled()
                .iter()
                .filter(|v| truth.binary_search(v).is_ok())
                .count();
            total += plan.estimate_frequency(matched, 1.96).point;
        }
        let mean = total / runs as f64;
        assert!(
            (mean - 60.0).abs() < 2.0,
            "estimator mean {mean} drifted from planted 60"
        );
    }
}
