//! Seeded synthetic property graph generation for tests and benchmarks.
//!
//! Edges pick uniform endpoints and labels. Attribute values follow a
//! zipf-like rank weighting so some attributes are common and most are
//! rare, which is what makes suffix pruning observable on generated data.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{GraphBuilder, PropertyGraph};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("edges require at least one vertex and one label")]
    EdgesWithoutSupport,
    #[error("attrs-per-vertex {0} requires at least one attribute")]
    AttrsWithoutUniverse(f64),
    #[error("attrs-per-vertex must be non-negative, got {0}")]
    NegativeLambda(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub vertices: usize,
    pub edges: usize,
    pub labels: usize,
    pub attributes: usize,
    /// Mean attribute count per vertex.
    pub attrs_per_vertex: f64,
    /// Hard cap on attributes per vertex.
    pub max_attrs_per_vertex: usize,
    /// Rank-weighting exponent for attribute popularity; 0 is uniform.
    pub attr_skew: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            vertices: 100,
            edges: 200,
            labels: 4,
            attributes: 8,
            attrs_per_vertex: 2.0,
            max_attrs_per_vertex: 4,
            attr_skew: 1.0,
            seed: 0,
        }
    }
}

pub fn generate(params: &GenParams) -> Result<PropertyGraph, GenError> {
    if params.edges > 0 && (params.vertices == 0 || params.labels == 0) {
        return Err(GenError::EdgesWithoutSupport);
    }
    if params.attrs_per_vertex > 0.0 && params.attributes == 0 {
        return Err(GenError::AttrsWithoutUniverse(params.attrs_per_vertex));
    }
    if params.attrs_per_vertex < 0.0 {
        return Err(GenError::NegativeLambda(params.attrs_per_vertex));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // cumulative attribute weights, weight(rank r) = 1 / (r+1)^skew
    let weights: Vec<f64> = (0..params.attributes)
        .map(|r| 1.0 / ((r + 1) as f64).powf(params.attr_skew))
        .collect();
    let total_weight: f64 = weights.iter().sum();

    let mut b = GraphBuilder::new();
    for v in 0..params.vertices {
        let count = draw_poisson(&mut rng, params.attrs_per_vertex)
            .min(params.max_attrs_per_vertex)
            .min(params.attributes);
        let mut chosen: Vec<usize> = Vec::with_capacity(count);
        let mut guard = 0;
        while chosen.len() < count && guard < 64 {
            guard += 1;
            let mut ticket = rng.random_range(0.0..total_weight);
            let mut pick = params.attributes - 1;
            for (r, w) in weights.iter().enumerate() {
                if ticket < *w {
                    pick = r;
                    break;
                }
                ticket -= w;
            }
            if !chosen.contains(&pick) {
                chosen.push(pick);
            }
        }
        let names: Vec<String> = chosen.iter().map(|r| format!("a{r}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        b.add_vertex(&format!("v{v}"), &refs)
            .expect("generated vertex names are unique");
    }
    for _ in 0..params.edges {
        let src = rng.random_range(0..params.vertices);
        let dst = rng.random_range(0..params.vertices);
        let label = rng.random_range(0..params.labels);
        b.add_edge(&format!("v{src}"), &format!("l{label}"), &format!("v{dst}"));
    }
    Ok(b.build())
}

/// Inverse-transform Poisson draw; fine for the small means used here.
fn draw_poisson(rng: &mut ChaCha8Rng, lambda: f64) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let cutoff = (-lambda).exp();
    let mut k = 0usize;
    let mut p = 1.0f64;
    loop {
        p *= rng.random_range(0.0..1.0f64);
        if p <= cutoff || k > 200 {
            return k;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_scale_graph() {
        let g = generate(&GenParams {
            vertices: 12,
            edges: 15,
            labels: 4,
            attributes: 8,
            attrs_per_vertex: 1.5,
            seed: 5,
            ..GenParams::default()
        })
        .unwrap();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 15);
        assert!(g.labels().len() <= 4);
        assert!(g.attributes().len() <= 8);
    }

    #[test]
    fn edgeless_graph_is_valid() {
        let g = generate(&GenParams {
            vertices: 5,
            edges: 0,
            labels: 0,
            attributes: 3,
            attrs_per_vertex: 1.0,
            seed: 1,
            ..GenParams::default()
        })
        .unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.vertex_count(), 5);
    }

    #[test]
    fn same_seed_same_graph() {
        let p = GenParams {
            vertices: 40,
            edges: 80,
            seed: 99,
            ..GenParams::default()
        };
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        let other = GenParams { seed: 100, ..p };
        assert_ne!(generate(&p).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn infeasible_params_rejected() {
        let bad = GenParams {
            vertices: 0,
            edges: 5,
            ..GenParams::default()
        };
        assert_eq!(generate(&bad).unwrap_err(), GenError::EdgesWithoutSupport);
        let bad = GenParams {
            attributes: 0,
            attrs_per_vertex: 1.0,
            edges: 0,
            ..GenParams::default()
        };
        assert!(matches!(generate(&bad), Err(GenError::AttrsWithoutUniverse(_))));
    }

    #[test]
    fn attribute_cap_is_respected() {
        let g = generate(&GenParams {
            vertices: 300,
            edges: 0,
            labels: 1,
            attributes: 10,
            attrs_per_vertex: 3.0,
            max_attrs_per_vertex: 2,
            seed: 3,
            ..GenParams::default()
        })
        .unwrap();
        for v in 0..g.vertex_count() as u32 {
            assert!(g.attrs_of(v).len() <= 2);
        }
    }
}
