//! Suffix pruning bounds and the label/target frontier.
//!
//! A trailing hop `(label, attrs)` of a length-`n` pattern admits at most
//! `count_target_edges(attrs, label) * d_m^(n-1)` sources, where `d_m` is
//! the maximum in-degree: the final edge is one of the counted edges and
//! each backward step multiplies the path count by at most `d_m`. Hops whose
//! bound cannot exceed the support threshold can never end a frequent
//! pattern and are dropped before evaluation. Candidate reduction scales the
//! exponent by a factor `psi`, trading recall for speed while keeping
//! precision at 1.0 (shrinking the bound can only drop more candidates).

use crate::graph::{AttrId, LabelId, PropertyGraph};

/// Per-label singleton target attributes admissible at the maximum depth,
/// plus the label pool for first hops and reachability labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub max_in_degree: u32,
    /// Labels that can open a frequent pattern or carry a reachability
    /// pattern, sorted.
    pub frequent_labels: Vec<LabelId>,
    /// For each frequent label, the singleton target attributes whose
    /// depth-`k` suffix bound clears the threshold.
    pub admissible_targets: Vec<(LabelId, Vec<AttrId>)>,
}

impl Frontier {
    pub fn targets_for(&self, label: LabelId) -> &[AttrId] {
        self.admissible_targets
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, a)| a.as_slice())
            .unwrap_or(&[])
    }
}

/// `base * d_m^exponent > theta`, computed exactly in integer arithmetic
/// whenever the exponent is integral (the pruning correctness proof needs
/// strict comparisons to be exact) and in floating point otherwise.
pub fn scaled_bound_exceeds(base: u64, d_m: u64, exponent: f64, theta: f64) -> bool {
    if base == 0 {
        return 0.0 > theta;
    }
    if exponent <= 0.0 {
        return (base as f64) > theta;
    }
    if exponent.fract() == 0.0 && exponent <= u32::MAX as f64 {
        let mut bound = base as u128;
        for _ in 0..exponent as u32 {
            bound = bound.saturating_mul(d_m as u128);
            if bound > (1u128 << 53) {
                // far beyond any representable threshold
                return true;
            }
        }
        (bound as f64) > theta
    } else {
        (base as f64) * (d_m as f64).powf(exponent) > theta
    }
}

/// True when a pattern of length `n` ending with `(label, attrs)` could
/// still be frequent under the trailing-hop bound; `psi = 1` is the exact
/// bound, `psi < 1` the reduced one.
pub fn suffix_admissible(
    graph: &PropertyGraph,
    attrs: &[AttrId],
    label: LabelId,
    n: usize,
    theta: f64,
    psi: f64,
) -> bool {
    assert!(n >= 1, "suffix bounds need at least one hop");
    let edges = graph.count_target_edges(attrs, label);
    scaled_bound_exceeds(
        edges,
        graph.max_in_degree() as u64,
        psi * (n - 1) as f64,
        theta,
    )
}

/// Computes the label pool and per-label admissible singleton targets at
/// depth `k`. A label enters the pool when enough vertices source it and its
/// depth-`k` edge bound clears the threshold; target attributes are then
/// kept per frequent label.
pub fn compute_frontier(graph: &PropertyGraph, theta: f64, k: usize) -> Frontier {
    assert!(k >= 1, "maximum path length must be at least 1");
    let d_m = graph.max_in_degree() as u64;
    let mut frequent_labels = Vec::new();
    for label in 0..graph.labels().len() as u32 {
        let sources = graph.count_sources(&[], label);
        let edges = graph.count_target_edges(&[], label);
        if (sources as f64) > theta && scaled_bound_exceeds(edges, d_m, (k - 1) as f64, theta) {
            frequent_labels.push(label);
        }
    }
    let admissible_targets = frequent_labels
        .iter()
        .map(|&label| {
            let attrs = (0..graph.attributes().len() as u32)
                .filter(|&a| suffix_admissible(graph, &[a], label, k, theta, 1.0))
                .collect();
            (label, attrs)
        })
        .collect();
    Frontier {
        max_in_degree: graph.max_in_degree(),
        frequent_labels,
        admissible_targets,
    }
}

/// Re-filters a frontier's target attributes with the `psi`-scaled bound at
/// pattern length `n`. `psi = 1` with `n = k` reproduces the exact frontier.
pub fn apply_candidate_reduction(
    graph: &PropertyGraph,
    frontier: &Frontier,
    psi: f64,
    theta: f64,
    n: usize,
) -> Frontier {
    let admissible_targets = frontier
        .admissible_targets
        .iter()
        .map(|(label, attrs)| {
            let kept = attrs
                .iter()
                .copied()
                .filter(|&a| suffix_admissible(graph, &[a], *label, n, theta, psi))
                .collect();
            (*label, kept)
        })
        .collect();
    Frontier {
        max_in_degree: frontier.max_in_degree,
        frequent_labels: frontier.frequent_labels.clone(),
        admissible_targets,
    }
}
