//! Cost-based vertex partitioning for the parallel matching waves.
//!
//! Each vertex is priced at `frequent-label out-degree x frequent-attribute
//! count`; zero-cost vertices cannot source any frequent pattern of positive
//! length and are left out of the worker assignment entirely. The remaining
//! vertices are assigned greedily, largest cost first, to the least-loaded
//! worker that still has capacity.

use crate::graph::{AttrId, LabelId, PropertyGraph, VertexId};

/// Estimated matching cost of one vertex: out-edges with a pooled label
/// times the number of frequent attributes it carries.
pub fn estimate_cost(
    graph: &PropertyGraph,
    v: VertexId,
    pooled_labels: &[LabelId],
    frequent_attrs: &[AttrId],
) -> u64 {
    let d_f: usize = pooled_labels
        .iter()
        .map(|&l| graph.out_neighbors(v, l).len())
        .sum();
    let a_f = graph
        .attrs_of(v)
        .iter()
        .filter(|a| frequent_attrs.binary_search(a).is_ok())
        .count();
    d_f as u64 * a_f as u64
}

/// Static assignment of retained vertices to worker threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Per-thread vertex lists; disjoint, covering every retained vertex.
    pub assignments: Vec<Vec<VertexId>>,
    /// Per-thread summed cost.
    pub loads: Vec<u64>,
    /// Maximum vertices per thread: ceil(retained / threads).
    pub capacity: usize,
}

impl Partition {
    /// Worker index per vertex; `u32::MAX` marks eliminated vertices.
    pub fn owner_map(&self, vertex_count: usize) -> Vec<u32> {
        let mut owner = vec![u32::MAX; vertex_count];
        for (t, list) in self.assignments.iter().enumerate() {
            for &v in list {
                owner[v as usize] = t as u32;
            }
        }
        owner
    }

    pub fn max_load(&self) -> u64 {
        self.loads.iter().copied().max().unwrap_or(0)
    }
}

/// Greedy longest-processing-time assignment of `(vertex, cost)` pairs onto
/// `threads` workers, capped at `ceil(n / threads)` vertices per worker.
/// Ties sort by ascending vertex id and break to the lowest thread index,
/// so the partition is deterministic.
pub fn partition(costs: &[(VertexId, u64)], threads: usize) -> Partition {
    assert!(threads >= 1, "at least one thread required");
    let mut order: Vec<(VertexId, u64)> = costs.to_vec();
    order.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let capacity = order.len().div_ceil(threads.max(1)).max(1);
    let mut assignments = vec![Vec::new(); threads];
    let mut loads = vec![0u64; threads];
    for (v, c) in order {
        let mut best: Option<usize> = None;
        for t in 0..threads {
            if assignments[t].len() >= capacity {
                continue;
            }
            if best.is_none_or(|b| loads[t] < loads[b]) {
                best = Some(t);
            }
        }
        let t = best.expect("capacity ceil(n/threads) always leaves room");
        assignments[t].push(v);
        loads[t] += c;
    }
    Partition {
        assignments,
        loads,
        capacity,
    }
}

/// Costs for every vertex of the graph, with zero-cost vertices filtered
/// out; input order is by vertex id.
pub fn retained_costs(
    graph: &PropertyGraph,
    pooled_labels: &[LabelId],
    frequent_attrs: &[AttrId],
) -> Vec<(VertexId, u64)> {
    (0..graph.vertex_count() as u32)
        .filter_map(|v| {
            let c = estimate_cost(graph, v, pooled_labels, frequent_attrs);
            (c > 0).then_some((v, c))
        })
        .collect()
}
