//! Brute-force reference miner for small graphs.
//!
//! The oracle re-derives matching straight from the pattern definitions:
//! it enumerates every walk up to the length bound, expands each walk into
//! every pattern it supports (the product of per-position attribute
//! subsets), and tallies sources. No pruning, no candidate generation, no
//! shared matching code with the mining pipeline — only the graph store and
//! the pattern value type are reused, so a bug in the miner cannot certify
//! itself.
//!
//! A second, structurally different matching route (iterative relational
//! join) is exposed for cross-checking individual patterns.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::graph::{intersect_count, LabelId, PropertyGraph, VertexId};
use crate::miner::{Rule, Support};
use crate::pattern::{AttrSet, PathPattern};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for exhaustive mining: {0}")]
    TooLarge(String),
}

/// Enumeration guards; instances beyond them are rejected, never truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub max_attributes: usize,
    pub max_length: usize,
    /// Largest attribute set per vertex (and hence per pattern position).
    pub max_set_size: usize,
    /// Budget on walk-times-subset expansion work.
    pub max_work: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 200,
            max_attributes: 12,
            max_length: 3,
            max_set_size: 4,
            max_work: 50_000_000,
        }
    }
}

pub struct OracleResult {
    /// Every frequent pattern (length 0 included) with its exact matched
    /// source set.
    pub patterns: BTreeMap<PathPattern, Vec<VertexId>>,
    /// Every frequent, mutually non-dominating ordered rule pair with exact
    /// metrics, sorted structurally.
    pub rules: Vec<Rule>,
}

pub fn oracle_mine(
    graph: &PropertyGraph,
    support: Support,
    k: usize,
    limits: &OracleLimits,
) -> Result<OracleResult, OracleError> {
    check_limits(graph, k, limits)?;
    let n = graph.vertex_count();
    let theta = support.absolute_threshold(n);

    let mut sources: BTreeMap<PathPattern, BTreeSet<VertexId>> = BTreeMap::new();

    // length-0 patterns: each vertex supports every nonempty subset of its
    // attribute set
    for v in 0..n as u32 {
        for set in nonempty_subsets(graph.attrs_of(v)) {
            sources.entry(PathPattern::length_zero(set)).or_default().insert(v);
        }
    }

    // simple patterns from walk enumeration
    let mut work = 0u64;
    let mut walk: Vec<VertexId> = Vec::with_capacity(k + 1);
    let mut labels: Vec<LabelId> = Vec::with_capacity(k);
    for v in 0..n as u32 {
        walk.push(v);
        expand_walks(graph, k, &mut walk, &mut labels, &mut work, limits, &mut sources)?;
        walk.pop();
    }

    // reachability patterns from per-label bounded closure
    for label in 0..graph.labels().len() as u32 {
        for v in 0..n as u32 {
            let reached = bounded_reach(graph, v, label, k);
            if reached.is_empty() {
                continue;
            }
            let source_sets = nonempty_subsets(graph.attrs_of(v));
            if source_sets.is_empty() {
                continue;
            }
            let mut target_sets: BTreeSet<AttrSet> = BTreeSet::new();
            for &t in &reached {
                for set in nonempty_subsets(graph.attrs_of(t)) {
                    target_sets.insert(set);
                }
            }
            // every target set was produced as a subset of some reached
            // vertex's attributes, so (s, t) is matched by construction
            for s in &source_sets {
                for t in &target_sets {
                    sources
                        .entry(PathPattern::reachability(s.clone(), label, t.clone()))
                        .or_default()
                        .insert(v);
                }
            }
        }
    }

    let patterns: BTreeMap<PathPattern, Vec<VertexId>> = sources
        .into_iter()
        .filter(|(_, s)| (s.len() as f64) > theta)
        .map(|(p, s)| (p, s.into_iter().collect()))
        .collect();

    // rules: ordered pairs of frequent patterns of length >= 1
    let positive: Vec<(&PathPattern, &Vec<VertexId>)> =
        patterns.iter().filter(|(p, _)| p.len() >= 1).collect();
    let mut rules = Vec::new();
    for &(px, sx) in &positive {
        for &(py, sy) in &positive {
            if px == py || px.dominates(py) || py.dominates(px) {
                continue;
            }
            let asupp = intersect_count(sx, sy);
            if (asupp as f64) > theta {
                rules.push(Rule {
                    antecedent: px.clone(),
                    consequent: py.clone(),
                    asupp: asupp as f64,
                    rsupp: asupp as f64 / n as f64,
                    conf: asupp as f64 / sx.len() as f64,
                    lift: (asupp as f64 * n as f64) / (sx.len() as f64 * sy.len() as f64),
                    estimated: false,
                    ci: None,
                });
            }
        }
    }
    rules.sort_by(|a, b| {
        (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent))
    });

    Ok(OracleResult { patterns, rules })
}

fn check_limits(graph: &PropertyGraph, k: usize, limits: &OracleLimits) -> Result<(), OracleError> {
    if graph.vertex_count() > limits.max_vertices {
        return Err(OracleError::TooLarge(format!(
            "{} vertices exceed the {}-vertex guard",
            graph.vertex_count(),
            limits.max_vertices
        )));
    }
    if graph.attributes().len() > limits.max_attributes {
        return Err(OracleError::TooLarge(format!(
            "{} attributes exceed the {}-attribute guard",
            graph.attributes().len(),
            limits.max_attributes
        )));
    }
    if k > limits.max_length {
        return Err(OracleError::TooLarge(format!(
            "length bound {k} exceeds the guard {}",
            limits.max_length
        )));
    }
    for v in 0..graph.vertex_count() as u32 {
        if graph.attrs_of(v).len() > limits.max_set_size {
            return Err(OracleError::TooLarge(format!(
                "vertex {} carries {} attributes, above the per-position cap {}",
                graph.vertex_name(v),
                graph.attrs_of(v).len(),
                limits.max_set_size
            )));
        }
    }
    Ok(())
}

fn nonempty_subsets(attrs: &[u32]) -> Vec<AttrSet> {
    let m = attrs.len();
    let mut out = Vec::with_capacity((1usize << m).saturating_sub(1));
    for mask in 1u32..(1u32 << m) {
        out.push(
            (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| attrs[i])
                .collect(),
        );
    }
    out
}

fn expand_walks(
    graph: &PropertyGraph,
    k: usize,
    walk: &mut Vec<VertexId>,
    labels: &mut Vec<LabelId>,
    work: &mut u64,
    limits: &OracleLimits,
    sources: &mut BTreeMap<PathPattern, BTreeSet<VertexId>>,
) -> Result<(), OracleError> {
    if labels.len() == k {
        return Ok(());
    }
    let tail = *walk.last().unwrap();
    let mut edges: Vec<(LabelId, VertexId)> = Vec::new();
    for label in 0..graph.labels().len() as u32 {
        for &dst in graph.out_neighbors(tail, label) {
            edges.push((label, dst));
        }
    }
    for (label, dst) in edges {
        walk.push(dst);
        labels.push(label);
        record_walk(graph, walk, labels, work, limits, sources)?;
        expand_walks(graph, k, walk, labels, work, limits, sources)?;
        walk.pop();
        labels.pop();
    }
    Ok(())
}

/// Expands one walk into every simple pattern it supports and credits the
/// walk's source.
fn record_walk(
    graph: &PropertyGraph,
    walk: &[VertexId],
    labels: &[LabelId],
    work: &mut u64,
    limits: &OracleLimits,
    sources: &mut BTreeMap<PathPattern, BTreeSet<VertexId>>,
) -> Result<(), OracleError> {
    let per_position: Vec<Vec<AttrSet>> = walk
        .iter()
        .map(|&v| nonempty_subsets(graph.attrs_of(v)))
        .collect();
    let combos: u64 = per_position.iter().map(|s| s.len() as u64).product();
    if combos == 0 {
        return Ok(()); // an attribute-free vertex on the walk
    }
    *work += combos;
    if *work > limits.max_work {
        return Err(OracleError::TooLarge(format!(
            "walk expansion exceeded the {}-combination budget",
            limits.max_work
        )));
    }
    let source = walk[0];
    let mut chosen: Vec<AttrSet> = Vec::with_capacity(walk.len());
    fn rec(
        per_position: &[Vec<AttrSet>],
        labels: &[LabelId],
        source: VertexId,
        chosen: &mut Vec<AttrSet>,
        sources: &mut BTreeMap<PathPattern, BTreeSet<VertexId>>,
    ) {
        if chosen.len() == per_position.len() {
            let pattern = PathPattern::simple(chosen.clone(), labels.to_vec());
            sources.entry(pattern).or_default().insert(source);
            return;
        }
        for set in &per_position[chosen.len()] {
            chosen.push(set.clone());
            rec(per_position, labels, source, chosen, sources);
            chosen.pop();
        }
    }
    rec(&per_position, labels, source, &mut chosen, sources);
    Ok(())
}

/// Vertices reachable from `v` over 1..=k edges all labeled `label`,
/// derived independently of the matcher's search.
fn bounded_reach(graph: &PropertyGraph, v: VertexId, label: LabelId, k: usize) -> Vec<VertexId> {
    let mut reached: BTreeSet<VertexId> = BTreeSet::new();
    let mut frontier: BTreeSet<VertexId> = BTreeSet::new();
    frontier.insert(v);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for &u in &frontier {
            for &dst in graph.out_neighbors(u, label) {
                if reached.insert(dst) {
                    next.insert(dst);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    reached.into_iter().collect()
}

/// Second matching strategy: evaluates one pattern by iterating a
/// (source, current-vertex) relation through the pattern's hops.
pub fn match_by_join(graph: &PropertyGraph, pattern: &PathPattern, k: usize) -> Vec<VertexId> {
    match pattern {
        PathPattern::Simple { attr_sets, labels } => {
            let mut relation: HashSet<(VertexId, VertexId)> = (0..graph.vertex_count() as u32)
                .filter(|&v| graph.has_attrs(v, &attr_sets[0]))
                .map(|v| (v, v))
                .collect();
            for (i, &label) in labels.iter().enumerate() {
                let mut next = HashSet::new();
                for &(src, cur) in &relation {
                    for &dst in graph.out_neighbors(cur, label) {
                        if graph.has_attrs(dst, &attr_sets[i + 1]) {
                            next.insert((src, dst));
                        }
                    }
                }
                relation = next;
            }
            let mut out: Vec<VertexId> = relation.into_iter().map(|(s, _)| s).collect();
            out.sort_unstable();
            out.dedup();
            out
        }
        PathPattern::Reachability { source, label, target } => {
            let mut out: Vec<VertexId> = (0..graph.vertex_count() as u32)
                .filter(|&v| graph.has_attrs(v, source))
                .filter(|&v| {
                    bounded_reach(graph, v, *label, k)
                        .iter()
                        .any(|&t| graph.has_attrs(t, target))
                })
                .collect();
            out.sort_unstable();
            out
        }
    }
}
