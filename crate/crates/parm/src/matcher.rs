//! Matched-vertex computation for path patterns.
//!
//! The central structure is the [`MatchTable`]: for each source vertex that
//! matches a pattern, the set of path endpoints reached from it. Tables grow
//! incrementally — extending a pattern by one hop only walks the stored
//! targets instead of re-matching from scratch. Matching uses homomorphism
//! semantics: paths may revisit vertices.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{AttrId, LabelId, PropertyGraph, VertexId};
use crate::pattern::{attr_set, PathPattern};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatcherError {
    #[error("restrict_sources only applies to position 0 (got {0})")]
    InteriorPosition(usize),
    #[error("pattern kind does not fit this operation")]
    WrongKind,
}

/// Floor for the bitset representation; below this a sorted array always
/// wins.
const BITSET_MIN: usize = 64;

/// Set of vertex ids; small sets stay sorted arrays, sets dense enough that
/// a bitset over the vertex universe is no larger become bitsets. A bitset
/// costs `universe / 8` bytes against `4 * len` for the array, so the
/// switch happens at one id per 32 universe slots — iterating sparse sets
/// through a universe-sized bitset would otherwise dominate memory traffic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetSet {
    Sorted(Vec<VertexId>),
    Bits { words: Vec<u64>, len: usize },
}

impl TargetSet {
    /// Builds from a sorted, duplicate-free id list.
    pub fn from_sorted(ids: Vec<VertexId>, universe: usize) -> TargetSet {
        if ids.len() < BITSET_MIN || ids.len() * 32 < universe {
            TargetSet::Sorted(ids)
        } else {
            let mut words = vec![0u64; universe.div_ceil(64)];
            for &v in &ids {
                words[v as usize / 64] |= 1 << (v % 64);
            }
            TargetSet::Bits { words, len: ids.len() }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TargetSet::Sorted(v) => v.len(),
            TargetSet::Bits { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        match self {
            TargetSet::Sorted(ids) => ids.binary_search(&v).is_ok(),
            TargetSet::Bits { words, .. } => {
                words[v as usize / 64] & (1 << (v % 64)) != 0
            }
        }
    }

    /// Ascending iteration.
    pub fn iter(&self) -> TargetIter<'_> {
        match self {
            TargetSet::Sorted(ids) => TargetIter::Sorted(ids.iter()),
            TargetSet::Bits { words, .. } => TargetIter::Bits {
                words,
                word_idx: 0,
                current: words.first().copied().unwrap_or(0),
            },
        }
    }

    pub fn to_sorted_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }
}

pub enum TargetIter<'a> {
    Sorted(std::slice::Iter<'a, VertexId>),
    Bits {
        words: &'a [u64],
        word_idx: usize,
        current: u64,
    },
}

impl Iterator for TargetIter<'_> {
    type Item = VertexId;

    fn next(&mut self) -> Option<VertexId> {
        match self {
            TargetIter::Sorted(it) => it.next().copied(),
            TargetIter::Bits { words, word_idx, current } => loop {
                if *current != 0 {
                    let bit = current.trailing_zeros();
                    *current &= *current - 1;
                    return Some((*word_idx as u32) * 64 + bit);
                }
                *word_idx += 1;
                if *word_idx >= words.len() {
                    return None;
                }
                *current = words[*word_idx];
            },
        }
    }
}

/// Sources of a matched pattern together with the endpoints of their
/// matching paths. Entries stay sorted by source id; target sets are never
/// empty.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchTable {
    pattern: PathPattern,
    entries: Vec<(VertexId, TargetSet)>,
}

impl MatchTable {
    pub fn new(pattern: PathPattern, mut entries: Vec<(VertexId, TargetSet)>) -> MatchTable {
        debug_assert!(entries.iter().all(|(_, t)| !t.is_empty()));
        entries.sort_unstable_by_key(|&(v, _)| v);
        MatchTable { pattern, entries }
    }

    /// Builds from entries already in ascending source order.
    pub fn from_sorted(pattern: PathPattern, entries: Vec<(VertexId, TargetSet)>) -> MatchTable {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, t)| !t.is_empty()));
        MatchTable { pattern, entries }
    }

    pub fn pattern(&self) -> &PathPattern {
        &self.pattern
    }

    pub fn entries(&self) -> &[(VertexId, TargetSet)] {
        &self.entries
    }

    /// Number of matched source vertices.
    pub fn source_count(&self) -> usize {
        self.entries.len()
    }

    /// Sorted matched source ids.
    pub fn sources(&self) -> Vec<VertexId> {
        self.entries.iter().map(|&(v, _)| v).collect()
    }

    pub fn targets_of(&self, v: VertexId) -> Option<&TargetSet> {
        self.entries
            .binary_search_by_key(&v, |&(s, _)| s)
            .ok()
            .map(|i| &self.entries[i].1)
    }
}

/// Sources matching a bare attribute set: every carrier maps to itself.
pub fn match_zero(graph: &PropertyGraph, attrs: &[AttrId]) -> MatchTable {
    let entries = graph
        .vertices_with_attrs(attrs)
        .into_iter()
        .map(|v| (v, TargetSet::Sorted(vec![v])))
        .collect();
    MatchTable::from_sorted(PathPattern::length_zero(attrs.to_vec()), entries)
}

/// One-hop expansion of a single entry's target set: all `label`-neighbors
/// of current targets that carry `attrs`. Returns `None` when nothing
/// survives.
pub fn expand_targets(
    graph: &PropertyGraph,
    targets: &TargetSet,
    label: LabelId,
    attrs: &[AttrId],
) -> Option<TargetSet> {
    let mut out: Vec<VertexId> = Vec::new();
    for t in targets.iter() {
        for &dst in graph.out_neighbors(t, label) {
            if graph.has_attrs(dst, attrs) {
                out.push(dst);
            }
        }
    }
    if out.is_empty() {
        return None;
    }
    out.sort_unstable();
    out.dedup();
    Some(TargetSet::from_sorted(out, graph.vertex_count()))
}

/// Grows every path in `table` by one `(label, attrs)` hop, dropping sources
/// whose paths cannot be extended.
pub fn extend_matches(
    graph: &PropertyGraph,
    table: &MatchTable,
    label: LabelId,
    attrs: &[AttrId],
) -> MatchTable {
    let pattern = table
        .pattern()
        .vertical_extend(label, attrs.to_vec())
        .expect("extend_matches requires a simple pattern");
    let entries = table
        .entries()
        .iter()
        .filter_map(|(src, targets)| {
            expand_targets(graph, targets, label, attrs).map(|t| (*src, t))
        })
        .collect();
    MatchTable::from_sorted(pattern, entries)
}

/// Tightens the source position of a table with extra attributes. Interior
/// positions are rejected; they are re-evaluated from prefix tables instead.
pub fn restrict_sources(
    graph: &PropertyGraph,
    table: &MatchTable,
    extra: &[AttrId],
    position: usize,
) -> Result<MatchTable, MatcherError> {
    if position != 0 {
        return Err(MatcherError::InteriorPosition(position));
    }
    let merged = attr_set(
        table
            .pattern()
            .first_attrs()
            .iter()
            .copied()
            .chain(extra.iter().copied()),
    );
    let pattern = table.pattern().with_attrs_at(0, merged);
    let entries = table
        .entries()
        .iter()
        .filter(|(src, _)| graph.has_attrs(*src, extra))
        .cloned()
        .collect();
    Ok(MatchTable::from_sorted(pattern, entries))
}

/// Tightens the final position of a table with extra attributes, dropping
/// sources left with no surviving endpoint.
pub fn filter_targets(graph: &PropertyGraph, table: &MatchTable, extra: &[AttrId]) -> MatchTable {
    let last = table.pattern().attr_sets().len() - 1;
    let merged = attr_set(
        table
            .pattern()
            .last_attrs()
            .iter()
            .copied()
            .chain(extra.iter().copied()),
    );
    let pattern = table.pattern().with_attrs_at(last, merged);
    let entries = table
        .entries()
        .iter()
        .filter_map(|(src, targets)| {
            let kept: Vec<VertexId> = targets.iter().filter(|&t| graph.has_attrs(t, extra)).collect();
            if kept.is_empty() {
                None
            } else {
                Some((*src, TargetSet::from_sorted(kept, graph.vertex_count())))
            }
        })
        .collect();
    MatchTable::from_sorted(pattern, entries)
}

/// Per-source vertices reachable over paths of 1..=k edges all carrying one
/// label (unbounded when `depth` is `None`).
#[derive(Debug, Clone)]
pub struct ReachSet {
    label: LabelId,
    reach: Vec<TargetSet>,
}

impl ReachSet {
    pub fn label(&self) -> LabelId {
        self.label
    }

    pub fn reachable(&self, v: VertexId) -> &TargetSet {
        &self.reach[v as usize]
    }
}

/// Reusable BFS state for single-label reachability.
pub struct BfsScratch {
    stamp: u32,
    seen: Vec<u32>,
    queue: VecDeque<(VertexId, usize)>,
}

impl BfsScratch {
    pub fn new(universe: usize) -> BfsScratch {
        BfsScratch {
            stamp: 0,
            seen: vec![0; universe],
            queue: VecDeque::new(),
        }
    }

    /// Vertices reachable from `start` through 1..=depth edges labeled
    /// `label` (`None` lifts the depth bound). `start` itself is included
    /// only if it lies on a cycle of `label` edges.
    pub fn reach_from(
        &mut self,
        graph: &PropertyGraph,
        start: VertexId,
        label: LabelId,
        depth: Option<usize>,
    ) -> Vec<VertexId> {
        self.stamp += 1;
        self.queue.clear();
        let mut out = Vec::new();
        self.queue.push_back((start, 0));
        while let Some((v, d)) = self.queue.pop_front() {
            if depth.is_some_and(|k| d >= k) {
                continue;
            }
            for &dst in graph.out_neighbors(v, label) {
                if self.seen[dst as usize] != self.stamp {
                    self.seen[dst as usize] = self.stamp;
                    out.push(dst);
                    self.queue.push_back((dst, d + 1));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Breadth-first reachability sets for each label, for every vertex with at
/// least one out-edge of that label.
pub fn build_reach_sets(
    graph: &PropertyGraph,
    labels: &[LabelId],
    depth: Option<usize>,
) -> Vec<ReachSet> {
    let mut scratch = BfsScratch::new(graph.vertex_count());
    labels
        .iter()
        .map(|&label| {
            let mut reach = vec![TargetSet::Sorted(Vec::new()); graph.vertex_count()];
            for &v in graph.label_sources(label) {
                let ids = scratch.reach_from(graph, v, label, depth);
                reach[v as usize] = TargetSet::from_sorted(ids, graph.vertex_count());
            }
            ReachSet { label, reach }
        })
        .collect()
}

/// Matches a reachability pattern against prebuilt reach sets.
pub fn match_reachability(
    graph: &PropertyGraph,
    pattern: &PathPattern,
    reach: &ReachSet,
) -> Result<MatchTable, MatcherError> {
    let (source, label, target) = match pattern {
        PathPattern::Reachability { source, label, target } => (source, *label, target),
        _ => return Err(MatcherError::WrongKind),
    };
    assert_eq!(label, reach.label(), "reach set built for a different label");
    let entries = graph
        .vertices_with_attrs(source)
        .into_iter()
        .filter_map(|v| {
            let kept: Vec<VertexId> = reach
                .reachable(v)
                .iter()
                .filter(|&t| graph.has_attrs(t, target))
                .collect();
            if kept.is_empty() {
                None
            } else {
                Some((v, TargetSet::from_sorted(kept, graph.vertex_count())))
            }
        })
        .collect();
    Ok(MatchTable::from_sorted(pattern.clone(), entries))
}
