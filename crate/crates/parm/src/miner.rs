//! The mining pipeline: frequent attribute sets, frequent simple and
//! reachability path patterns, then rules over pairs of patterns, with
//! suffix pruning and staged candidate generation.
//!
//! Patterns grow in levels. Each level first extends the previous level's
//! patterns by one hop (vertical wave), then closes the level under sibling
//! joins that add one attribute to one position (horizontal fixpoint).
//! Candidate evaluation reuses the stored match tables, so a pattern is
//! never matched from scratch. Frequency always compares strictly against
//! the threshold.
//!
//! In baseline mode the label pool, suffix bounds and join staging are
//! disabled: every extension over every realizable attribute set is matched
//! directly. Output is identical; only the amount of evaluated candidates
//! differs.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::approx::{build_sample, SamplePlan};
use crate::frontier::{compute_frontier, scaled_bound_exceeds, suffix_admissible, Frontier};
use crate::graph::{
    intersect_count, intersect_sorted, AttrId, LabelId, PropertyGraph, VertexId,
};
use crate::matcher::{
    expand_targets, extend_matches, filter_targets, restrict_sources, BfsScratch, MatchTable,
    TargetSet,
};
use crate::pattern::{AttrSet, PathPattern};
use crate::scheduler::{partition, retained_costs};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("relative support must lie in (0, 1], got {0}")]
    RelativeSupport(f64),
    #[error("candidate reduction factor must lie in (0, 1], got {0}")]
    CandidateReduction(f64),
    #[error("sampling rate must lie in (0, 1], got {0}")]
    SamplingRate(f64),
    #[error("maximum path length must be at least 1")]
    MaxLength,
    #[error("thread count must be at least 1")]
    Threads,
    #[error("z-value must be positive, got {0}")]
    ZValue(f64),
}

/// Minimum support: an absolute matched-vertex count or a fraction of the
/// vertex count, converted once before mining.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Absolute(u64),
    Relative(f64),
}

impl Support {
    pub fn absolute_threshold(&self, vertex_count: usize) -> f64 {
        match *self {
            Support::Absolute(c) => c as f64,
            Support::Relative(f) => f * vertex_count as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReachabilityBound {
    /// Reachability paths limited to the configured maximum length.
    #[default]
    KBounded,
    /// Full per-label transitive closure.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinerConfig {
    pub min_support: Support,
    /// Maximum pattern length k >= 1.
    pub max_length: usize,
    /// Candidate reduction factor psi; 1 (or None) keeps exact pruning.
    pub candidate_reduction: Option<f64>,
    /// Stratified sampling rate rho; 1 (or None) keeps exact counting.
    pub sampling_rate: Option<f64>,
    pub threads: usize,
    pub rng_seed: u64,
    pub reachability_bound: ReachabilityBound,
    /// Disables suffix pruning and staged candidate generation.
    pub baseline: bool,
    /// z-value for sampling confidence intervals.
    pub z_value: f64,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            min_support: Support::Absolute(1),
            max_length: 2,
            candidate_reduction: None,
            sampling_rate: None,
            threads: 1,
            rng_seed: 0,
            reachability_bound: ReachabilityBound::KBounded,
            baseline: false,
            z_value: 1.96,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Support::Relative(f) = self.min_support {
            if !(f > 0.0 && f <= 1.0) {
                return Err(ConfigError::RelativeSupport(f));
            }
        }
        if let Some(psi) = self.candidate_reduction {
            if !(psi > 0.0 && psi <= 1.0) {
                return Err(ConfigError::CandidateReduction(psi));
            }
        }
        if let Some(rho) = self.sampling_rate {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(ConfigError::SamplingRate(rho));
            }
        }
        if self.max_length < 1 {
            return Err(ConfigError::MaxLength);
        }
        if self.threads < 1 {
            return Err(ConfigError::Threads);
        }
        if !(self.z_value > 0.0) {
            return Err(ConfigError::ZValue(self.z_value));
        }
        Ok(())
    }

    fn psi(&self) -> f64 {
        self.candidate_reduction.unwrap_or(1.0)
    }

    fn rho(&self) -> f64 {
        self.sampling_rate.unwrap_or(1.0)
    }
}

/// A discovered rule with its metrics. Counts are estimates flagged by
/// `estimated` when sampling is active; `ci` then carries the confidence
/// interval of the absolute support.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedent: PathPattern,
    pub consequent: PathPattern,
    pub asupp: f64,
    pub rsupp: f64,
    pub conf: f64,
    pub lift: f64,
    pub estimated: bool,
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMetrics {
    pub asupp: u64,
    pub rsupp: f64,
    pub conf: f64,
    pub lift: f64,
}

/// Exact rule metrics from the two matched source sets.
pub fn compute_metrics(x: &[VertexId], y: &[VertexId], vertex_count: usize) -> RuleMetrics {
    let asupp = intersect_count(x, y);
    debug_assert!(!x.is_empty() && !y.is_empty());
    RuleMetrics {
        asupp,
        rsupp: asupp as f64 / vertex_count as f64,
        conf: asupp as f64 / x.len() as f64,
        lift: (asupp as f64 * vertex_count as f64) / (x.len() as f64 * y.len() as f64),
    }
}

struct Entry {
    pattern: PathPattern,
    table: MatchTable,
    sources: Vec<VertexId>,
    support: f64,
    links: Vec<usize>,
    /// Per-worker indices into the table's entries, so extension waves walk
    /// only their own slice instead of filtering the whole table.
    worker_entries: Vec<Vec<u32>>,
}

#[derive(Default)]
struct Store {
    entries: Vec<Entry>,
    index: HashMap<PathPattern, usize>,
}

impl Store {
    fn insert(&mut self, table: MatchTable, support: f64, ctx: &Ctx<'_>) -> usize {
        let mut worker_entries = vec![Vec::new(); ctx.threads];
        for (i, (src, _)) in table.entries().iter().enumerate() {
            let owner = ctx.owner[*src as usize];
            if owner != u32::MAX && ctx.mask.as_ref().is_none_or(|m| m[*src as usize]) {
                worker_entries[owner as usize].push(i as u32);
            }
        }
        self.insert_with_partitions(table, support, worker_entries)
    }

    fn insert_with_partitions(
        &mut self,
        table: MatchTable,
        support: f64,
        worker_entries: Vec<Vec<u32>>,
    ) -> usize {
        let id = self.entries.len();
        let pattern = table.pattern().clone();
        let sources = table.sources();
        self.index.insert(pattern.clone(), id);
        self.entries.push(Entry {
            pattern,
            table,
            sources,
            support,
            links: Vec::new(),
            worker_entries,
        });
        id
    }

    fn id_of(&self, p: &PathPattern) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// All frequent patterns with their match tables, grouped by length, plus
/// the frontier the run used.
pub struct FrequentSets {
    store: Store,
    by_length: Vec<Vec<usize>>,
    reachability: Vec<usize>,
    pub frontier: Frontier,
}

impl FrequentSets {
    pub fn max_length(&self) -> usize {
        self.by_length.len().saturating_sub(1)
    }

    pub fn patterns_at(&self, len: usize) -> impl Iterator<Item = (&PathPattern, &[VertexId], f64)> {
        self.by_length
            .get(len)
            .into_iter()
            .flatten()
            .map(|&id| self.entry_view(id))
    }

    pub fn reachability_patterns(&self) -> impl Iterator<Item = (&PathPattern, &[VertexId], f64)> {
        self.reachability.iter().map(|&id| self.entry_view(id))
    }

    /// Every stored pattern: all lengths plus reachability.
    pub fn all_patterns(&self) -> impl Iterator<Item = (&PathPattern, &[VertexId], f64)> {
        self.store
            .entries
            .iter()
            .map(|e| (&e.pattern, e.sources.as_slice(), e.support))
    }

    fn entry_view(&self, id: usize) -> (&PathPattern, &[VertexId], f64) {
        let e = &self.store.entries[id];
        (&e.pattern, e.sources.as_slice(), e.support)
    }

    pub fn contains(&self, p: &PathPattern) -> bool {
        self.store.id_of(p).is_some()
    }

    pub fn sources_of(&self, p: &PathPattern) -> Option<&[VertexId]> {
        self.store.id_of(p).map(|id| self.store.entries[id].sources.as_slice())
    }

    pub fn support_of(&self, p: &PathPattern) -> Option<f64> {
        self.store.id_of(p).map(|id| self.store.entries[id].support)
    }

    pub fn table_of(&self, p: &PathPattern) -> Option<&MatchTable> {
        self.store.id_of(p).map(|id| &self.store.entries[id].table)
    }

    /// Frequent vertical and horizontal extensions discovered from `p`.
    pub fn extensions_of(&self, p: &PathPattern) -> Vec<&PathPattern> {
        match self.store.id_of(p) {
            Some(id) => self.store.entries[id]
                .links
                .iter()
                .map(|&l| &self.store.entries[l].pattern)
                .collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct MineStats {
    pub attribute_sets: usize,
    pub simple_patterns: usize,
    pub reachability_patterns: usize,
    pub rules: usize,
    pub simple_candidates_evaluated: usize,
    pub reachability_candidates_evaluated: usize,
    pub rule_candidates_evaluated: usize,
    /// Exact-mode suffix rejections `(label, attr, length)`: no frequent
    /// pattern of that length may end with the hop.
    pub rejected_suffixes: Vec<(LabelId, AttrId, usize)>,
    /// Exact-mode reachability target rejections `(label, attr)`.
    pub rejected_reach_targets: Vec<(LabelId, AttrId)>,
    /// Wall-clock seconds per phase: attribute sets, simple patterns,
    /// reachability patterns, rules.
    pub phase_seconds: [f64; 4],
}

pub struct MineOutcome {
    pub sets: FrequentSets,
    pub rules: Vec<Rule>,
    pub stats: MineStats,
    pub warnings: Vec<String>,
    pub sample: Option<SamplePlan>,
    /// Threshold after relative-to-absolute conversion.
    pub theta: f64,
}

/// Level-wise discovery of every attribute set carried by strictly more
/// than `theta` vertices, with the carrying vertices. Output is sorted.
pub fn discover_attribute_sets(
    graph: &PropertyGraph,
    theta: f64,
) -> Vec<(AttrSet, Vec<VertexId>)> {
    let mut out: Vec<(AttrSet, Vec<VertexId>)> = Vec::new();
    let mut level: Vec<(AttrSet, Vec<VertexId>)> = (0..graph.attributes().len() as u32)
        .filter_map(|a| {
            let carriers = graph.attr_carriers(a).to_vec();
            ((carriers.len() as f64) > theta).then(|| (vec![a], carriers))
        })
        .collect();
    level.sort();
    while !level.is_empty() {
        let frequent_here: HashSet<&AttrSet> = level.iter().map(|(s, _)| s).collect();
        let mut next: Vec<(AttrSet, Vec<VertexId>)> = Vec::new();
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let (a, ca) = &level[i];
                let (b, cb) = &level[j];
                if a[..a.len() - 1] != b[..b.len() - 1] {
                    continue;
                }
                let mut cand = a.clone();
                cand.push(*b.last().unwrap());
                // downward closure: every one-attribute removal must be
                // frequent at the current level
                let closed = (0..cand.len()).all(|drop| {
                    let mut sub = cand.clone();
                    sub.remove(drop);
                    frequent_here.contains(&sub)
                });
                if !closed {
                    continue;
                }
                let carriers = intersect_sorted(ca, cb);
                if (carriers.len() as f64) > theta {
                    next.push((cand, carriers));
                }
            }
        }
        next.sort();
        out.append(&mut level);
        level = next;
    }
    out.sort();
    out
}

/// Per-label, per-attribute edge-target counts, filled by one edge sweep.
struct SingletonEdgeCounts {
    counts: Vec<Vec<u64>>,
}

impl SingletonEdgeCounts {
    fn build(graph: &PropertyGraph) -> SingletonEdgeCounts {
        let mut counts = vec![vec![0u64; graph.attributes().len()]; graph.labels().len()];
        for &(_, l, d) in graph.edges() {
            for &a in graph.attrs_of(d) {
                counts[l as usize][a as usize] += 1;
            }
        }
        SingletonEdgeCounts { counts }
    }

    fn get(&self, label: LabelId, attr: AttrId) -> u64 {
        self.counts[label as usize][attr as usize]
    }
}

struct VertCand {
    pattern: PathPattern,
    parent: usize,
    label: LabelId,
    attrs: AttrSet,
}

struct JoinCand {
    pattern: PathPattern,
    parent_a: usize,
    parent_b: usize,
    pos: usize,
    added: AttrId,
}

struct Ctx<'g> {
    graph: &'g PropertyGraph,
    owner: Vec<u32>,
    threads: usize,
    mask: Option<Vec<bool>>,
    rho: f64,
    theta: f64,
}

impl Ctx<'_> {
    fn allowed(&self, v: VertexId) -> bool {
        self.owner[v as usize] != u32::MAX
            && self.mask.as_ref().is_none_or(|m| m[v as usize])
    }

    fn frequent(&self, raw_count: usize) -> bool {
        (raw_count as f64 / self.rho) > self.theta
    }

    fn support(&self, raw_count: usize) -> f64 {
        raw_count as f64 / self.rho
    }
}

/// Runs `f(worker)` for every worker index, collecting results in worker
/// order. Spawns scoped threads only when the wave is worth it; the inline
/// path runs the same per-worker closures sequentially, so results never
/// depend on which path executed.
fn run_partitioned<T, F>(threads: usize, work_items: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if threads <= 1 || work_items < 128 {
        return (0..threads).map(f).collect();
    }
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..threads).map(|w| s.spawn(move || f(w))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

/// Splits `0..len` into per-worker index chunks (round-robin).
fn chunk_indices(len: usize, threads: usize, worker: usize) -> impl Iterator<Item = usize> {
    (worker..len).step_by(threads.max(1))
}

pub fn mine(graph: &PropertyGraph, config: &MinerConfig) -> Result<MineOutcome, ConfigError> {
    config.validate()?;
    let n = graph.vertex_count();
    let mut warnings = Vec::new();
    let mut stats = MineStats::default();

    let theta = config.min_support.absolute_threshold(n);
    if n == 0 || theta >= n as f64 {
        if n > 0 {
            warnings.push(format!(
                "support threshold {theta} is not below the vertex count {n}; nothing can be frequent"
            ));
        }
        return Ok(MineOutcome {
            sets: FrequentSets {
                store: Store::default(),
                by_length: vec![Vec::new(); config.max_length + 1],
                reachability: Vec::new(),
                frontier: Frontier {
                    max_in_degree: graph.max_in_degree(),
                    frequent_labels: Vec::new(),
                    admissible_targets: Vec::new(),
                },
            },
            rules: Vec::new(),
            stats,
            warnings,
            sample: None,
            theta,
        });
    }

    let k = config.max_length;
    let psi = config.psi();
    let rho = config.rho();
    let exact_pruning = psi >= 1.0 && !config.baseline;
    let estimated = rho < 1.0;

    // (1) frequent attribute sets, exact in every mode
    let phase_start = std::time::Instant::now();
    let p0 = discover_attribute_sets(graph, theta);
    stats.phase_seconds[0] = phase_start.elapsed().as_secs_f64();
    stats.attribute_sets = p0.len();
    let frequent_singletons: Vec<AttrId> = p0
        .iter()
        .filter(|(s, _)| s.len() == 1)
        .map(|(s, _)| s[0])
        .collect();

    // sampling plan over the frequent-attribute strata
    let sample = config
        .sampling_rate
        .map(|r| build_sample(graph, &frequent_singletons, r, config.rng_seed));
    let mask = sample.as_ref().map(|p| p.mask(n));

    // frontier, label pools, worker partition
    let frontier = compute_frontier(graph, theta, k);
    let reach_pool: Vec<LabelId> = match config.reachability_bound {
        ReachabilityBound::KBounded => frontier.frequent_labels.clone(),
        ReachabilityBound::Unbounded => (0..graph.labels().len() as u32)
            .filter(|&l| (graph.count_sources(&[], l) as f64) > theta)
            .collect(),
    };
    let pool_for_costs: Vec<LabelId> = if config.baseline {
        (0..graph.labels().len() as u32).collect()
    } else {
        let mut p = frontier.frequent_labels.clone();
        p.extend(&reach_pool);
        p.sort_unstable();
        p.dedup();
        p
    };
    let costs = retained_costs(graph, &pool_for_costs, &frequent_singletons);
    let part = partition(&costs, config.threads);
    let ctx = Ctx {
        graph,
        owner: part.owner_map(n),
        threads: config.threads,
        mask,
        rho,
        theta,
    };

    let edge_counts = SingletonEdgeCounts::build(graph);
    let d_m = graph.max_in_degree() as u64;

    let mut store = Store::default();
    let mut by_length: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    for (set, carriers) in &p0 {
        let entries = carriers
            .iter()
            .map(|&v| (v, TargetSet::Sorted(vec![v])))
            .collect();
        let table = MatchTable::new(PathPattern::length_zero(set.clone()), entries);
        let support = carriers.len() as f64;
        by_length[0].push(store.insert(table, support, &ctx));
    }

    // realizable attribute sets, needed only for baseline candidates
    let realizable: Vec<AttrSet> = if config.baseline {
        realizable_attr_sets(graph)
    } else {
        Vec::new()
    };

    // (2) simple patterns level by level
    let phase_start = std::time::Instant::now();
    let mut source_gate_memo: HashMap<(AttrSet, LabelId), u64> = HashMap::new();
    let mut prev: Vec<usize> = by_length[0].clone();
    for length in 1..=k {
        if exact_pruning {
            for label in 0..graph.labels().len() as u32 {
                for attr in 0..graph.attributes().len() as u32 {
                    let admissible = scaled_bound_exceeds(
                        edge_counts.get(label, attr),
                        d_m,
                        (length - 1) as f64,
                        theta,
                    );
                    if !admissible {
                        stats.rejected_suffixes.push((label, attr, length));
                    }
                }
            }
        }
        let cands: Vec<VertCand> = if config.baseline {
            let mut cands = Vec::new();
            for &pid in &prev {
                for label in 0..graph.labels().len() as u32 {
                    for set in &realizable {
                        let pattern = store.entries[pid]
                            .pattern
                            .vertical_extend(label, set.clone())
                            .unwrap();
                        cands.push(VertCand {
                            pattern,
                            parent: pid,
                            label,
                            attrs: set.clone(),
                        });
                    }
                }
            }
            cands
        } else {
            let mut per_label_targets: Vec<Vec<AttrId>> = Vec::new();
            for label in 0..graph.labels().len() as u32 {
                let base = if frontier.frequent_labels.contains(&label) || length > 1 {
                    (0..graph.attributes().len() as u32)
                        .filter(|&a| {
                            scaled_bound_exceeds(
                                edge_counts.get(label, a),
                                d_m,
                                psi * (length - 1) as f64,
                                theta,
                            )
                        })
                        .collect()
                } else {
                    // first hops additionally need the label pool
                    Vec::new()
                };
                per_label_targets.push(base);
            }
            let mut cands = Vec::new();
            for &pid in &prev {
                // level one extends unit attribute sets only; wider source
                // sets are reached by sibling joins, which keeps every
                // discovered pattern linked inside the rule lattice
                if length == 1 && store.entries[pid].pattern.last_attrs().len() != 1 {
                    continue;
                }
                let last = store.entries[pid].pattern.last_attrs().clone();
                for label in 0..graph.labels().len() as u32 {
                    if per_label_targets[label as usize].is_empty() {
                        continue;
                    }
                    // the hop's source side cannot beat
                    // count_sources(last, label) * d_m^(length-1)
                    let src_count = *source_gate_memo
                        .entry((last.clone(), label))
                        .or_insert_with(|| graph.count_sources(&last, label));
                    if !scaled_bound_exceeds(src_count, d_m, (length - 1) as f64, theta) {
                        continue;
                    }
                    for &a in &per_label_targets[label as usize] {
                        let pattern = store.entries[pid]
                            .pattern
                            .vertical_extend(label, vec![a])
                            .unwrap();
                        cands.push(VertCand {
                            pattern,
                            parent: pid,
                            label,
                            attrs: vec![a],
                        });
                    }
                }
            }
            cands
        };
        stats.simple_candidates_evaluated += cands.len();
        let mut level = evaluate_vertical(&ctx, &mut store, cands);
        if !config.baseline {
            horizontal_fixpoint(&ctx, &mut store, &mut level, &mut stats);
        }
        by_length[length] = level.clone();
        prev = level;
    }
    stats.simple_patterns = by_length[1..].iter().map(Vec::len).sum();
    stats.phase_seconds[1] = phase_start.elapsed().as_secs_f64();

    // (3) reachability patterns
    let phase_start = std::time::Instant::now();
    let depth = match config.reachability_bound {
        ReachabilityBound::KBounded => Some(k),
        ReachabilityBound::Unbounded => None,
    };
    let reach_labels: Vec<LabelId> = if config.baseline {
        (0..graph.labels().len() as u32).collect()
    } else {
        reach_pool.clone()
    };
    let mut reach_ids: Vec<usize> = Vec::new();
    for &label in &reach_labels {
        if exact_pruning && depth.is_some() {
            for attr in 0..graph.attributes().len() as u32 {
                if !scaled_bound_exceeds(edge_counts.get(label, attr), d_m, (k - 1) as f64, theta)
                {
                    stats.rejected_reach_targets.push((label, attr));
                }
            }
        }
        // per-worker bounded BFS over owned label sources
        let reach_parts = run_partitioned(ctx.threads, graph.label_sources(label).len(), |w| {
            let mut scratch = BfsScratch::new(n);
            let mut out: Vec<(VertexId, TargetSet)> = Vec::new();
            for &v in graph.label_sources(label) {
                if ctx.owner[v as usize] != w as u32 {
                    continue;
                }
                let ids = scratch.reach_from(graph, v, label, depth);
                if !ids.is_empty() {
                    out.push((v, TargetSet::from_sorted(ids, n)));
                }
            }
            out
        });
        let mut reach: Vec<Option<TargetSet>> = vec![None; n];
        for part in reach_parts {
            for (v, t) in part {
                reach[v as usize] = Some(t);
            }
        }

        let cands: Vec<(PathPattern, &[VertexId])> = if config.baseline {
            p0.iter()
                .flat_map(|(set, carriers)| {
                    realizable.iter().map(move |t| {
                        (
                            PathPattern::reachability(set.clone(), label, t.clone()),
                            carriers.as_slice(),
                        )
                    })
                })
                .collect()
        } else {
            let mut cands: Vec<(PathPattern, &[VertexId])> = Vec::new();
            for &a0 in &frequent_singletons {
                if !((graph.count_sources(&[a0], label) as f64) > theta) {
                    continue;
                }
                let carriers = graph.attr_carriers(a0);
                for a1 in 0..graph.attributes().len() as u32 {
                    let ok = match depth {
                        Some(k) => suffix_admissible(graph, &[a1], label, k, theta, psi),
                        None => edge_counts.get(label, a1) > 0,
                    };
                    if ok {
                        cands.push((
                            PathPattern::reachability(vec![a0], label, vec![a1]),
                            carriers,
                        ));
                    }
                }
            }
            cands
        };
        stats.reachability_candidates_evaluated += cands.len();

        // evaluate candidates, chunked over workers
        let eval_work: usize = cands.iter().map(|(_, s)| s.len()).sum();
        let eval_parts = run_partitioned(ctx.threads, eval_work, |w| {
            let mut out: Vec<(usize, Vec<(VertexId, TargetSet)>)> = Vec::new();
            for ci in chunk_indices(cands.len(), ctx.threads, w) {
                let (pattern, sources) = &cands[ci];
                let target = pattern.last_attrs();
                let mut entries = Vec::new();
                for &v in sources.iter() {
                    if !ctx.allowed(v) {
                        continue;
                    }
                    if let Some(r) = &reach[v as usize] {
                        let kept: Vec<VertexId> =
                            r.iter().filter(|&t| graph.has_attrs(t, target)).collect();
                        if !kept.is_empty() {
                            entries.push((v, TargetSet::from_sorted(kept, n)));
                        }
                    }
                }
                out.push((ci, entries));
            }
            out
        });
        let mut merged: Vec<Option<Vec<(VertexId, TargetSet)>>> = vec![None; cands.len()];
        for part in eval_parts {
            for (ci, entries) in part {
                merged[ci] = Some(entries);
            }
        }
        let mut found = Vec::new();
        for (ci, entries) in merged.into_iter().enumerate() {
            let entries = entries.unwrap();
            if ctx.frequent(entries.len()) {
                let support = ctx.support(entries.len());
                let table = MatchTable::new(cands[ci].0.clone(), entries);
                found.push(store.insert(table, support, &ctx));
            }
        }
        if !config.baseline {
            horizontal_fixpoint(&ctx, &mut store, &mut found, &mut stats);
        }
        reach_ids.extend(found);
    }
    stats.reachability_patterns = reach_ids.len();
    stats.phase_seconds[2] = phase_start.elapsed().as_secs_f64();

    // (4) rules
    let phase_start = std::time::Instant::now();
    let rule_triples = discover_rules(&ctx, &store, &by_length, &reach_ids, config.baseline, &mut stats);
    let mut rules: Vec<Rule> = rule_triples
        .into_iter()
        .map(|(x, y, raw)| {
            let ex = &store.entries[x];
            let ey = &store.entries[y];
            let asupp = raw as f64 / rho;
            let ci = if estimated {
                sample
                    .as_ref()
                    .map(|p| {
                        let est = p.estimate_frequency(raw as usize, config.z_value);
                        (est.ci_low, est.ci_high)
                    })
            } else {
                None
            };
            Rule {
                antecedent: ex.pattern.clone(),
                consequent: ey.pattern.clone(),
                asupp,
                rsupp: asupp / n as f64,
                conf: asupp / ex.support,
                lift: (asupp * n as f64) / (ex.support * ey.support),
                estimated,
                ci,
            }
        })
        .collect();
    let mut keyed: Vec<((usize, String, String), Rule)> = rules
        .drain(..)
        .map(|r| (rule_sort_key(graph, &r), r))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    rules = keyed.into_iter().map(|(_, r)| r).collect();
    stats.rules = rules.len();
    stats.phase_seconds[3] = phase_start.elapsed().as_secs_f64();

    // canonical per-length ordering
    for ids in by_length.iter_mut() {
        ids.sort_by(|&a, &b| store.entries[a].pattern.cmp(&store.entries[b].pattern));
    }
    reach_ids.sort_by(|&a, &b| store.entries[a].pattern.cmp(&store.entries[b].pattern));

    Ok(MineOutcome {
        sets: FrequentSets {
            store,
            by_length,
            reachability: reach_ids,
            frontier,
        },
        rules,
        stats,
        warnings,
        sample,
        theta,
    })
}

fn rule_sort_key(graph: &PropertyGraph, r: &Rule) -> (usize, String, String) {
    (
        r.antecedent.len() + r.consequent.len(),
        r.antecedent.display(graph).to_string(),
        r.consequent.display(graph).to_string(),
    )
}

/// Every nonempty attribute set carried in full by at least one vertex.
fn realizable_attr_sets(graph: &PropertyGraph) -> Vec<AttrSet> {
    let mut seen: HashSet<AttrSet> = HashSet::new();
    for v in 0..graph.vertex_count() as u32 {
        let attrs = graph.attrs_of(v);
        let m = attrs.len();
        for mask in 1u32..(1u32 << m) {
            let set: AttrSet = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| attrs[i]).collect();
            seen.insert(set);
        }
    }
    let mut out: Vec<AttrSet> = seen.into_iter().collect();
    out.sort();
    out
}

fn evaluate_vertical(ctx: &Ctx<'_>, store: &mut Store, cands: Vec<VertCand>) -> Vec<usize> {
    if cands.is_empty() {
        return Vec::new();
    }
    let store_ref: &Store = store;
    let work: usize = cands
        .iter()
        .map(|c| store_ref.entries[c.parent].table.source_count())
        .sum();
    let mut parts: Vec<Vec<Vec<(VertexId, TargetSet)>>> =
        run_partitioned(ctx.threads, work, |w| {
            cands
                .iter()
                .map(|c| {
                    let parent = &store_ref.entries[c.parent];
                    parent.worker_entries[w]
                        .iter()
                        .filter_map(|&i| {
                            let (src, ts) = &parent.table.entries()[i as usize];
                            expand_targets(ctx.graph, ts, c.label, &c.attrs).map(|t| (*src, t))
                        })
                        .collect()
                })
                .collect()
        });
    let mut out = Vec::new();
    for (ci, cand) in cands.into_iter().enumerate() {
        let total: usize = parts.iter().map(|p| p[ci].len()).sum();
        if !ctx.frequent(total) {
            continue;
        }
        // workers own disjoint source ranges and emit in ascending order;
        // a k-way head merge keeps the table sorted and yields the
        // per-worker entry indices as a side effect
        let mut runs: Vec<std::vec::IntoIter<(VertexId, TargetSet)>> = parts
            .iter_mut()
            .map(|p| std::mem::take(&mut p[ci]).into_iter())
            .collect();
        let mut heads: Vec<Option<(VertexId, TargetSet)>> =
            runs.iter_mut().map(Iterator::next).collect();
        let mut entries: Vec<(VertexId, TargetSet)> = Vec::with_capacity(total);
        let mut worker_entries = vec![Vec::new(); parts.len()];
        loop {
            let mut best: Option<usize> = None;
            for (w, head) in heads.iter().enumerate() {
                if let Some((src, _)) = head {
                    if best.is_none_or(|b| *src < heads[b].as_ref().unwrap().0) {
                        best = Some(w);
                    }
                }
            }
            let Some(w) = best else { break };
            let entry = heads[w].take().unwrap();
            heads[w] = runs[w].next();
            worker_entries[w].push(entries.len() as u32);
            entries.push(entry);
        }
        let support = ctx.support(entries.len());
        let table = MatchTable::from_sorted(cand.pattern, entries);
        let id = store.insert_with_partitions(table, support, worker_entries);
        store.entries[cand.parent].links.push(id);
        out.push(id);
    }
    out
}

/// Closes one length level under sibling joins until no new frequent
/// pattern appears. Joined patterns are evaluated from stored tables:
/// position 0 restricts sources, the last position filters targets, and
/// interior positions re-extend from the stored prefix table.
fn horizontal_fixpoint(ctx: &Ctx<'_>, store: &mut Store, level: &mut Vec<usize>, stats: &mut MineStats) {
    if level.is_empty() {
        return;
    }
    let mut seen: HashSet<PathPattern> =
        level.iter().map(|&id| store.entries[id].pattern.clone()).collect();
    loop {
        let mut cands: Vec<JoinCand> = Vec::new();
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let pa = &store.entries[level[i]].pattern;
                let pb = &store.entries[level[j]].pattern;
                let Some(joined) = pa.horizontal_join(pb) else {
                    continue;
                };
                if seen.contains(&joined) {
                    continue;
                }
                let sets_a = pa.attr_sets();
                let sets_j = joined.attr_sets();
                let pos = (0..sets_j.len()).find(|&p| sets_j[p] != sets_a[p]).unwrap();
                let added = *sets_j[pos].iter().find(|a| !sets_a[pos].contains(a)).unwrap();
                // downward closure: every one-attribute removal that keeps
                // the position nonempty must already be frequent
                let closed = (0..sets_j.len()).all(|p| {
                    if sets_j[p].len() < 2 {
                        return true;
                    }
                    sets_j[p].iter().all(|&drop| {
                        let reduced: AttrSet =
                            sets_j[p].iter().copied().filter(|&x| x != drop).collect();
                        let parent = joined.with_attrs_at(p, reduced);
                        store.id_of(&parent).is_some()
                    })
                });
                if closed {
                    seen.insert(joined.clone());
                    cands.push(JoinCand {
                        pattern: joined,
                        parent_a: level[i],
                        parent_b: level[j],
                        pos,
                        added,
                    });
                }
            }
        }
        if cands.is_empty() {
            return;
        }
        if store.entries[level[0]].pattern.is_reachability() {
            stats.reachability_candidates_evaluated += cands.len();
        } else {
            stats.simple_candidates_evaluated += cands.len();
        }
        let store_ref: &Store = store;
        let tables = run_partitioned(ctx.threads, cands.len() * 16, |w| {
            let mut out: Vec<(usize, MatchTable)> = Vec::new();
            for ci in chunk_indices(cands.len(), ctx.threads, w) {
                let c = &cands[ci];
                out.push((ci, evaluate_join(ctx, store_ref, c)));
            }
            out
        });
        let mut merged: Vec<Option<MatchTable>> = vec![None; cands.len()];
        for part in tables {
            for (ci, t) in part {
                merged[ci] = Some(t);
            }
        }
        let mut added_ids = Vec::new();
        for (ci, table) in merged.into_iter().enumerate() {
            let table = table.unwrap();
            if ctx.frequent(table.source_count()) {
                let support = ctx.support(table.source_count());
                let id = store.insert(table, support, ctx);
                store.entries[cands[ci].parent_a].links.push(id);
                store.entries[cands[ci].parent_b].links.push(id);
                added_ids.push(id);
            }
        }
        if added_ids.is_empty() {
            return;
        }
        level.extend(added_ids);
    }
}

fn evaluate_join(ctx: &Ctx<'_>, store: &Store, cand: &JoinCand) -> MatchTable {
    let parent = &store.entries[cand.parent_a].table;
    let last_pos = cand.pattern.attr_sets().len() - 1;
    if cand.pos == 0 {
        restrict_sources(ctx.graph, parent, &[cand.added], 0).unwrap()
    } else if cand.pos == last_pos {
        filter_targets(ctx.graph, parent, &[cand.added])
    } else {
        // interior position: re-extend from the stored prefix table
        let prefix = cand.pattern.prefix(cand.pos).unwrap();
        match store.id_of(&prefix) {
            None => MatchTable::new(cand.pattern.clone(), Vec::new()),
            Some(pid) => {
                let mut table = store.entries[pid].table.clone();
                for step in cand.pos..cand.pattern.len() {
                    let (label, attrs) = cand.pattern.hop(step);
                    table = extend_matches(ctx.graph, &table, label, attrs);
                }
                table
            }
        }
    }
}

/// Rule discovery over ordered pattern pairs. The staged walk seeds with
/// unit patterns of length one, evaluates pair intersections, and extends
/// frequent pairs through the recorded pattern extensions; pairs are
/// extended even when dominance-invalid, but only valid pairs are emitted.
fn discover_rules(
    ctx: &Ctx<'_>,
    store: &Store,
    by_length: &[Vec<usize>],
    reach_ids: &[usize],
    baseline: bool,
    stats: &mut MineStats,
) -> Vec<(usize, usize, u64)> {
    let mut emitted = Vec::new();
    if baseline {
        let mut all: Vec<usize> = by_length[1..].iter().flatten().copied().collect();
        all.extend(reach_ids);
        let pairs: Vec<(usize, usize)> = all
            .iter()
            .flat_map(|&x| all.iter().map(move |&y| (x, y)))
            .filter(|(x, y)| x != y)
            .collect();
        stats.rule_candidates_evaluated += pairs.len();
        let parts = run_partitioned(ctx.threads, pairs.len(), |w| {
            chunk_indices(pairs.len(), ctx.threads, w)
                .map(|pi| {
                    let (x, y) = pairs[pi];
                    (pi, intersect_count(&store.entries[x].sources, &store.entries[y].sources))
                })
                .collect::<Vec<_>>()
        });
        let mut raw = vec![0u64; pairs.len()];
        for part in parts {
            for (pi, c) in part {
                raw[pi] = c;
            }
        }
        for (pi, &(x, y)) in pairs.iter().enumerate() {
            if ctx.frequent(raw[pi] as usize) && mutually_non_dominating(store, x, y) {
                emitted.push((x, y, raw[pi]));
            }
        }
        return emitted;
    }

    let units: Vec<usize> = by_length
        .get(1)
        .into_iter()
        .flatten()
        .chain(reach_ids)
        .copied()
        .filter(|&id| store.entries[id].pattern.is_unit())
        .collect();
    let mut visited: HashSet<(usize, usize)> = HashSet::new();
    let mut batch: Vec<(usize, usize)> = Vec::new();
    for &x in &units {
        for &y in &units {
            if visited.insert((x, y)) {
                batch.push((x, y));
            }
        }
    }
    while !batch.is_empty() {
        stats.rule_candidates_evaluated += batch.len();
        let parts = run_partitioned(ctx.threads, batch.len(), |w| {
            chunk_indices(batch.len(), ctx.threads, w)
                .map(|bi| {
                    let (x, y) = batch[bi];
                    (bi, intersect_count(&store.entries[x].sources, &store.entries[y].sources))
                })
                .collect::<Vec<_>>()
        });
        let mut raw = vec![0u64; batch.len()];
        for part in parts {
            for (bi, c) in part {
                raw[bi] = c;
            }
        }
        let mut next: Vec<(usize, usize)> = Vec::new();
        for (bi, &(x, y)) in batch.iter().enumerate() {
            if !ctx.frequent(raw[bi] as usize) {
                continue;
            }
            if mutually_non_dominating(store, x, y) {
                emitted.push((x, y, raw[bi]));
            }
            for &x2 in &store.entries[x].links {
                if visited.insert((x2, y)) {
                    next.push((x2, y));
                }
            }
            for &y2 in &store.entries[y].links {
                if visited.insert((x, y2)) {
                    next.push((x, y2));
                }
            }
        }
        batch = next;
    }
    emitted
}

fn mutually_non_dominating(store: &Store, x: usize, y: usize) -> bool {
    let px = &store.entries[x].pattern;
    let py = &store.entries[y].pattern;
    !px.dominates(py) && !py.dominates(px)
}
