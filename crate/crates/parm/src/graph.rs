//! Immutable in-memory property graph with the count indexes the mining
//! pipeline relies on.
//!
//! Vertices carry sorted sets of interned attribute ids, edges carry interned
//! label ids. All indexes are built once at construction; the graph is
//! read-only afterwards and safe to share across worker threads.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use thiserror::Error;

pub type VertexId = u32;
pub type LabelId = u32;
pub type AttrId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{file} line {line}: {msg}")]
    Format {
        file: &'static str,
        line: usize,
        msg: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Bidirectional string <-> dense id map.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Dictionary {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Dictionary {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// What happened while loading a graph from its TSV sources.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct LoadReport {
    /// Vertices that appeared only in the edge file and were created with an
    /// empty attribute set.
    pub implicit_vertices: usize,
}

/// Directed multigraph with labeled edges and attributed vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyGraph {
    vertex_names: Dictionary,
    labels: Dictionary,
    attrs: Dictionary,
    /// Per-vertex sorted, duplicate-free attribute ids.
    attr_sets: Vec<Vec<AttrId>>,
    /// Edge triples in input order; multi-edges are kept.
    edges: Vec<(VertexId, LabelId, VertexId)>,
    /// CSR adjacency sorted by (label, dst) per vertex.
    adj_offsets: Vec<usize>,
    adj_labels: Vec<LabelId>,
    adj_dsts: Vec<VertexId>,
    in_degree: Vec<u32>,
    max_in_degree: u32,
    /// Per-attribute sorted list of carrying vertices.
    attr_carriers: Vec<Vec<VertexId>>,
    /// Per-label sorted, deduplicated list of vertices with an out-edge of
    /// that label.
    label_sources: Vec<Vec<VertexId>>,
    /// Per-label edge destination ids, sorted, with multiplicity.
    label_targets: Vec<Vec<VertexId>>,
}

impl PropertyGraph {
    pub fn vertex_count(&self) -> usize {
        self.attr_sets.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &Dictionary {
        &self.labels
    }

    pub fn attributes(&self) -> &Dictionary {
        &self.attrs
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        self.vertex_names.name(v)
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.id(name)
    }

    pub fn edges(&self) -> &[(VertexId, LabelId, VertexId)] {
        &self.edges
    }

    pub fn attrs_of(&self, v: VertexId) -> &[AttrId] {
        &self.attr_sets[v as usize]
    }

    /// True when `attrs` (sorted) is a subset of the vertex attribute set.
    pub fn has_attrs(&self, v: VertexId, attrs: &[AttrId]) -> bool {
        is_subset(attrs, &self.attr_sets[v as usize])
    }

    /// Out-neighbors of `v` through edges labeled `label`, ascending, with
    /// multi-edge repetition.
    pub fn out_neighbors(&self, v: VertexId, label: LabelId) -> &[VertexId] {
        let lo = self.adj_offsets[v as usize];
        let hi = self.adj_offsets[v as usize + 1];
        let seg = &self.adj_labels[lo..hi];
        let start = lo + seg.partition_point(|&l| l < label);
        let end = lo + seg.partition_point(|&l| l <= label);
        &self.adj_dsts[start..end]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.adj_offsets[v as usize + 1] - self.adj_offsets[v as usize]
    }

    pub fn in_degree(&self, v: VertexId) -> u32 {
        self.in_degree[v as usize]
    }

    /// Maximum in-degree over all vertices, counted over all labels.
    pub fn max_in_degree(&self) -> u32 {
        self.max_in_degree
    }

    /// Sorted vertices carrying attribute `a`; unknown ids carry nothing.
    pub fn attr_carriers(&self, a: AttrId) -> &[VertexId] {
        self.attr_carriers
            .get(a as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Sorted vertices whose attribute set contains every id in `attrs`.
    /// The empty set matches every vertex.
    pub fn vertices_with_attrs(&self, attrs: &[AttrId]) -> Vec<VertexId> {
        match attrs {
            [] => (0..self.vertex_count() as u32).collect(),
            [a] => self.attr_carriers(*a).to_vec(),
            [first, rest @ ..] => {
                let mut acc = self.attr_carriers(*first).to_vec();
                for a in rest {
                    acc = intersect_sorted(&acc, self.attr_carriers(*a));
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Sorted vertices with at least one out-edge labeled `label`.
    pub fn label_sources(&self, label: LabelId) -> &[VertexId] {
        &self.label_sources[label as usize]
    }

    /// Number of edges carrying `label`.
    pub fn label_edge_count(&self, label: LabelId) -> u64 {
        self.label_targets[label as usize].len() as u64
    }

    /// Number of vertices carrying every attribute in `attrs` that have at
    /// least one out-edge labeled `label`. Unknown ids simply never match.
    pub fn count_sources(&self, attrs: &[AttrId], label: LabelId) -> u64 {
        if label as usize >= self.labels.len() {
            return 0;
        }
        let sources = self.label_sources(label);
        if attrs.is_empty() {
            return sources.len() as u64;
        }
        sources.iter().filter(|&&v| self.has_attrs(v, attrs)).count() as u64
    }

    /// Number of edges labeled `label` whose destination carries every
    /// attribute in `attrs`. Multi-edges are counted individually.
    pub fn count_target_edges(&self, attrs: &[AttrId], label: LabelId) -> u64 {
        if label as usize >= self.labels.len() {
            return 0;
        }
        let targets = &self.label_targets[label as usize];
        if attrs.is_empty() {
            return targets.len() as u64;
        }
        let mut n = 0u64;
        let mut i = 0;
        while i < targets.len() {
            let v = targets[i];
            let mut j = i + 1;
            while j < targets.len() && targets[j] == v {
                j += 1;
            }
            if self.has_attrs(v, attrs) {
                n += (j - i) as u64;
            }
            i = j;
        }
        n
    }

    /// Parses the TSV vertex and edge streams described in the README.
    /// Vertex ids are assigned by first appearance in the vertex file;
    /// vertices referenced only by edges are created with empty attribute
    /// sets and counted in the report.
    pub fn load<V: BufRead, E: BufRead>(
        vertices: V,
        edges: E,
    ) -> Result<(PropertyGraph, LoadReport), GraphError> {
        let mut b = GraphBuilder::new();
        for (no, line) in vertices.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let id = fields.next().unwrap_or("");
            let attrs = fields.next().unwrap_or("");
            if id.is_empty() || fields.next().is_some() {
                return Err(GraphError::Format {
                    file: "vertex file",
                    line: no + 1,
                    msg: format!("expected `id<TAB>attr1,attr2,...`, got {line:?}"),
                });
            }
            let attrs: Vec<&str> = if attrs.is_empty() {
                Vec::new()
            } else {
                attrs.split(',').collect()
            };
            if attrs.iter().any(|a| a.is_empty()) {
                return Err(GraphError::Format {
                    file: "vertex file",
                    line: no + 1,
                    msg: "empty attribute name".into(),
                });
            }
            b.add_vertex(id, &attrs).map_err(|msg| GraphError::Format {
                file: "vertex file",
                line: no + 1,
                msg,
            })?;
        }
        for (no, line) in edges.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [src, label, dst] if !src.is_empty() && !label.is_empty() && !dst.is_empty() => {
                    b.add_edge(src, label, dst);
                }
                _ => {
                    return Err(GraphError::Format {
                        file: "edge file",
                        line: no + 1,
                        msg: format!("expected `src<TAB>label<TAB>dst`, got {line:?}"),
                    })
                }
            }
        }
        Ok(b.build_with_report())
    }

    /// Writes the graph back out in the TSV formats `load` accepts.
    pub fn save<V: Write, E: Write>(&self, mut vertices: V, mut edges: E) -> std::io::Result<()> {
        for v in 0..self.vertex_count() as u32 {
            let attrs: Vec<&str> = self.attrs_of(v).iter().map(|&a| self.attrs.name(a)).collect();
            writeln!(vertices, "{}\t{}", self.vertex_name(v), attrs.join(","))?;
        }
        for &(src, label, dst) in &self.edges {
            writeln!(
                edges,
                "{}\t{}\t{}",
                self.vertex_name(src),
                self.labels.name(label),
                self.vertex_name(dst)
            )?;
        }
        Ok(())
    }
}

/// Incrementally assembles a [`PropertyGraph`]; names are interned on first
/// use. Edge endpoints that were never declared as vertices are created
/// implicitly with empty attribute sets.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertex_names: Dictionary,
    labels: Dictionary,
    attrs: Dictionary,
    attr_sets: Vec<Vec<AttrId>>,
    edges: Vec<(VertexId, LabelId, VertexId)>,
    declared: Vec<bool>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str, attrs: &[&str]) -> Result<VertexId, String> {
        let v = self.touch_vertex(name);
        if self.declared[v as usize] {
            return Err(format!("duplicate vertex id {name:?}"));
        }
        self.declared[v as usize] = true;
        let mut set: Vec<AttrId> = attrs.iter().map(|a| self.attrs.intern(a)).collect();
        set.sort_unstable();
        set.dedup();
        self.attr_sets[v as usize] = set;
        Ok(v)
    }

    pub fn add_edge(&mut self, src: &str, label: &str, dst: &str) {
        let s = self.touch_vertex(src);
        let l = self.labels.intern(label);
        let d = self.touch_vertex(dst);
        self.edges.push((s, l, d));
    }

    fn touch_vertex(&mut self, name: &str) -> VertexId {
        let before = self.vertex_names.len();
        let v = self.vertex_names.intern(name);
        if self.vertex_names.len() > before {
            self.attr_sets.push(Vec::new());
            self.declared.push(false);
        }
        v
    }

    pub fn build(self) -> PropertyGraph {
        self.build_with_report().0
    }

    pub fn build_with_report(mut self) -> (PropertyGraph, LoadReport) {
        let implicit = self.declared.iter().filter(|d| !**d).count();
        let n = self.attr_sets.len();

        let mut out_deg = vec![0usize; n];
        let mut in_degree = vec![0u32; n];
        for &(s, _, d) in &self.edges {
            out_deg[s as usize] += 1;
            in_degree[d as usize] += 1;
        }
        let mut adj_offsets = vec![0usize; n + 1];
        for v in 0..n {
            adj_offsets[v + 1] = adj_offsets[v] + out_deg[v];
        }
        let mut cursor = adj_offsets.clone();
        let mut adj_labels = vec![0u32; self.edges.len()];
        let mut adj_dsts = vec![0u32; self.edges.len()];
        for &(s, l, d) in &self.edges {
            let at = cursor[s as usize];
            adj_labels[at] = l;
            adj_dsts[at] = d;
            cursor[s as usize] += 1;
        }
        for v in 0..n {
            let lo = adj_offsets[v];
            let hi = adj_offsets[v + 1];
            let mut pairs: Vec<(LabelId, VertexId)> = adj_labels[lo..hi]
                .iter()
                .zip(&adj_dsts[lo..hi])
                .map(|(&l, &d)| (l, d))
                .collect();
            pairs.sort_unstable();
            for (i, (l, d)) in pairs.into_iter().enumerate() {
                adj_labels[lo + i] = l;
                adj_dsts[lo + i] = d;
            }
        }

        let mut attr_carriers = vec![Vec::new(); self.attrs.len()];
        for (v, set) in self.attr_sets.iter().enumerate() {
            for &a in set {
                attr_carriers[a as usize].push(v as u32);
            }
        }

        let mut label_sources = vec![Vec::new(); self.labels.len()];
        let mut label_targets = vec![Vec::new(); self.labels.len()];
        for &(s, l, d) in &self.edges {
            label_sources[l as usize].push(s);
            label_targets[l as usize].push(d);
        }
        for list in &mut label_sources {
            list.sort_unstable();
            list.dedup();
        }
        for list in &mut label_targets {
            list.sort_unstable();
        }

        let max_in_degree = in_degree.iter().copied().max().unwrap_or(0);
        for set in &mut self.attr_sets {
            set.shrink_to_fit();
        }

        (
            PropertyGraph {
                vertex_names: self.vertex_names,
                labels: self.labels,
                attrs: self.attrs,
                attr_sets: self.attr_sets,
                edges: self.edges,
                adj_offsets,
                adj_labels,
                adj_dsts,
                in_degree,
                max_in_degree,
                attr_carriers,
                label_sources,
                label_targets,
            },
            LoadReport {
                implicit_vertices: implicit,
            },
        )
    }
}

/// True when every element of `sub` (sorted) occurs in `set` (sorted).
pub fn is_subset(sub: &[u32], set: &[u32]) -> bool {
    let mut it = set.iter();
    'outer: for &x in sub {
        for &y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Intersection of two sorted, duplicate-free id lists.
pub fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Size of the intersection of two sorted, duplicate-free id lists.
pub fn intersect_count(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
