//! Path pattern values and their algebra: dominance, unit checks, vertical
//! and horizontal extension, and the canonical text form.
//!
//! Patterns are immutable values over interned ids; attribute sets are kept
//! sorted and duplicate-free so structurally equal patterns compare equal no
//! matter how they were assembled.

use std::fmt;

use thiserror::Error;

use crate::graph::{is_subset, AttrId, Dictionary, LabelId, PropertyGraph};

/// Sorted, duplicate-free attribute ids.
pub type AttrSet = Vec<AttrId>;

/// Normalizes an attribute id collection into canonical set form.
pub fn attr_set<I: IntoIterator<Item = AttrId>>(ids: I) -> AttrSet {
    let mut v: Vec<AttrId> = ids.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("reachability patterns cannot be extended vertically")]
    NotSimple,
    #[error("pattern text parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathPattern {
    /// Fixed-length pattern: one attribute set per position, one label per
    /// hop. `attr_sets.len() == labels.len() + 1`; length zero is a bare
    /// attribute set.
    Simple {
        attr_sets: Vec<AttrSet>,
        labels: Vec<LabelId>,
    },
    /// `<A0 -l*-> A1>`: a path of one or more edges, all labeled `label`,
    /// from a vertex satisfying `source` to one satisfying `target`.
    Reachability {
        source: AttrSet,
        label: LabelId,
        target: AttrSet,
    },
}

impl PathPattern {
    pub fn length_zero(attrs: AttrSet) -> Self {
        PathPattern::Simple {
            attr_sets: vec![attrs],
            labels: Vec::new(),
        }
    }

    pub fn simple(attr_sets: Vec<AttrSet>, labels: Vec<LabelId>) -> Self {
        assert_eq!(attr_sets.len(), labels.len() + 1, "arity mismatch");
        PathPattern::Simple { attr_sets, labels }
    }

    pub fn reachability(source: AttrSet, label: LabelId, target: AttrSet) -> Self {
        PathPattern::Reachability { source, label, target }
    }

    pub fn is_simple(&self) -> bool {
        matches!(self, PathPattern::Simple { .. })
    }

    pub fn is_reachability(&self) -> bool {
        matches!(self, PathPattern::Reachability { .. })
    }

    /// Number of hops: label count for simple patterns, 1 for reachability.
    pub fn len(&self) -> usize {
        match self {
            PathPattern::Simple { labels, .. } => labels.len(),
            PathPattern::Reachability { .. } => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn attr_sets(&self) -> Vec<&AttrSet> {
        match self {
            PathPattern::Simple { attr_sets, .. } => attr_sets.iter().collect(),
            PathPattern::Reachability { source, target, .. } => vec![source, target],
        }
    }

    pub fn first_attrs(&self) -> &AttrSet {
        match self {
            PathPattern::Simple { attr_sets, .. } => &attr_sets[0],
            PathPattern::Reachability { source, .. } => source,
        }
    }

    pub fn last_attrs(&self) -> &AttrSet {
        match self {
            PathPattern::Simple { attr_sets, .. } => attr_sets.last().unwrap(),
            PathPattern::Reachability { target, .. } => target,
        }
    }

    /// True when every attribute set holds exactly one attribute.
    pub fn is_unit(&self) -> bool {
        self.attr_sets().iter().all(|s| s.len() == 1)
    }

    /// Dominance per the pattern partial order: `self` dominates `other`
    /// when `self` is at least as long and at least as constrained at every
    /// position of `other`. Patterns of different kinds never dominate each
    /// other (a starred label is not positional).
    pub fn dominates(&self, other: &PathPattern) -> bool {
        match (self, other) {
            (
                PathPattern::Simple { attr_sets, labels },
                PathPattern::Simple {
                    attr_sets: other_sets,
                    labels: other_labels,
                },
            ) => {
                other_labels.len() <= labels.len()
                    && other_labels.iter().zip(labels).all(|(a, b)| a == b)
                    && other_sets
                        .iter()
                        .zip(attr_sets)
                        .all(|(sub, sup)| is_subset(sub, sup))
            }
            (
                PathPattern::Reachability { source, label, target },
                PathPattern::Reachability {
                    source: other_source,
                    label: other_label,
                    target: other_target,
                },
            ) => {
                label == other_label
                    && is_subset(other_source, source)
                    && is_subset(other_target, target)
            }
            _ => false,
        }
    }

    /// Appends one hop `(label, attrs)` to a simple pattern.
    pub fn vertical_extend(&self, label: LabelId, attrs: AttrSet) -> Result<PathPattern, PatternError> {
        match self {
            PathPattern::Simple { attr_sets, labels } => {
                let mut attr_sets = attr_sets.clone();
                let mut labels = labels.clone();
                attr_sets.push(attrs);
                labels.push(label);
                Ok(PathPattern::Simple { attr_sets, labels })
            }
            PathPattern::Reachability { .. } => Err(PatternError::NotSimple),
        }
    }

    /// Apriori-style sibling join: both patterns must share kind, length and
    /// labels and differ in exactly one position, each contributing one
    /// attribute the other lacks. Returns the union pattern, or `None` when
    /// the join precondition fails.
    pub fn horizontal_join(&self, other: &PathPattern) -> Option<PathPattern> {
        let (mine, theirs) = match (self, other) {
            (PathPattern::Simple { labels: la, .. }, PathPattern::Simple { labels: lb, .. }) => {
                if la != lb {
                    return None;
                }
                (self.attr_sets(), other.attr_sets())
            }
            (
                PathPattern::Reachability { label: la, .. },
                PathPattern::Reachability { label: lb, .. },
            ) => {
                if la != lb {
                    return None;
                }
                (self.attr_sets(), other.attr_sets())
            }
            _ => return None,
        };
        let mut joined: Option<(usize, AttrSet)> = None;
        for (i, (a, b)) in mine.iter().zip(&theirs).enumerate() {
            if a == b {
                continue;
            }
            if joined.is_some() {
                return None; // more than one differing position
            }
            let union = union_sorted(a, b);
            if union.len() != a.len() + 1 || union.len() != b.len() + 1 {
                return None;
            }
            joined = Some((i, union));
        }
        let (pos, union) = joined?;
        Some(self.with_attrs_at(pos, union))
    }

    /// Copy of the pattern with position `pos` replaced by `attrs`.
    pub fn with_attrs_at(&self, pos: usize, attrs: AttrSet) -> PathPattern {
        match self {
            PathPattern::Simple { attr_sets, labels } => {
                let mut attr_sets = attr_sets.clone();
                attr_sets[pos] = attrs;
                PathPattern::Simple {
                    attr_sets,
                    labels: labels.clone(),
                }
            }
            PathPattern::Reachability { source, label, target } => match pos {
                0 => PathPattern::Reachability {
                    source: attrs,
                    label: *label,
                    target: target.clone(),
                },
                1 => PathPattern::Reachability {
                    source: source.clone(),
                    label: *label,
                    target: attrs,
                },
                _ => panic!("reachability patterns have two positions"),
            },
        }
    }

    /// Length-`n` prefix of a simple pattern.
    pub fn prefix(&self, n: usize) -> Option<PathPattern> {
        match self {
            PathPattern::Simple { attr_sets, labels } if n <= labels.len() => {
                Some(PathPattern::Simple {
                    attr_sets: attr_sets[..=n].to_vec(),
                    labels: labels[..n].to_vec(),
                })
            }
            _ => None,
        }
    }

    pub fn hop(&self, i: usize) -> (LabelId, &AttrSet) {
        match self {
            PathPattern::Simple { attr_sets, labels } => (labels[i], &attr_sets[i + 1]),
            PathPattern::Reachability { .. } => panic!("hop() on reachability pattern"),
        }
    }

    /// Canonical text rendering using the graph's dictionaries.
    pub fn display<'a>(&'a self, graph: &'a PropertyGraph) -> PatternDisplay<'a> {
        PatternDisplay {
            pattern: self,
            labels: graph.labels(),
            attrs: graph.attributes(),
        }
    }

    /// Parses the canonical text form against existing dictionaries.
    pub fn parse(
        text: &str,
        labels: &Dictionary,
        attrs: &Dictionary,
    ) -> Result<PathPattern, PatternError> {
        let err = |msg: &str| PatternError::Parse(format!("{msg} in {text:?}"));
        let inner = text
            .strip_prefix('<')
            .and_then(|t| t.strip_suffix('>'))
            .ok_or_else(|| err("missing <...> delimiters"))?;

        let mut sets: Vec<AttrSet> = Vec::new();
        let mut hop_labels: Vec<(LabelId, bool)> = Vec::new();
        let mut rest = inner.trim();
        loop {
            let close = rest.find('}').ok_or_else(|| err("missing `}`"))?;
            let set_text = rest[..close]
                .strip_prefix('{')
                .ok_or_else(|| err("missing `{`"))?;
            let mut set = Vec::new();
            for name in set_text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let id = attrs
                    .id(name)
                    .ok_or_else(|| err(&format!("unknown attribute {name:?}")))?;
                set.push(id);
            }
            sets.push(attr_set(set));
            rest = rest[close + 1..].trim_start();
            if rest.is_empty() {
                break;
            }
            let arrow_end = rest.find("->").ok_or_else(|| err("missing `->`"))?;
            let label_text = rest[..arrow_end]
                .strip_prefix('-')
                .ok_or_else(|| err("missing `-` before label"))?;
            let (label_name, starred) = match label_text.strip_suffix('*') {
                Some(stripped) => (stripped, true),
                None => (label_text, false),
            };
            let id = labels
                .id(label_name)
                .ok_or_else(|| err(&format!("unknown label {label_name:?}")))?;
            hop_labels.push((id, starred));
            rest = rest[arrow_end + 2..].trim_start();
            if rest.is_empty() {
                return Err(err("dangling arrow"));
            }
        }

        let starred = hop_labels.iter().filter(|(_, s)| *s).count();
        if starred > 0 {
            if hop_labels.len() != 1 || sets.len() != 2 {
                return Err(err("starred label outside a two-position pattern"));
            }
            let target = sets.pop().unwrap();
            let source = sets.pop().unwrap();
            Ok(PathPattern::Reachability {
                source,
                label: hop_labels[0].0,
                target,
            })
        } else {
            if sets.len() != hop_labels.len() + 1 {
                return Err(err("position/label arity mismatch"));
            }
            Ok(PathPattern::Simple {
                attr_sets: sets,
                labels: hop_labels.into_iter().map(|(l, _)| l).collect(),
            })
        }
    }
}

fn union_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

pub struct PatternDisplay<'a> {
    pattern: &'a PathPattern,
    labels: &'a Dictionary,
    attrs: &'a Dictionary,
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |f: &mut fmt::Formatter<'_>, s: &AttrSet| -> fmt::Result {
            let mut names: Vec<&str> = s.iter().map(|&a| self.attrs.name(a)).collect();
            names.sort_unstable();
            write!(f, "{{{}}}", names.join(","))
        };
        write!(f, "<")?;
        match self.pattern {
            PathPattern::Simple { attr_sets, labels } => {
                set(f, &attr_sets[0])?;
                for (i, l) in labels.iter().enumerate() {
                    write!(f, " -{}-> ", self.labels.name(*l))?;
                    set(f, &attr_sets[i + 1])?;
                }
            }
            PathPattern::Reachability { source, label, target } => {
                set(f, source)?;
                write!(f, " -{}*-> ", self.labels.name(*label))?;
                set(f, target)?;
            }
        }
        write!(f, ">")
    }
}
