//! Shared vocabulary: extended-integer times, labels, vertex ids, the plain
//! forest representation and the update type every engine consumes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// An integer time extended with the two infinities.
///
/// The derived order relies on the variant order: `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeValue {
    NegInf,
    Finite(i64),
    PosInf,
}

/// Negation: `±inf` swap, finite values flip sign.
///
/// `Finite(i64::MIN)` has no finite negation and saturates to `PosInf`.
/// Labels never take that value (see [`Label::new`]), so for queries the
/// saturated result is indistinguishable from the exact one.
impl std::ops::Neg for TimeValue {
    type Output = TimeValue;
    fn neg(self) -> TimeValue {
        match self {
            TimeValue::NegInf => TimeValue::PosInf,
            TimeValue::PosInf => TimeValue::NegInf,
            TimeValue::Finite(x) => match x.checked_neg() {
                Some(y) => TimeValue::Finite(y),
                None => TimeValue::PosInf,
            },
        }
    }
}

impl TimeValue {
    pub fn finite(self) -> Option<i64> {
        match self {
            TimeValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, TimeValue::Finite(_))
    }

    /// Compares against a finite integer without constructing a `TimeValue`.
    pub fn cmp_int(self, x: i64) -> Ordering {
        match self {
            TimeValue::NegInf => Ordering::Less,
            TimeValue::PosInf => Ordering::Greater,
            TimeValue::Finite(y) => y.cmp(&x),
        }
    }

    /// `x >= self`, i.e. `x` is not before this time.
    pub fn le_int(self, x: i64) -> bool {
        self.cmp_int(x) != Ordering::Greater
    }

    /// `x <= self`.
    pub fn ge_int(self, x: i64) -> bool {
        self.cmp_int(x) != Ordering::Less
    }
}

impl From<i64> for TimeValue {
    fn from(x: i64) -> Self {
        TimeValue::Finite(x)
    }
}

impl fmt::Display for TimeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeValue::NegInf => f.write_str("-inf"),
            TimeValue::PosInf => f.write_str("+inf"),
            TimeValue::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl std::str::FromStr for TimeValue {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "+inf" | "inf" => Ok(TimeValue::PosInf),
            "-inf" => Ok(TimeValue::NegInf),
            _ => s
                .parse::<i64>()
                .map(TimeValue::Finite)
                .map_err(|_| format!("invalid time `{s}`")),
        }
    }
}

/// A time label: depart at `dep`, arrive at `arr >= dep`.
///
/// Latency-free labels have `arr == dep`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub dep: i64,
    pub arr: i64,
}

impl Label {
    pub fn new(dep: i64, arr: i64) -> Result<Label> {
        if dep == i64::MIN || arr == i64::MIN {
            return Err(Error::LabelOutOfRange(dep.min(arr)));
        }
        if arr < dep {
            return Err(Error::NegativeLatency { dep, arr });
        }
        Ok(Label { dep, arr })
    }

    pub fn instant(t: i64) -> Result<Label> {
        Label::new(t, t)
    }

    pub fn latency(&self) -> i64 {
        self.arr - self.dep
    }

    /// The label as seen in the time-reversed forest: `(dep, arr) -> (-arr, -dep)`.
    pub fn mirrored(&self) -> Label {
        Label {
            dep: -self.arr,
            arr: -self.dep,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dep == self.arr {
            write!(f, "{}", self.dep)
        } else {
            write!(f, "({}, {})", self.dep, self.arr)
        }
    }
}

/// Vertex identifier. Numeric order is the tie-breaking order on vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One update of a temporal forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Update {
    AddVertex(VertexId),
    DeleteVertex(VertexId),
    /// Make root `child` a child of `parent` through an edge with a single label.
    Link {
        child: VertexId,
        parent: VertexId,
        label: Label,
    },
    /// Remove the edge above `child`; it must carry exactly one label.
    Cut(VertexId),
    AddLabel(VertexId, Label),
    DeleteLabel(VertexId, Label),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct VertexEntry {
    parent: Option<VertexId>,
    children: BTreeSet<VertexId>,
    /// Labels of the edge to `parent`; empty for roots.
    labels: BTreeSet<Label>,
}

/// Read access to a rooted parent map.
pub trait TreeShape {
    fn parent_of(&self, v: VertexId) -> Option<VertexId>;
}

impl TreeShape for ForestTopology {
    fn parent_of(&self, v: VertexId) -> Option<VertexId> {
        self.parent(v)
    }
}

/// The plain mutable forest: vertex set, parent map and per-edge label sets.
///
/// Edges are identified by their child vertex. This is the ground truth the
/// oracle reads, and every engine keeps one alongside its indexes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForestTopology {
    vertices: BTreeMap<VertexId, VertexEntry>,
    label_count: usize,
}

impl ForestTopology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Total number of labels over all edges.
    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    fn entry(&self, v: VertexId) -> Result<&VertexEntry> {
        self.vertices.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.vertices.get(&v).and_then(|e| e.parent)
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        self.parent(v).is_none()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.vertices.get(&v).is_none_or(|e| e.children.is_empty())
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .get(&v)
            .into_iter()
            .flat_map(|e| e.children.iter().copied())
    }

    /// Labels of the edge `e_v`; empty for roots and unknown vertices.
    pub fn labels(&self, v: VertexId) -> &BTreeSet<Label> {
        static EMPTY: BTreeSet<Label> = BTreeSet::new();
        self.vertices.get(&v).map_or(&EMPTY, |e| &e.labels)
    }

    pub fn root_of(&self, mut v: VertexId) -> VertexId {
        while let Some(p) = self.parent(v) {
            v = p;
        }
        v
    }

    pub fn depth(&self, mut v: VertexId) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(v) {
            v = p;
            d += 1;
        }
        d
    }

    pub fn is_isolated(&self, v: VertexId) -> bool {
        self.vertices
            .get(&v)
            .is_some_and(|e| e.parent.is_none() && e.children.is_empty())
    }

    /// Lowest common ancestor by parent-pointer walks; `None` across trees.
    pub fn lca(&self, u: VertexId, v: VertexId) -> Option<VertexId> {
        let (mut a, mut b) = (u, v);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            a = self.parent(a)?;
            da -= 1;
        }
        while db > da {
            b = self.parent(b)?;
            db -= 1;
        }
        while a != b {
            a = self.parent(a)?;
            b = self.parent(b)?;
        }
        Some(a)
    }

    /// Edges (as child vertices) of the unique `u`–`v` path, in travel order,
    /// or `None` when the vertices lie in different trees.
    pub fn path_edges(&self, u: VertexId, v: VertexId) -> Option<Vec<VertexId>> {
        let w = self.lca(u, v)?;
        let mut up = Vec::new();
        let mut x = u;
        while x != w {
            up.push(x);
            x = self.parent(x)?;
        }
        let mut down = Vec::new();
        let mut y = v;
        while y != w {
            down.push(y);
            y = self.parent(y)?;
        }
        up.extend(down.into_iter().rev());
        Some(up)
    }

    /// Checks the precondition of `update` without changing anything.
    pub fn check(&self, update: &Update) -> Result<()> {
        match *update {
            Update::AddVertex(v) => {
                if self.contains(v) {
                    return Err(Error::DuplicateVertex(v));
                }
                if v.0 == u32::MAX {
                    return Err(Error::ReservedVertex(v));
                }
            }
            Update::DeleteVertex(v) => {
                self.entry(v)?;
                if !self.is_isolated(v) {
                    return Err(Error::NotIsolated(v));
                }
            }
            Update::Link {
                child,
                parent,
                label: _,
            } => {
                self.entry(child)?;
                self.entry(parent)?;
                if !self.is_root(child) {
                    return Err(Error::NotARoot(child));
                }
                if self.root_of(parent) == child {
                    return Err(Error::SameTree(child, parent));
                }
            }
            Update::Cut(v) => {
                let e = self.entry(v)?;
                if e.parent.is_none() {
                    return Err(Error::NotAnEdge(v));
                }
                if e.labels.len() != 1 {
                    return Err(Error::MultiLabelCut(v, e.labels.len()));
                }
            }
            Update::AddLabel(v, label) => {
                let e = self.entry(v)?;
                if e.parent.is_none() {
                    return Err(Error::NotAnEdge(v));
                }
                if e.labels.contains(&label) {
                    return Err(Error::DuplicateLabel(v, label));
                }
            }
            Update::DeleteLabel(v, label) => {
                let e = self.entry(v)?;
                if e.parent.is_none() {
                    return Err(Error::NotAnEdge(v));
                }
                if !e.labels.contains(&label) {
                    return Err(Error::MissingLabel(v, label));
                }
                if e.labels.len() < 2 {
                    return Err(Error::LastLabelRequiresCut(v));
                }
            }
        }
        Ok(())
    }

    /// Applies `update` after checking its precondition. A rejected update
    /// leaves the topology unchanged.
    pub fn apply(&mut self, update: &Update) -> Result<()> {
        self.check(update)?;
        self.apply_unchecked(update);
        Ok(())
    }

    /// Applies an update whose precondition the caller has already verified.
    pub(crate) fn apply_unchecked(&mut self, update: &Update) {
        match *update {
            Update::AddVertex(v) => {
                self.vertices.insert(v, VertexEntry::default());
            }
            Update::DeleteVertex(v) => {
                self.vertices.remove(&v);
            }
            Update::Link { child, parent, label } => {
                self.set_parent(child, Some(parent));
                self.insert_label(child, label);
            }
            Update::Cut(v) => {
                let e = self.vertices.get_mut(&v).expect("checked");
                self.label_count -= e.labels.len();
                e.labels.clear();
                self.set_parent(v, None);
            }
            Update::AddLabel(v, label) => self.insert_label(v, label),
            Update::DeleteLabel(v, label) => {
                let removed = self.vertices.get_mut(&v).expect("checked").labels.remove(&label);
                debug_assert!(removed);
                self.label_count -= 1;
            }
        }
    }

    fn insert_label(&mut self, v: VertexId, label: Label) {
        let inserted = self.vertices.get_mut(&v).expect("checked").labels.insert(label);
        debug_assert!(inserted);
        self.label_count += 1;
    }

    fn set_parent(&mut self, v: VertexId, parent: Option<VertexId>) {
        let old = std::mem::replace(&mut self.vertices.get_mut(&v).expect("checked").parent, parent);
        if let Some(p) = old {
            self.vertices.get_mut(&p).expect("parent").children.remove(&v);
        }
        if let Some(p) = parent {
            self.vertices.get_mut(&p).expect("parent").children.insert(v);
        }
    }

    /// Full structural walk: acyclic parent map, consistent child sets, and a
    /// non-empty label set exactly on non-root vertices.
    pub fn validate(&self) -> Result<()> {
        let mut count = 0;
        for (&v, e) in &self.vertices {
            count += e.labels.len();
            match e.parent {
                Some(p) => {
                    let pe = self
                        .entry(p)
                        .map_err(|_| Error::Corrupt(format!("{v} has unknown parent {p}")))?;
                    if !pe.children.contains(&v) {
                        return Err(Error::Corrupt(format!("{p} does not list child {v}")));
                    }
                    if e.labels.is_empty() {
                        return Err(Error::Corrupt(format!("edge above {v} has no labels")));
                    }
                }
                None => {
                    if !e.labels.is_empty() {
                        return Err(Error::Corrupt(format!("root {v} carries labels")));
                    }
                }
            }
            for &c in &e.children {
                if self.parent(c) != Some(v) {
                    return Err(Error::Corrupt(format!("{c} listed as child of {v}")));
                }
            }
            // Cycle check: the walk upward must terminate within |V| steps.
            let mut x = v;
            for _ in 0..=self.vertices.len() {
                match self.parent(x) {
                    Some(p) => x = p,
                    None => break,
                }
            }
            if self.parent(x).is_some() {
                return Err(Error::Corrupt(format!("cycle through {v}")));
            }
        }
        if count != self.label_count {
            return Err(Error::Corrupt("label count out of sync".into()));
        }
        Ok(())
    }

    /// The same forest with every label mirrored in time.
    pub fn mirrored(&self) -> ForestTopology {
        let mut out = self.clone();
        for e in out.vertices.values_mut() {
            e.labels = e.labels.iter().map(Label::mirrored).collect();
        }
        out
    }

    /// Builds a topology from `(child, parent, labels)` triples plus isolated vertices.
    pub fn from_edges(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Vec<Label>)>,
    ) -> Result<ForestTopology> {
        let mut t = ForestTopology::new();
        for v in vertices {
            t.apply(&Update::AddVertex(v))?;
        }
        for (c, p, labels) in edges {
            let mut it = labels.into_iter();
            let first = it.next().ok_or(Error::LastLabelRequiresCut(c))?;
            t.apply(&Update::Link {
                child: c,
                parent: p,
                label: first,
            })?;
            for l in it {
                t.apply(&Update::AddLabel(c, l))?;
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    fn l(x: i64) -> Label {
        Label::instant(x).unwrap()
    }

    /// Path v0 - v1 - v2 - v3 - v4 with the edge above v_i labelled.
    fn sample_path() -> ForestTopology {
        ForestTopology::from_edges(
            (0..5).map(v),
            vec![
                (v(0), v(1), vec![l(1), l(4)]),
                (v(1), v(2), vec![l(2), l(6)]),
                (v(2), v(3), vec![l(3)]),
                (v(3), v(4), vec![l(4), l(6)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn negation() {
        assert_eq!(-TimeValue::Finite(7), TimeValue::Finite(-7));
        assert_eq!(-TimeValue::PosInf, TimeValue::NegInf);
        assert_eq!(-(-TimeValue::NegInf), TimeValue::NegInf);
        assert_eq!(-TimeValue::Finite(i64::MIN), TimeValue::PosInf);
    }

    #[test]
    fn order_of_sentinels() {
        assert!(TimeValue::NegInf < TimeValue::Finite(i64::MIN));
        assert!(TimeValue::Finite(i64::MAX) < TimeValue::PosInf);
        assert!(TimeValue::Finite(-3) < TimeValue::Finite(2));
    }

    #[test]
    fn time_tokens_round_trip() {
        for s in ["-inf", "+inf", "0", "-17", "9223372036854775807"] {
            let t: TimeValue = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("12x".parse::<TimeValue>().is_err());
    }

    #[test]
    fn labels_reject_negative_latency() {
        assert!(matches!(Label::new(5, 4), Err(Error::NegativeLatency { .. })));
        assert!(Label::new(i64::MIN, 0).is_err());
        assert_eq!(Label::new(2, 5).unwrap().mirrored(), Label::new(-5, -2).unwrap());
    }

    #[test]
    fn add_label_to_edge() {
        let mut t = sample_path();
        t.apply(&Update::AddLabel(v(3), l(5))).unwrap();
        assert!(t.labels(v(3)).contains(&l(5)));
        t.validate().unwrap();
    }

    #[test]
    fn last_label_requires_cut() {
        let mut t = sample_path();
        let before = t.clone();
        let err = t.apply(&Update::DeleteLabel(v(2), l(3))).unwrap_err();
        assert!(matches!(err, Error::LastLabelRequiresCut(_)));
        assert!(err.to_string().contains("last label requires cut"));
        assert_eq!(t, before);
    }

    #[test]
    fn duplicate_label_rejected() {
        let mut t = sample_path();
        let before = t.clone();
        let err = t.apply(&Update::AddLabel(v(0), l(4))).unwrap_err();
        assert!(err.to_string().contains("duplicate label"));
        assert_eq!(t, before);
    }

    #[test]
    fn link_and_cut_preconditions() {
        let mut t = sample_path();
        // v4 is the root; linking it below its own descendant would close a cycle.
        assert!(matches!(
            t.apply(&Update::Link {
                child: v(4),
                parent: v(0),
                label: l(0)
            }),
            Err(Error::SameTree(..))
        ));
        assert!(matches!(
            t.apply(&Update::Link {
                child: v(1),
                parent: v(4),
                label: l(0)
            }),
            Err(Error::NotARoot(_))
        ));
        assert!(matches!(t.apply(&Update::Cut(v(0))), Err(Error::MultiLabelCut(..))));
        t.apply(&Update::Cut(v(2))).unwrap();
        assert!(t.is_root(v(2)));
        assert_eq!(t.lca(v(0), v(4)), None);
        t.validate().unwrap();
        t.apply(&Update::AddVertex(v(9))).unwrap();
        t.apply(&Update::Link {
            child: v(9),
            parent: v(0),
            label: l(3),
        })
        .unwrap();
        assert_eq!(t.root_of(v(9)), v(2));
        assert!(matches!(
            t.apply(&Update::DeleteVertex(v(9))),
            Err(Error::NotIsolated(_))
        ));
        t.validate().unwrap();
    }

    #[test]
    fn path_edges_follow_travel_order() {
        let t = ForestTopology::from_edges(
            (0..4).map(v),
            vec![
                (v(1), v(0), vec![l(1)]),
                (v(2), v(0), vec![l(1)]),
                (v(3), v(1), vec![l(1)]),
            ],
        )
        .unwrap();
        assert_eq!(t.path_edges(v(3), v(2)).unwrap(), vec![v(3), v(1), v(2)]);
        assert_eq!(t.path_edges(v(0), v(3)).unwrap(), vec![v(1), v(3)]);
        assert_eq!(t.path_edges(v(2), v(2)).unwrap(), Vec::<VertexId>::new());
    }
}
