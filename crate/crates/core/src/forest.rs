//! Dynamic temporal forest without latencies.
//!
//! Holds the plain topology, a unit-weight dynamic forest over the vertices
//! (for roots, depths and lowest common ancestors), and two successor forests:
//! one over the labels and one over the negated labels. Upward earliest
//! arrival is a single level-ancestor query in the first; downward latest
//! departure is the same query in the second. The two remaining directions
//! binary-search the labels of the first edge, and general queries split at
//! the lowest common ancestor.

use std::collections::HashMap;

use crate::dynamic_forest::{DynamicForest, ForestCounters, NodeHandle};
use crate::error::{Error, Result};
use crate::instrument::{Counters, Snapshot};
use crate::model::{ForestTopology, Label, TimeValue, Update, VertexId};
use crate::successor::SuccessorForest;

/// Selects one of the two successor forests of a structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Twin {
    /// Labels as given.
    Forward,
    /// Labels mirrored in time.
    Mirror,
}

/// Unit-weight dynamic forest over the non-isolated vertices.
///
/// Isolated vertices have no node; one is created on the first link and
/// dropped again when a cut isolates the vertex.
#[derive(Clone, Debug, Default)]
pub(crate) struct Backbone {
    df: DynamicForest,
    handles: HashMap<VertexId, NodeHandle>,
}

/// Position of two vertices relative to their lowest common ancestor `w`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Relation {
    /// Edges from `u` up to `w`.
    pub up: u64,
    /// Edges from `w` down to `v`.
    pub down: u64,
}

impl Backbone {
    fn handle(&mut self, v: VertexId) -> NodeHandle {
        let df = &mut self.df;
        *self.handles.entry(v).or_insert_with(|| df.add_node())
    }

    pub fn link(&mut self, child: VertexId, parent: VertexId) {
        let c = self.handle(child);
        let p = self.handle(parent);
        self.df.link(c, p, 1).expect("checked against the topology");
    }

    pub fn cut(&mut self, child: VertexId, parent: VertexId) {
        let c = self.handles[&child];
        self.df.cut(c).expect("checked against the topology");
        for v in [child, parent] {
            let h = self.handles[&v];
            if self.df.edge(h).expect("live").is_none() && self.df.child_count(h) == Ok(0) {
                self.df.remove_node(h).expect("isolated");
                self.handles.remove(&v);
            }
        }
    }

    /// `None` when `u` and `v` are distinct vertices of different trees.
    pub fn relation(&mut self, u: VertexId, v: VertexId) -> Option<Relation> {
        if u == v {
            return Some(Relation { up: 0, down: 0 });
        }
        let (&a, &b) = (self.handles.get(&u)?, self.handles.get(&v)?);
        let w = self.df.lca(a, b).expect("live")?;
        let dw = self.df.weighted_depth(w).expect("live");
        let up = self.df.weighted_depth(a).expect("live") - dw;
        let down = self.df.weighted_depth(b).expect("live") - dw;
        Some(Relation { up, down })
    }

    pub fn counters(&self) -> ForestCounters {
        self.df.counters()
    }

    pub fn node_count(&self) -> usize {
        self.df.len()
    }
}

/// Queries towards an ancestor, answered by one successor forest.
pub(crate) trait Upward {
    /// Earliest arrival at the ancestor `hops >= 1` edges above `u`.
    fn up_ea(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue;
    /// Latest departure from `u` towards the ancestor `hops >= 1` edges above.
    fn up_ld(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue;
}

impl Upward for SuccessorForest {
    fn up_ea(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue {
        SuccessorForest::up_ea(self, u, hops, t)
    }
    fn up_ld(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue {
        SuccessorForest::up_ld(self, u, hops, t)
    }
}

/// Earliest arrival from `w` down to `v`, `hops` edges below.
fn down_ea(mir: &mut impl Upward, v: VertexId, hops: u64, t: TimeValue) -> TimeValue {
    -mir.up_ld(v, hops, -t)
}

/// Latest departure from `w` down to `v`, `hops` edges below.
fn down_ld(mir: &mut impl Upward, v: VertexId, hops: u64, t: TimeValue) -> TimeValue {
    -mir.up_ea(v, hops, -t)
}

pub(crate) fn compose_ea<U: Upward>(
    bb: &mut Backbone,
    fwd: &mut U,
    mir: &mut U,
    u: VertexId,
    v: VertexId,
    t: TimeValue,
) -> TimeValue {
    let Some(r) = bb.relation(u, v) else {
        return TimeValue::PosInf;
    };
    let mid = if r.up == 0 { t } else { fwd.up_ea(u, r.up, t) };
    if r.down == 0 || mid == TimeValue::PosInf {
        return mid;
    }
    down_ea(mir, v, r.down, mid)
}

pub(crate) fn compose_ld<U: Upward>(
    bb: &mut Backbone,
    fwd: &mut U,
    mir: &mut U,
    u: VertexId,
    v: VertexId,
    t: TimeValue,
) -> TimeValue {
    let Some(r) = bb.relation(u, v) else {
        return TimeValue::NegInf;
    };
    let mid = if r.down == 0 { t } else { down_ld(mir, v, r.down, t) };
    if r.up == 0 || mid == TimeValue::NegInf {
        return mid;
    }
    fwd.up_ld(u, r.up, mid)
}

pub(crate) fn compose_reach<U: Upward>(
    bb: &mut Backbone,
    fwd: &mut U,
    mir: &mut U,
    u: VertexId,
    v: VertexId,
    td: TimeValue,
    ta: TimeValue,
) -> bool {
    if u == v {
        return td <= ta;
    }
    let Some(r) = bb.relation(u, v) else {
        return false;
    };
    let a = if r.up == 0 { td } else { fwd.up_ea(u, r.up, td) };
    let b = if r.down == 0 { ta } else { down_ld(mir, v, r.down, ta) };
    // A non-trivial side with no journey at all rules the query out even when
    // the other side is an infinity that would compare favourably.
    if (r.up > 0 && a == TimeValue::PosInf) || (r.down > 0 && b == TimeValue::NegInf) {
        return false;
    }
    a <= b
}

#[derive(Clone, Debug, Default)]
pub struct TemporalForest {
    topo: ForestTopology,
    backbone: Backbone,
    fwd: SuccessorForest,
    mir: SuccessorForest,
}

impl TemporalForest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the structure by replaying `topo` as links and label additions.
    pub fn from_topology(topo: &ForestTopology) -> Result<Self> {
        let mut f = TemporalForest::new();
        for u in replay(topo) {
            f.apply(&u)?;
        }
        Ok(f)
    }

    pub fn topology(&self) -> &ForestTopology {
        &self.topo
    }

    fn twin(&self, t: Twin) -> &SuccessorForest {
        match t {
            Twin::Forward => &self.fwd,
            Twin::Mirror => &self.mir,
        }
    }

    fn instant(label: &Label) -> Result<i64> {
        if label.dep != label.arr {
            return Err(Error::LatencyUnsupported);
        }
        Ok(label.dep)
    }

    /// Applies one update; a rejected update changes nothing.
    pub fn apply(&mut self, update: &Update) -> Result<()> {
        self.topo.check(update)?;
        match update {
            Update::AddVertex(_) | Update::DeleteVertex(_) => self.topo.apply_unchecked(update),
            Update::Link { child, parent, label } => {
                let l = Self::instant(label)?;
                self.topo.apply_unchecked(update);
                self.backbone.link(*child, *parent);
                self.fwd.add_label(&self.topo, *child, l);
                self.mir.add_label(&self.topo, *child, -l);
            }
            Update::Cut(v) => {
                let label = *self.topo.labels(*v).first().expect("checked: one label");
                let parent = self.topo.parent(*v).expect("checked: has parent");
                self.fwd.delete_label(&self.topo, *v, label.dep);
                self.mir.delete_label(&self.topo, *v, -label.dep);
                self.topo.apply_unchecked(update);
                self.backbone.cut(*v, parent);
            }
            Update::AddLabel(v, label) => {
                let l = Self::instant(label)?;
                self.topo.apply_unchecked(update);
                self.fwd.add_label(&self.topo, *v, l);
                self.mir.add_label(&self.topo, *v, -l);
            }
            Update::DeleteLabel(v, label) => {
                let l = Self::instant(label)?;
                self.topo.apply_unchecked(update);
                self.fwd.delete_label(&self.topo, *v, l);
                self.mir.delete_label(&self.topo, *v, -l);
            }
        }
        Ok(())
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<()> {
        self.apply(&Update::AddVertex(v))
    }

    pub fn delete_vertex(&mut self, v: VertexId) -> Result<()> {
        self.apply(&Update::DeleteVertex(v))
    }

    /// Makes root `child` a child of `parent` with a single label on the new edge.
    pub fn link(&mut self, child: VertexId, parent: VertexId, label: i64) -> Result<()> {
        self.apply(&Update::Link {
            child,
            parent,
            label: Label::instant(label)?,
        })
    }

    pub fn cut(&mut self, v: VertexId) -> Result<()> {
        self.apply(&Update::Cut(v))
    }

    pub fn add_label(&mut self, v: VertexId, label: i64) -> Result<()> {
        self.apply(&Update::AddLabel(v, Label::instant(label)?))
    }

    pub fn delete_label(&mut self, v: VertexId, label: i64) -> Result<()> {
        self.apply(&Update::DeleteLabel(v, Label::instant(label)?))
    }

    fn known(&self, v: VertexId) -> Result<()> {
        if self.topo.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Earliest arrival at `v` departing `u` no earlier than `t`.
    pub fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        self.known(u)?;
        self.known(v)?;
        Ok(compose_ea(&mut self.backbone, &mut self.fwd, &mut self.mir, u, v, t))
    }

    /// Latest departure from `u` arriving at `v` no later than `t`.
    pub fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        self.known(u)?;
        self.known(v)?;
        Ok(compose_ld(&mut self.backbone, &mut self.fwd, &mut self.mir, u, v, t))
    }

    /// Whether a journey departs `u` no earlier than `td` and reaches `v` no later than `ta`.
    pub fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        self.known(u)?;
        self.known(v)?;
        Ok(compose_reach(
            &mut self.backbone,
            &mut self.fwd,
            &mut self.mir,
            u,
            v,
            td,
            ta,
        ))
    }

    fn check_label(&self, v: VertexId, label: i64) -> Result<()> {
        self.known(v)?;
        let l = Label::instant(label)?;
        if !self.topo.labels(v).contains(&l) {
            return Err(Error::MissingLabel(v, l));
        }
        Ok(())
    }

    /// Parent of the node for `label` above `v` in the forward successor
    /// forest, by definition: `(label, vertex, weight)`.
    pub fn sigma(&self, v: VertexId, label: i64) -> Result<Option<(i64, VertexId, u32)>> {
        self.check_label(v, label)?;
        Ok(self.fwd.sigma(&self.topo, v, label))
    }

    /// Recomputes the parent of the node for `label` above `v` in both twins.
    pub fn fix_parent(&mut self, v: VertexId, label: i64) -> Result<()> {
        self.check_label(v, label)?;
        self.fwd.fix_parent(&self.topo, v, label);
        self.mir.fix_parent(&self.topo, v, -label);
        Ok(())
    }

    pub fn counters(&self, twin: Twin) -> Counters {
        self.twin(twin).counters()
    }

    /// Primitive and rotation counts of the vertex-level dynamic forest.
    pub fn backbone_counters(&self) -> ForestCounters {
        self.backbone.counters()
    }

    /// Vertices currently stored in the vertex-level dynamic forest.
    pub fn backbone_size(&self) -> usize {
        self.backbone.node_count()
    }

    pub fn snapshot(&self, twin: Twin) -> Snapshot {
        self.twin(twin).snapshot()
    }

    #[cfg(test)]
    pub(crate) fn corrupt_detach(&mut self, v: VertexId, label: i64) {
        self.fwd.corrupt_detach(v, label);
    }
}

/// Updates that rebuild `topo` from nothing: vertices, then each edge as a
/// link with its smallest label followed by the remaining labels, parents
/// before children.
pub fn replay(topo: &ForestTopology) -> Vec<Update> {
    let mut out: Vec<Update> = topo.vertices().map(Update::AddVertex).collect();
    let mut order: Vec<VertexId> = topo.vertices().filter(|&v| !topo.is_root(v)).collect();
    order.sort_by_key(|&v| (topo.depth(v), v));
    for v in order {
        let parent = topo.parent(v).expect("non-root");
        let mut labels = topo.labels(v).iter();
        let first = *labels.next().expect("non-root edges carry labels");
        out.push(Update::Link {
            child: v,
            parent,
            label: first,
        });
        out.extend(labels.map(|l| Update::AddLabel(v, *l)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use TimeValue::{Finite, NegInf, PosInf};

    const R: VertexId = VertexId(0);
    const A: VertexId = VertexId(1);
    const B: VertexId = VertexId(2);
    const C: VertexId = VertexId(3);

    /// Root r; children a, b; c below a.
    fn t1() -> TemporalForest {
        let mut f = TemporalForest::new();
        for v in [R, A, B, C] {
            f.add_vertex(v).unwrap();
        }
        f.link(A, R, 3).unwrap();
        f.add_label(A, 7).unwrap();
        f.link(B, R, 5).unwrap();
        f.link(C, A, 2).unwrap();
        f.add_label(C, 6).unwrap();
        f
    }

    fn assert_consistent(f: &TemporalForest) {
        for (twin, mirrored) in [(Twin::Forward, false), (Twin::Mirror, true)] {
            let labels = oracle::label_map(f.topology(), mirrored);
            let report = oracle::validate(f.topology(), &labels, &f.snapshot(twin));
            assert!(report.is_empty(), "{twin:?}: {report:?}");
        }
    }

    #[test]
    fn sigma_cases() {
        let f = t1();
        assert_consistent(&f);
        assert_eq!(f.sigma(C, 2).unwrap(), Some((3, A, 1)));
        assert_eq!(f.sigma(A, 3).unwrap(), Some((5, B, 0)));
        assert_eq!(f.sigma(A, 7).unwrap(), None);
        assert!(f.sigma(C, 4).is_err());
    }

    #[test]
    fn queries() {
        let mut f = t1();
        assert_eq!(f.ea(C, R, Finite(0)).unwrap(), Finite(3));
        assert_eq!(f.ea(C, R, Finite(4)).unwrap(), Finite(7));
        assert_eq!(f.ea(C, B, Finite(0)).unwrap(), Finite(5));
        assert_eq!(f.ld(C, R, Finite(7)).unwrap(), Finite(6));
        assert_eq!(f.ld(C, R, Finite(2)).unwrap(), NegInf);
        assert_eq!(f.ld(A, A, Finite(9)).unwrap(), Finite(9));
        assert!(f.reach(C, B, Finite(0), Finite(5)).unwrap());
        assert!(!f.reach(C, B, Finite(0), Finite(4)).unwrap());
        assert!(f.ea(C, VertexId(9), Finite(0)).is_err());
    }

    #[test]
    fn label_updates() {
        let mut f = t1();
        let before = (f.snapshot(Twin::Forward), f.snapshot(Twin::Mirror));
        f.add_label(C, 4).unwrap();
        assert_eq!(f.sigma(C, 4).unwrap(), Some((6, C, 0)));
        assert_consistent(&f);
        f.delete_label(C, 4).unwrap();
        assert_eq!((f.snapshot(Twin::Forward), f.snapshot(Twin::Mirror)), before);
        assert_eq!(f.delete_label(B, 5), Err(Error::LastLabelRequiresCut(B)));
        assert_eq!(
            f.add_label(A, 3),
            Err(Error::DuplicateLabel(A, Label::instant(3).unwrap()))
        );
        assert_eq!(f.add_label(R, 1), Err(Error::NotAnEdge(R)));
        assert_eq!(
            f.apply(&Update::AddLabel(C, Label::new(1, 2).unwrap())),
            Err(Error::LatencyUnsupported)
        );
        assert_eq!((f.snapshot(Twin::Forward), f.snapshot(Twin::Mirror)), before);
    }

    #[test]
    fn fix_parent_counts_and_repairs() {
        let mut f = t1();
        f.corrupt_detach(C, 2);
        let labels = oracle::label_map(f.topology(), false);
        assert_eq!(
            oracle::validate(f.topology(), &labels, &f.snapshot(Twin::Forward)).len(),
            1
        );
        let calls = f.counters(Twin::Forward).fix_parent;
        f.fix_parent(C, 2).unwrap();
        assert_eq!(f.counters(Twin::Forward).fix_parent, calls + 1);
        assert_consistent(&f);
    }

    #[test]
    fn link_and_cut() {
        let mut f = TemporalForest::new();
        let (x, y, z) = (VertexId(10), VertexId(11), VertexId(12));
        for v in [x, y, z] {
            f.add_vertex(v).unwrap();
        }
        assert_eq!(f.backbone_size(), 0);
        assert_eq!(f.ea(x, x, Finite(4)).unwrap(), Finite(4));
        assert_eq!(f.ea(x, y, Finite(0)).unwrap(), PosInf);
        f.link(x, y, 1).unwrap();
        for t in [NegInf, Finite(0), Finite(1)] {
            assert_eq!(f.ea(x, y, t).unwrap(), Finite(1));
            assert_eq!(f.ea(y, x, t).unwrap(), Finite(1));
        }
        assert_eq!(f.ea(x, y, Finite(2)).unwrap(), PosInf);
        assert_eq!(f.link(y, x, 4), Err(Error::SameTree(y, x)));
        assert_eq!(f.link(x, z, 4), Err(Error::NotARoot(x)));
        f.link(z, x, 3).unwrap();
        assert!(!f.reach(z, y, Finite(0), Finite(9)).unwrap());
        f.add_label(x, 5).unwrap();
        assert!(f.reach(z, y, Finite(0), Finite(9)).unwrap());
        assert_eq!(f.cut(x), Err(Error::MultiLabelCut(x, 2)));
        f.delete_label(x, 1).unwrap();
        f.cut(x).unwrap();
        assert!(!f.reach(z, y, NegInf, PosInf).unwrap());
        assert_eq!(f.backbone_size(), 2);
        assert_eq!(f.delete_vertex(z), Err(Error::NotIsolated(z)));
        f.cut(z).unwrap();
        assert_eq!(f.backbone_size(), 0);
        f.delete_vertex(z).unwrap();
        assert_consistent(&f);
    }

    #[test]
    fn replay_rebuilds() {
        let f = t1();
        let g = TemporalForest::from_topology(f.topology()).unwrap();
        assert_eq!(g.topology(), f.topology());
        assert_eq!(g.snapshot(Twin::Forward), f.snapshot(Twin::Forward));
        assert_eq!(g.snapshot(Twin::Mirror), f.snapshot(Twin::Mirror));
    }
}
