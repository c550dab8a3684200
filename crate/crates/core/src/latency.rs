//! Dynamic temporal forest whose labels are `(departure, arrival)` pairs.
//!
//! Nodes are `(α, ℓ, u)` for a pair `(ℓ, α)` on the edge above `u`; a block
//! is ordered by arrival, then departure, then vertex. The blue candidate of
//! a node is its next hop: the pair above `p(u)` departing no earlier than
//! `α` with the smallest arrival, ties going to the largest departure. The
//! red candidate (the strict block successor) wins when its arrival is no
//! later than the next hop's departure.
//!
//! Inserting a pair can make it the next hop of a whole run of nodes in the
//! block below. All of them but the last end up red, so only the heads of
//! the run (block nodes that are roots or hang by a blue edge) need a new
//! parent; each block keeps its heads in an ordered index for this.
//! Deletion walks the run back from its last node, jumping directly to each
//! node that becomes a head.

use std::collections::{BTreeMap, HashMap};

use crate::dynamic_forest::{DynamicForest, ForestCounters, NodeHandle};
use crate::error::{Error, Result};
use crate::forest::{compose_ea, compose_ld, compose_reach, replay, Backbone, Twin, Upward};
use crate::instrument::{Counters, NodeKey, NodeState, Snapshot};
use crate::model::{ForestTopology, Label, TimeValue, TreeShape, Update, VertexId};
use crate::ordered_index::{PairIndex, Treap};

/// `(arrival, departure, vertex)`.
type Key = (i64, i64, VertexId);

fn node_key(k: Key) -> NodeKey {
    NodeKey {
        arrival: k.0,
        departure: k.1,
        vertex: k.2,
    }
}

/// Pairs with arrival at most `arr`, as a strict bound.
fn through(arr: i64) -> TimeValue {
    arr.checked_add(1).map_or(TimeValue::PosInf, TimeValue::Finite)
}

#[derive(Clone, Debug, Default)]
struct LatencySuccessor {
    df: DynamicForest,
    pairs: HashMap<VertexId, PairIndex<NodeHandle>>,
    blocks: HashMap<VertexId, Treap<Key, NodeHandle>>,
    heads: HashMap<VertexId, Treap<Key, ()>>,
    keys: Vec<Option<Key>>,
    fix_parent: u64,
    rewires: u64,
}

impl LatencySuccessor {
    fn counters(&self) -> Counters {
        Counters {
            fix_parent: self.fix_parent,
            rewires: self.rewires,
            primitives: self.df.counters().primitives,
        }
    }

    fn node(&self, u: VertexId, dep: i64, arr: i64) -> NodeHandle {
        self.pairs
            .get(&u)
            .and_then(|p| p.get(dep, arr))
            .unwrap_or_else(|| panic!("no successor node for ({dep}, {arr}) above {u}"))
    }

    fn key(&self, h: NodeHandle) -> Key {
        self.keys[h.index() as usize].expect("live node")
    }

    /// Best pair above `v` departing no earlier than `arrival`.
    fn next_hop(&self, v: VertexId, arrival: i64) -> Option<(Key, NodeHandle)> {
        let (dep, arr, h) = self.pairs.get(&v)?.min_arrival(TimeValue::Finite(arrival))?;
        Some(((arr, dep, v), h))
    }

    fn sigma_handle(&self, shape: &impl TreeShape, k: Key) -> Option<(NodeHandle, u32)> {
        let v = shape.parent_of(k.2).expect("label on a root edge");
        let plus = self.blocks.get(&v).and_then(|b| b.succ(&k, true));
        let next = self.next_hop(v, k.0);
        match (plus, next) {
            (Some((pk, ph)), Some((nk, nh))) => Some(if pk.0 <= nk.1 { (ph, 0) } else { (nh, 1) }),
            (Some((_, ph)), None) => Some((ph, 0)),
            (None, Some((_, nh))) => Some((nh, 1)),
            (None, None) => None,
        }
    }

    /// Replaces the parent edge of `h`, keeping the head index of its block in sync.
    fn set_parent(&mut self, owner: VertexId, h: NodeHandle, new: Option<(NodeHandle, u32)>) {
        let old = self.df.parent_edge(h).expect("live node");
        if old.is_some() {
            self.df.cut(h).expect("has parent");
        }
        if let Some((p, w)) = new {
            self.df.link(h, p, w).expect("successor edges are acyclic");
        }
        if old != new {
            self.rewires += 1;
        }
        let k = self.key(h);
        let heads = self.heads.entry(owner).or_default();
        let is_head = !matches!(new, Some((_, 0)));
        match (is_head, heads.contains(&k)) {
            (true, false) => heads.insert(k, ()).expect("absent"),
            (false, true) => {
                heads.remove(&k).expect("present");
                if heads.is_empty() {
                    self.heads.remove(&owner);
                }
            }
            _ => {}
        }
    }

    fn fix_parent(&mut self, shape: &impl TreeShape, k: Key) {
        self.fix_parent += 1;
        let h = self.node(k.2, k.1, k.0);
        let owner = shape.parent_of(k.2).expect("label on a root edge");
        let new = self.sigma_handle(shape, k);
        self.set_parent(owner, h, new);
    }

    /// Largest departure of pairs above `u` arriving strictly before `bound`.
    fn max_departure_below(&self, u: VertexId, bound: TimeValue) -> Option<i64> {
        self.pairs.get(&u).and_then(|p| p.max_departure_below(bound))
    }

    /// Start of the run of nodes below `u` whose next hop is a pair `(dep, arr)`
    /// (being added, or just removed): `None` when no node uses it, else the
    /// exclusive lower bound on arrival.
    fn run_floor(&self, u: VertexId, dep: i64, arr: i64) -> Option<Option<i64>> {
        let m2 = self.max_departure_below(u, through(arr));
        if m2.is_some_and(|m| m > dep) {
            return None;
        }
        Some(self.max_departure_below(u, TimeValue::Finite(arr)))
    }

    /// Last node of the block of `u` with arrival at most `dep`, if above `floor`.
    fn run_last(&self, u: VertexId, dep: i64, floor: Option<i64>) -> Option<Key> {
        let (k, _) = self.blocks.get(&u)?.last_where(|k, _| k.0 <= dep)?;
        floor.is_none_or(|m| k.0 > m).then_some(k)
    }

    fn add_label(&mut self, shape: &impl TreeShape, u: VertexId, dep: i64, arr: i64) {
        let v = shape.parent_of(u).expect("label on a root edge");
        let run = self
            .run_floor(u, dep, arr)
            .and_then(|floor| self.run_last(u, dep, floor).map(|last| (floor, last)));

        let h = self.df.add_node();
        debug_assert_eq!(h.index() as usize, self.keys.len());
        let k = (arr, dep, u);
        self.keys.push(Some(k));
        self.pairs
            .entry(u)
            .or_default()
            .insert(dep, arr, h)
            .expect("fresh pair");
        self.blocks.entry(v).or_default().insert(k, h).expect("fresh block key");
        self.heads.entry(v).or_default().insert(k, ()).expect("fresh block key");

        if let Some((floor, last)) = run {
            // Heads inside the run, except its last node, become red links to
            // their block successors.
            let mut chain = Vec::new();
            if let Some(heads) = self.heads.get(&u) {
                let mut x = heads.first_where(|hk, _| floor.is_none_or(|m| hk.0 > m));
                while let Some((hk, _)) = x {
                    if hk >= last {
                        break;
                    }
                    chain.push(hk);
                    x = heads.succ(&hk, true);
                }
            }
            for hk in chain {
                let (_, next) = self.blocks[&u].succ(&hk, true).expect("run continues");
                let hh = self.node(hk.2, hk.1, hk.0);
                self.set_parent(u, hh, Some((next, 0)));
            }
            self.fix_parent(shape, last);
        }
        self.fix_parent(shape, k);
        if let Some((pk, _)) = self.blocks[&v].pred(&k, true) {
            self.fix_parent(shape, pk);
        }
    }

    fn delete_label(&mut self, shape: &impl TreeShape, u: VertexId, dep: i64, arr: i64) {
        let v = shape.parent_of(u).expect("label on a root edge");
        let k = (arr, dep, u);
        let p = self.pairs.get_mut(&u).expect("edge has labels");
        let h = p.remove(dep, arr).expect("pair present");
        if p.is_empty() {
            self.pairs.remove(&u);
        }
        let b = self.blocks.get_mut(&v).expect("block present");
        b.remove(&k).expect("block key present");
        let pred = b.pred(&k, true).map(|(pk, _)| pk);
        if b.is_empty() {
            self.blocks.remove(&v);
        }
        if let Some(hs) = self.heads.get_mut(&v) {
            let _ = hs.remove(&k);
            if hs.is_empty() {
                self.heads.remove(&v);
            }
        }

        let mut marked = Vec::new();
        if let Some(floor) = self.run_floor(u, dep, arr) {
            if let Some(last) = self.run_last(u, dep, floor) {
                marked.push(last);
                let mut x = last;
                loop {
                    let jump = match self.next_hop(u, x.0) {
                        Some((z, _)) => self.max_departure_below(u, TimeValue::Finite(z.0)),
                        None => self.max_departure_below(u, TimeValue::PosInf),
                    };
                    let Some(jump) = jump else { break };
                    let y = self.blocks[&u].last_where(|yk, _| *yk < x && yk.0 <= jump);
                    match y {
                        Some((yk, _)) if floor.is_none_or(|m| yk.0 > m) => {
                            marked.push(yk);
                            x = yk;
                        }
                        _ => break,
                    }
                }
            }
        }
        for m in marked {
            self.fix_parent(shape, m);
        }
        if let Some(pk) = pred {
            self.fix_parent(shape, pk);
        }
        if self.df.parent_edge(h).expect("live node").is_some() {
            self.df.cut(h).expect("has parent");
            self.rewires += 1;
        }
        assert_eq!(
            self.df.child_count(h),
            Ok(0),
            "deleted node ({arr}, {dep}, {u}) still has children"
        );
        self.df.remove_node(h).expect("isolated");
        self.keys[h.index() as usize] = None;
    }

    fn walk(df: &mut DynamicForest, keys: &[Option<Key>], start: NodeHandle, hops: u64) -> TimeValue {
        match df.wla(start, hops - 1).expect("live node") {
            Some(y) => TimeValue::Finite(keys[y.index() as usize].expect("live node").0),
            None => TimeValue::PosInf,
        }
    }

    fn snapshot(&self) -> Snapshot {
        let mut nodes = BTreeMap::new();
        for k in self.keys.iter().flatten() {
            let h = self.node(k.2, k.1, k.0);
            let parent = self
                .df
                .edge(h)
                .expect("live node")
                .map(|(p, w)| (node_key(self.key(p)), w));
            let children = self.df.child_count(h).expect("live node");
            nodes.insert(node_key(*k), NodeState { parent, children });
        }
        let list = |ks: Vec<Key>| ks.into_iter().map(node_key).collect::<Vec<_>>();
        Snapshot {
            nodes,
            blocks: self.blocks.iter().map(|(v, b)| (*v, list(b.keys()))).collect(),
            heads: Some(self.heads.iter().map(|(v, hs)| (*v, list(hs.keys()))).collect()),
        }
    }
}

impl Upward for LatencySuccessor {
    fn up_ea(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue {
        debug_assert!(hops >= 1);
        match self.pairs.get(&u).and_then(|p| p.min_arrival(t)) {
            Some((_, _, h)) => Self::walk(&mut self.df, &self.keys, h, hops),
            None => TimeValue::PosInf,
        }
    }

    fn up_ld(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue {
        debug_assert!(hops >= 1);
        let Some(p) = self.pairs.get(&u) else {
            return TimeValue::NegInf;
        };
        let (df, keys) = (&mut self.df, &self.keys);
        // Arrival at the target only grows with the arrival of the first pair,
        // so the feasible pairs form a prefix of the arrival order.
        let last = p.last_by_arrival_where(|_, _, h| {
            let a = Self::walk(df, keys, h, hops);
            a != TimeValue::PosInf && a <= t
        });
        match last {
            Some((dep, arr, _)) => TimeValue::Finite(p.max_departure_through(arr, dep).expect("non-empty prefix")),
            None => TimeValue::NegInf,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LatencyForest {
    topo: ForestTopology,
    backbone: Backbone,
    fwd: LatencySuccessor,
    mir: LatencySuccessor,
}

impl LatencyForest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the structure by replaying `topo` as links and label additions.
    pub fn from_topology(topo: &ForestTopology) -> Result<Self> {
        let mut f = LatencyForest::new();
        for u in replay(topo) {
            f.apply(&u)?;
        }
        Ok(f)
    }

    pub fn topology(&self) -> &ForestTopology {
        &self.topo
    }

    fn twin(&self, t: Twin) -> &LatencySuccessor {
        match t {
            Twin::Forward => &self.fwd,
            Twin::Mirror => &self.mir,
        }
    }

    fn add_both(&mut self, v: VertexId, l: Label) {
        let m = l.mirrored();
        self.fwd.add_label(&self.topo, v, l.dep, l.arr);
        self.mir.add_label(&self.topo, v, m.dep, m.arr);
    }

    fn delete_both(&mut self, v: VertexId, l: Label) {
        let m = l.mirrored();
        self.fwd.delete_label(&self.topo, v, l.dep, l.arr);
        self.mir.delete_label(&self.topo, v, m.dep, m.arr);
    }

    /// Applies one update; a rejected update changes nothing.
    pub fn apply(&mut self, update: &Update) -> Result<()> {
        self.topo.check(update)?;
        match *update {
            Update::AddVertex(_) | Update::DeleteVertex(_) => self.topo.apply_unchecked(update),
            Update::Link { child, parent, label } => {
                self.topo.apply_unchecked(update);
                self.backbone.link(child, parent);
                self.add_both(child, label);
            }
            Update::Cut(v) => {
                let label = *self.topo.labels(v).first().expect("checked: one label");
                let parent = self.topo.parent(v).expect("checked: has parent");
                self.delete_both(v, label);
                self.topo.apply_unchecked(update);
                self.backbone.cut(v, parent);
            }
            Update::AddLabel(v, label) => {
                self.topo.apply_unchecked(update);
                self.add_both(v, label);
            }
            Update::DeleteLabel(v, label) => {
                self.topo.apply_unchecked(update);
                self.delete_both(v, label);
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

    pub fn link(&mut self, child: VertexId, parent: VertexId, dep: i64, arr: i64) -> Result<()> {
        self.apply(&Update::Link {
            child,
            parent,
            label: Label::new(dep, arr)?,
        })
    }

    pub fn cut(&mut self, v: VertexId) -> Result<()> {
        self.apply(&Update::Cut(v))
    }

    pub fn add_label(&mut self, v: VertexId, dep: i64, arr: i64) -> Result<()> {
        self.apply(&Update::AddLabel(v, Label::new(dep, arr)?))
    }

    pub fn delete_label(&mut self, v: VertexId, dep: i64, arr: i64) -> Result<()> {
        self.apply(&Update::DeleteLabel(v, Label::new(dep, arr)?))
    }

    fn known(&self, v: VertexId) -> Result<()> {
        if self.topo.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        self.known(u)?;
        self.known(v)?;
        Ok(compose_ea(&mut self.backbone, &mut self.fwd, &mut self.mir, u, v, t))
    }

    pub fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        self.known(u)?;
        self.known(v)?;
        Ok(compose_ld(&mut self.backbone, &mut self.fwd, &mut self.mir, u, v, t))
    }

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

    /// Next hop of a node above `u` with arrival `arrival`: the pair above
    /// `p(u)`, as `(dep, arr)`.
    pub fn next_hop(&self, u: VertexId, arrival: i64) -> Result<Option<(i64, i64)>> {
        self.known(u)?;
        let p = self.topo.parent(u).ok_or(Error::NotAnEdge(u))?;
        if self.topo.is_root(p) {
            return Err(Error::NotAnEdge(p));
        }
        Ok(self.fwd.next_hop(p, arrival).map(|(k, _)| (k.1, k.0)))
    }

    /// Parent of the node for `(dep, arr)` above `v` in the forward successor
    /// forest, by definition, with its edge weight.
    pub fn sigma(&self, v: VertexId, dep: i64, arr: i64) -> Result<Option<(NodeKey, u32)>> {
        self.known(v)?;
        let l = Label::new(dep, arr)?;
        if !self.topo.labels(v).contains(&l) {
            return Err(Error::MissingLabel(v, l));
        }
        Ok(self
            .fwd
            .sigma_handle(&self.topo, (arr, dep, v))
            .map(|(h, w)| (node_key(self.fwd.key(h)), w)))
    }

    pub fn counters(&self, twin: Twin) -> Counters {
        self.twin(twin).counters()
    }

    pub fn backbone_counters(&self) -> ForestCounters {
        self.backbone.counters()
    }

    pub fn snapshot(&self, twin: Twin) -> Snapshot {
        self.twin(twin).snapshot()
    }
}
