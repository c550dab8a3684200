//! Successor forest over instantaneous labels.
//!
//! One node `(ℓ, u)` per label `ℓ` on the edge above `u`. With `v = p(u)`, the
//! parent of `(ℓ, u)` is chosen between
//!
//! * the strict successor of `(ℓ, u)` in the block of `v` (a red edge, weight 0), and
//! * `(ℓ', v)` where `ℓ'` is the smallest label `>= ℓ` above `v` (a blue edge, weight 1),
//!
//! taking the red one when its label is `<= ℓ'`. A walk that crosses `k` blue
//! edges from `(ℓ, u)` ends on the earliest label usable `k` edges higher up.
//!
//! The structure only needs the parent map of the underlying tree, supplied
//! through [`TreeShape`] on every call, so it serves both dynamic forests and
//! the fixed path copies.

use std::collections::{BTreeMap, HashMap};

use crate::dynamic_forest::{DynamicForest, NodeHandle};
use crate::instrument::{Counters, NodeKey, NodeState, Snapshot};
use crate::model::{TimeValue, TreeShape, VertexId};
use crate::ordered_index::{BlockIndex, LabelIndex};

type BlockKey = (i64, VertexId);

#[derive(Clone, Debug, Default)]
pub(crate) struct SuccessorForest {
    df: DynamicForest,
    labels: HashMap<VertexId, LabelIndex<NodeHandle>>,
    blocks: HashMap<VertexId, BlockIndex<BlockKey, NodeHandle>>,
    /// Key of each live node, by handle index.
    keys: Vec<Option<BlockKey>>,
    fix_parent: u64,
    rewires: u64,
}

impl SuccessorForest {
    pub fn counters(&self) -> Counters {
        Counters {
            fix_parent: self.fix_parent,
            rewires: self.rewires,
            primitives: self.df.counters().primitives,
        }
    }

    fn node(&self, u: VertexId, label: i64) -> NodeHandle {
        self.labels
            .get(&u)
            .and_then(|d| d.get(&label))
            .unwrap_or_else(|| panic!("no successor node for label {label} above {u}"))
    }

    /// Parent of `(label, u)` by definition, with its edge weight.
    pub fn sigma(&self, shape: &impl TreeShape, u: VertexId, label: i64) -> Option<(i64, VertexId, u32)> {
        self.sigma_handle(shape, u, label).map(|(h, w)| {
            let (l, v) = self.keys[h.index() as usize].expect("live node");
            (l, v, w)
        })
    }

    fn sigma_handle(&self, shape: &impl TreeShape, u: VertexId, label: i64) -> Option<(NodeHandle, u32)> {
        let v = shape.parent_of(u).expect("label on a root edge");
        let plus = self.blocks.get(&v).and_then(|b| b.succ(&(label, u), true));
        // Roots carry no labels, so an empty index also covers the root case.
        let next = self.labels.get(&v).and_then(|d| d.succ(&label, false));
        match (plus, next) {
            (Some(((lp, _), hp)), Some((ln, hn))) => Some(if lp <= ln { (hp, 0) } else { (hn, 1) }),
            (Some((_, hp)), None) => Some((hp, 0)),
            (None, Some((_, hn))) => Some((hn, 1)),
            (None, None) => None,
        }
    }

    /// Recomputes the parent of `(label, u)`: one cut if linked, then a link if defined.
    pub fn fix_parent(&mut self, shape: &impl TreeShape, u: VertexId, label: i64) {
        self.fix_parent += 1;
        let h = self.node(u, label);
        let old = self.df.parent_edge(h).expect("live node");
        let new = self.sigma_handle(shape, u, label);
        if old.is_some() {
            self.df.cut(h).expect("has parent");
        }
        if let Some((p, w)) = new {
            self.df.link(h, p, w).expect("successor edges are acyclic");
        }
        if old != new {
            self.rewires += 1;
        }
    }

    /// Inserts `(label, u)`. The edge above `u` must exist in `shape`.
    pub fn add_label(&mut self, shape: &impl TreeShape, u: VertexId, label: i64) {
        let v = shape.parent_of(u).expect("label on a root edge");
        let h = self.df.add_node();
        debug_assert_eq!(h.index() as usize, self.keys.len());
        self.keys.push(Some((label, u)));
        self.labels.entry(u).or_default().insert(label, h).expect("fresh label");
        self.blocks
            .entry(v)
            .or_default()
            .insert((label, u), h)
            .expect("fresh block key");

        if let Some(((l, c), _)) = self.blocks.get(&u).and_then(|b| b.last_where(|k, _| k.0 <= label)) {
            self.fix_parent(shape, c, l);
        }
        self.fix_parent(shape, u, label);
        if let Some(((l, c), _)) = self.blocks[&v].pred(&(label, u), true) {
            self.fix_parent(shape, c, l);
        }
    }

    /// Removes `(label, u)`. The edge above `u` must still exist in `shape`.
    pub fn delete_label(&mut self, shape: &impl TreeShape, u: VertexId, label: i64) {
        let v = shape.parent_of(u).expect("label on a root edge");
        let d = self.labels.get_mut(&u).expect("edge has labels");
        let h = d.remove(&label).expect("label present");
        if d.is_empty() {
            self.labels.remove(&u);
        }
        let b = self.blocks.get_mut(&v).expect("block present");
        b.remove(&(label, u)).expect("block key present");
        let pred = b.pred(&(label, u), true);
        if b.is_empty() {
            self.blocks.remove(&v);
        }

        if let Some(((l, c), _)) = self.blocks.get(&u).and_then(|b| b.last_where(|k, _| k.0 <= label)) {
            self.fix_parent(shape, c, l);
        }
        if let Some(((l, c), _)) = pred {
            self.fix_parent(shape, c, l);
        }
        if self.df.parent_edge(h).expect("live node").is_some() {
            self.df.cut(h).expect("has parent");
            self.rewires += 1;
        }
        assert_eq!(
            self.df.child_count(h),
            Ok(0),
            "deleted node ({label}, {u}) still has children"
        );
        self.df.remove_node(h).expect("isolated");
        self.keys[h.index() as usize] = None;
    }

    /// Arrival at the vertex `hops` edges above `start`'s vertex when
    /// following the walk from `start`, or `+inf`.
    fn walk(df: &mut DynamicForest, keys: &[Option<BlockKey>], start: NodeHandle, hops: u64) -> TimeValue {
        match df.wla(start, hops - 1).expect("live node") {
            Some(y) => TimeValue::Finite(keys[y.index() as usize].expect("live node").0),
            None => TimeValue::PosInf,
        }
    }

    /// Earliest arrival from `u` at its ancestor `hops >= 1` edges above,
    /// departing no earlier than `t`.
    pub fn up_ea(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue {
        debug_assert!(hops >= 1);
        let first = self.labels.get(&u).and_then(|d| d.first_where(|l, _| t.le_int(*l)));
        match first {
            Some((_, h)) => Self::walk(&mut self.df, &self.keys, h, hops),
            None => TimeValue::PosInf,
        }
    }

    /// Latest departure from `u` towards its ancestor `hops >= 1` edges above,
    /// arriving no later than `t`.
    pub fn up_ld(&mut self, u: VertexId, hops: u64, t: TimeValue) -> TimeValue {
        debug_assert!(hops >= 1);
        let Some(d) = self.labels.get(&u) else {
            return TimeValue::NegInf;
        };
        let (df, keys) = (&mut self.df, &self.keys);
        let best = d.last_where(|_, &h| {
            let a = Self::walk(df, keys, h, hops);
            a != TimeValue::PosInf && a <= t
        });
        best.map_or(TimeValue::NegInf, |(l, _)| TimeValue::Finite(l))
    }

    pub fn snapshot(&self) -> Snapshot {
        let key = |h: NodeHandle| {
            let (l, v) = self.keys[h.index() as usize].expect("live node");
            NodeKey::instant(l, v)
        };
        let mut nodes = BTreeMap::new();
        for (i, k) in self.keys.iter().enumerate() {
            let Some((l, v)) = *k else { continue };
            let h = self.labels[&v].get(&l).expect("indexed");
            debug_assert_eq!(h.index() as usize, i);
            let parent = self.df.edge(h).expect("live node").map(|(p, w)| (key(p), w));
            let children = self.df.child_count(h).expect("live node");
            nodes.insert(NodeKey::instant(l, v), NodeState { parent, children });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|(v, b)| (*v, b.keys().into_iter().map(|(l, c)| NodeKey::instant(l, c)).collect()))
            .collect();
        Snapshot {
            nodes,
            blocks,
            heads: None,
        }
    }

    /// Test hook: drops the parent edge of `(label, u)` without recomputing it.
    #[cfg(test)]
    pub fn corrupt_detach(&mut self, u: VertexId, label: i64) {
        let h = self.node(u, label);
        if self.df.edge(h).unwrap().is_some() {
            self.df.cut(h).unwrap();
        }
    }
}
