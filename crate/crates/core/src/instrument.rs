//! Structure snapshots and update counters.
//!
//! A [`Snapshot`] is a plain copy of one successor forest: every node with its
//! parent edge, the block lists, and (for the latency structure) the head
//! lists. The validator in [`crate::oracle`] compares it against a recomputation.

use std::collections::BTreeMap;

use crate::model::VertexId;

/// A successor-forest node: a label `(departure, arrival)` on the edge above `vertex`.
///
/// Field order gives the block order: arrival, then departure, then vertex.
/// Without latencies `arrival == departure`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeKey {
    pub arrival: i64,
    pub departure: i64,
    pub vertex: VertexId,
}

impl NodeKey {
    pub fn instant(label: i64, vertex: VertexId) -> NodeKey {
        NodeKey {
            arrival: label,
            departure: label,
            vertex,
        }
    }
}

impl std::fmt::Display for NodeKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.arrival == self.departure {
            write!(f, "({}, {})", self.departure, self.vertex)
        } else {
            write!(f, "({}, {}, {})", self.arrival, self.departure, self.vertex)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeState {
    /// Parent node and edge weight (0 red, 1 blue).
    pub parent: Option<(NodeKey, u32)>,
    pub children: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Snapshot {
    pub nodes: BTreeMap<NodeKey, NodeState>,
    /// Block of each non-leaf vertex, in block order.
    pub blocks: BTreeMap<VertexId, Vec<NodeKey>>,
    /// Head list per block; `None` for structures without head indexes.
    pub heads: Option<BTreeMap<VertexId, Vec<NodeKey>>>,
}

impl Snapshot {
    pub fn parent_map(&self) -> BTreeMap<NodeKey, Option<(NodeKey, u32)>> {
        self.nodes.iter().map(|(k, s)| (*k, s.parent)).collect()
    }

    /// Nodes whose parent edge differs between `self` and `other`. A node
    /// present on one side only counts when it has a parent there.
    pub fn parent_diff(&self, other: &Snapshot) -> Vec<NodeKey> {
        let mut out = Vec::new();
        for (k, s) in &self.nodes {
            let after = other.nodes.get(k).and_then(|o| o.parent);
            if s.parent != after {
                out.push(*k);
            }
        }
        for (k, o) in &other.nodes {
            if !self.nodes.contains_key(k) && o.parent.is_some() {
                out.push(*k);
            }
        }
        out.sort();
        out
    }
}

/// Cumulative update counters of one successor forest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub fix_parent: u64,
    /// Parent-edge changes, including edges dropped when a node is removed.
    pub rewires: u64,
    /// Dynamic-forest primitive calls.
    pub primitives: u64,
}

impl std::ops::Sub for Counters {
    type Output = Counters;
    fn sub(self, rhs: Counters) -> Counters {
        Counters {
            fix_parent: self.fix_parent - rhs.fix_parent,
            rewires: self.rewires - rhs.rewires,
            primitives: self.primitives - rhs.primitives,
        }
    }
}

impl std::ops::Add for Counters {
    type Output = Counters;
    fn add(self, rhs: Counters) -> Counters {
        Counters {
            fix_parent: self.fix_parent + rhs.fix_parent,
            rewires: self.rewires + rhs.rewires,
            primitives: self.primitives + rhs.primitives,
        }
    }
}
