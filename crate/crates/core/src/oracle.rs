//! Brute-force references.
//!
//! Queries walk the unique forest path and pick, edge by edge, the label with
//! the smallest arrival among those departing no earlier than the current
//! time. [`enumerate`] lists every temporal path instead and is used to check
//! the greedy walk itself. [`validate`] recomputes successor-forest parents
//! from the labels alone and compares them with a structure snapshot.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::instrument::{NodeKey, Snapshot};
use crate::model::{ForestTopology, Label, TimeValue, TreeShape, VertexId};

fn known(topo: &ForestTopology, v: VertexId) -> Result<()> {
    if topo.contains(v) {
        Ok(())
    } else {
        Err(Error::UnknownVertex(v))
    }
}

fn greedy_ea(
    topo: &ForestTopology,
    u: VertexId,
    v: VertexId,
    t: TimeValue,
    map: impl Fn(&Label) -> Label,
) -> TimeValue {
    if u == v {
        return t;
    }
    let Some(edges) = topo.path_edges(u, v) else {
        return TimeValue::PosInf;
    };
    let mut cur = t;
    for c in edges {
        let best = topo
            .labels(c)
            .iter()
            .map(&map)
            .filter(|l| cur.le_int(l.dep))
            .map(|l| l.arr)
            .min();
        match best {
            Some(a) => cur = TimeValue::Finite(a),
            None => return TimeValue::PosInf,
        }
    }
    cur
}

/// Earliest arrival at `v` departing `u` no earlier than `t`.
pub fn ea(topo: &ForestTopology, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
    known(topo, u)?;
    known(topo, v)?;
    Ok(greedy_ea(topo, u, v, t, |l| *l))
}

/// Latest departure from `u` arriving at `v` no later than `t`, computed as
/// the negated earliest arrival from `v` to `u` over mirrored labels.
pub fn ld(topo: &ForestTopology, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
    known(topo, u)?;
    known(topo, v)?;
    Ok(-greedy_ea(topo, v, u, -t, Label::mirrored))
}

/// Latest departure by a direct walk from `v` back to `u`.
pub fn ld_backward(topo: &ForestTopology, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
    known(topo, u)?;
    known(topo, v)?;
    if u == v {
        return Ok(t);
    }
    let Some(edges) = topo.path_edges(u, v) else {
        return Ok(TimeValue::NegInf);
    };
    let mut cur = t;
    for c in edges.into_iter().rev() {
        let best = topo.labels(c).iter().filter(|l| cur.ge_int(l.arr)).map(|l| l.dep).max();
        match best {
            Some(d) => cur = TimeValue::Finite(d),
            None => return Ok(TimeValue::NegInf),
        }
    }
    Ok(cur)
}

/// Whether some temporal path departs `u` no earlier than `td` and reaches
/// `v` no later than `ta`.
pub fn reach(topo: &ForestTopology, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
    if u == v {
        known(topo, u)?;
        return Ok(td <= ta);
    }
    let a = ea(topo, u, v, td)?;
    Ok(a.is_finite() && a <= ta)
}

/// Exhaustive enumeration of temporal paths.
pub mod enumerate {
    use super::*;

    /// `(departure, arrival)` of every temporal path from `u` to `v`, or
    /// `None` when the vertices are equal or in different trees.
    pub fn journeys(topo: &ForestTopology, u: VertexId, v: VertexId) -> Option<BTreeSet<(i64, i64)>> {
        if u == v {
            return None;
        }
        let edges = topo.path_edges(u, v)?;
        let sets: Vec<Vec<Label>> = edges
            .iter()
            .map(|&c| topo.labels(c).iter().copied().collect())
            .collect();
        let mut out = BTreeSet::new();
        fn go(sets: &[Vec<Label>], i: usize, dep: i64, last_arr: i64, out: &mut BTreeSet<(i64, i64)>) {
            if i == sets.len() {
                out.insert((dep, last_arr));
                return;
            }
            for l in &sets[i] {
                if l.dep >= last_arr {
                    go(sets, i + 1, dep, l.arr, out);
                }
            }
        }
        for l in &sets[0] {
            go(&sets, 1, l.dep, l.arr, &mut out);
        }
        Some(out)
    }

    /// All journeys between two fixed vertices, answering any query time.
    #[derive(Clone, Debug)]
    pub struct Journeys {
        same: bool,
        set: BTreeSet<(i64, i64)>,
    }

    impl Journeys {
        pub fn of(topo: &ForestTopology, u: VertexId, v: VertexId) -> Journeys {
            Journeys {
                same: u == v,
                set: journeys(topo, u, v).unwrap_or_default(),
            }
        }

        pub fn ea(&self, t: TimeValue) -> TimeValue {
            if self.same {
                return t;
            }
            self.set
                .iter()
                .filter(|&&(d, _)| t.le_int(d))
                .map(|&(_, a)| a)
                .min()
                .map_or(TimeValue::PosInf, TimeValue::Finite)
        }

        pub fn ld(&self, t: TimeValue) -> TimeValue {
            if self.same {
                return t;
            }
            self.set
                .iter()
                .filter(|&&(_, a)| t.ge_int(a))
                .map(|&(d, _)| d)
                .max()
                .map_or(TimeValue::NegInf, TimeValue::Finite)
        }

        pub fn reach(&self, td: TimeValue, ta: TimeValue) -> bool {
            if self.same {
                return td <= ta;
            }
            self.set.iter().any(|&(d, a)| td.le_int(d) && ta.ge_int(a))
        }
    }

    pub fn ea(topo: &ForestTopology, u: VertexId, v: VertexId, t: TimeValue) -> TimeValue {
        Journeys::of(topo, u, v).ea(t)
    }

    pub fn ld(topo: &ForestTopology, u: VertexId, v: VertexId, t: TimeValue) -> TimeValue {
        Journeys::of(topo, u, v).ld(t)
    }

    pub fn reach(topo: &ForestTopology, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> bool {
        Journeys::of(topo, u, v).reach(td, ta)
    }
}

/// Labels of every vertex of `topo`, optionally mirrored.
pub fn label_map(topo: &ForestTopology, mirrored: bool) -> BTreeMap<VertexId, Vec<Label>> {
    topo.vertices()
        .map(|v| {
            let ls = topo
                .labels(v)
                .iter()
                .map(|l| if mirrored { l.mirrored() } else { *l })
                .collect();
            (v, ls)
        })
        .collect()
}

/// One inconsistency found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub node: Option<NodeKey>,
    pub vertex: Option<VertexId>,
    pub what: String,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.node, self.vertex) {
            (Some(k), _) => write!(f, "node {k}: {}", self.what),
            (None, Some(v)) => write!(f, "vertex {v}: {}", self.what),
            (None, None) => write!(f, "{}", self.what),
        }
    }
}

fn key_of(l: &Label, v: VertexId) -> NodeKey {
    NodeKey {
        arrival: l.arr,
        departure: l.dep,
        vertex: v,
    }
}

/// Parent of `k` by definition, recomputed from the labels.
fn expected_parent(
    shape: &impl TreeShape,
    labels: &BTreeMap<VertexId, Vec<Label>>,
    blocks: &BTreeMap<VertexId, Vec<NodeKey>>,
    k: NodeKey,
) -> Option<(NodeKey, u32)> {
    let v = shape.parent_of(k.vertex)?;
    let plus = blocks
        .get(&v)
        .and_then(|b| b.get(b.partition_point(|x| *x <= k)).copied());
    let next = match shape.parent_of(v) {
        None => None,
        Some(_) => labels
            .get(&v)
            .into_iter()
            .flatten()
            .filter(|l| l.dep >= k.arrival)
            .min_by(|a, b| a.arr.cmp(&b.arr).then(b.dep.cmp(&a.dep)))
            .map(|l| key_of(l, v)),
    };
    match (plus, next) {
        (Some(p), Some(n)) => Some(if p.arrival <= n.departure { (p, 0) } else { (n, 1) }),
        (Some(p), None) => Some((p, 0)),
        (None, Some(n)) => Some((n, 1)),
        (None, None) => None,
    }
}

/// Compares a snapshot with the successor forest defined by `labels` over
/// `shape`. Returns every mismatch; an empty report means consistent.
///
/// Checks node set, parents and edge weights, child counts (at most two,
/// of distinct weights), block contents and order, and head lists when the
/// snapshot carries them.
pub fn validate(shape: &impl TreeShape, labels: &BTreeMap<VertexId, Vec<Label>>, snap: &Snapshot) -> Vec<Mismatch> {
    let mut out = Vec::new();
    let mut report = |node: Option<NodeKey>, vertex: Option<VertexId>, what: String| {
        out.push(Mismatch { node, vertex, what });
    };

    let mut expected = BTreeSet::new();
    let mut blocks: BTreeMap<VertexId, Vec<NodeKey>> = BTreeMap::new();
    for (&v, ls) in labels {
        if ls.is_empty() {
            continue;
        }
        let Some(p) = shape.parent_of(v) else {
            report(None, Some(v), "labels on a root".into());
            continue;
        };
        for l in ls {
            let k = key_of(l, v);
            expected.insert(k);
            blocks.entry(p).or_default().push(k);
        }
    }
    for b in blocks.values_mut() {
        b.sort();
    }

    for k in &expected {
        if !snap.nodes.contains_key(k) {
            report(Some(*k), None, "missing node".into());
        }
    }
    for k in snap.nodes.keys() {
        if !expected.contains(k) {
            report(Some(*k), None, "unexpected node".into());
        }
    }

    let mut children: BTreeMap<NodeKey, Vec<u32>> = BTreeMap::new();
    for (k, s) in &snap.nodes {
        if let Some((p, w)) = s.parent {
            children.entry(p).or_default().push(w);
        }
        if !expected.contains(k) {
            continue;
        }
        let want = expected_parent(shape, labels, &blocks, *k);
        if s.parent != want {
            let show = |x: Option<(NodeKey, u32)>| match x {
                Some((p, w)) => format!("{p} ({})", if w == 0 { "red" } else { "blue" }),
                None => "none".to_string(),
            };
            report(
                Some(*k),
                None,
                format!("parent {} expected {}", show(s.parent), show(want)),
            );
        }
    }
    for (k, s) in &snap.nodes {
        let ws = children.get(k).cloned().unwrap_or_default();
        if ws.len() as u32 != s.children {
            report(
                Some(*k),
                None,
                format!("child count {} but {} children point here", s.children, ws.len()),
            );
        }
        if ws.len() > 2 {
            report(Some(*k), None, format!("{} children", ws.len()));
        } else if ws.len() == 2 && ws[0] == ws[1] {
            report(Some(*k), None, "two children with equal edge weights".into());
        }
    }

    for (v, b) in &blocks {
        if snap.blocks.get(v) != Some(b) {
            report(
                None,
                Some(*v),
                format!("block {:?} expected {:?}", snap.blocks.get(v), b),
            );
        }
    }
    for v in snap.blocks.keys() {
        if !blocks.contains_key(v) {
            report(None, Some(*v), "unexpected block".into());
        }
    }

    if let Some(heads) = &snap.heads {
        for (v, b) in &blocks {
            let want: Vec<NodeKey> = b
                .iter()
                .copied()
                .filter(|k| !matches!(expected_parent(shape, labels, &blocks, *k), Some((_, 0))))
                .collect();
            let got = heads.get(v).cloned().unwrap_or_default();
            if got != want {
                report(None, Some(*v), format!("heads {got:?} expected {want:?}"));
            }
        }
        for (v, h) in heads {
            if !blocks.contains_key(v) && !h.is_empty() {
                report(None, Some(*v), "heads without a block".into());
            }
        }
    }
    out
}
