//! Fixed-topology temporal forest built from path structures.
//!
//! The forest is cut into heavy paths, each extended by the edge above its
//! topmost vertex, so every edge lies on exactly one path. Each path keeps a
//! [`PathStructure`] over its labels. A query walks from both endpoints up to
//! their lowest common ancestor, one path at a time, and composes the
//! per-path answers. Any such walk crosses `O(log n)` paths.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{ForestTopology, Label, TimeValue, Update, VertexId};
use crate::path::PathStructure;

/// One extended heavy path: `vertices[0]` is the deepest vertex and
/// `vertices[i + 1]` is the parent of `vertices[i]`.
#[derive(Clone, Debug)]
struct HeavyPath {
    vertices: Vec<VertexId>,
    structure: PathStructure,
}

/// Part of a vertical walk that stays on one path, as positions on it.
#[derive(Clone, Copy, Debug)]
struct Segment {
    path: usize,
    low: usize,
    high: usize,
}

#[derive(Clone, Debug)]
pub struct HldForest {
    topo: ForestTopology,
    paths: Vec<HeavyPath>,
    /// Path and position of the edge above each non-root vertex (the edge
    /// from `vertices[pos]` to `vertices[pos + 1]`).
    edge_at: HashMap<VertexId, (usize, usize)>,
    /// Topmost vertex of the heavy chain of each vertex, before extension.
    chain_head: HashMap<VertexId, VertexId>,
    depth: HashMap<VertexId, usize>,
    last_paths: usize,
    total_segments: u64,
}

impl HldForest {
    /// Decomposes `topo`; every label must be an instant.
    pub fn build(topo: &ForestTopology) -> Result<HldForest> {
        topo.validate()?;
        let mut depth = HashMap::new();
        let mut order = Vec::new();
        let mut stack: Vec<VertexId> = topo.vertices().filter(|&v| topo.is_root(v)).collect();
        for &r in &stack {
            depth.insert(r, 0);
        }
        while let Some(v) = stack.pop() {
            order.push(v);
            for c in topo.children(v) {
                depth.insert(c, depth[&v] + 1);
                stack.push(c);
            }
        }

        let mut size: HashMap<VertexId, usize> = HashMap::new();
        let mut heavy: HashMap<VertexId, VertexId> = HashMap::new();
        for &v in order.iter().rev() {
            let mut total = 1;
            let mut best: Option<(usize, VertexId)> = None;
            for c in topo.children(v) {
                let s = size[&c];
                total += s;
                // Larger subtree wins; ties go to the smaller id.
                if best.is_none_or(|(bs, bc)| s > bs || (s == bs && c < bc)) {
                    best = Some((s, c));
                }
            }
            size.insert(v, total);
            if let Some((_, c)) = best {
                heavy.insert(v, c);
            }
        }

        let mut f = HldForest {
            topo: topo.clone(),
            paths: Vec::new(),
            edge_at: HashMap::new(),
            chain_head: HashMap::new(),
            depth,
            last_paths: 0,
            total_segments: 0,
        };
        // Chains start at roots and at light children, in traversal order.
        for &top in &order {
            if topo.parent(top).is_some_and(|p| heavy.get(&p) == Some(&top)) {
                continue;
            }
            let mut chain = vec![top];
            while let Some(&c) = heavy.get(chain.last().expect("non-empty")) {
                chain.push(c);
            }
            for &v in &chain {
                f.chain_head.insert(v, top);
            }
            chain.reverse();
            if let Some(p) = topo.parent(top) {
                chain.push(p);
            }
            if chain.len() < 2 {
                continue;
            }
            let mut sets = Vec::with_capacity(chain.len() - 1);
            for (pos, &v) in chain[..chain.len() - 1].iter().enumerate() {
                let mut set = Vec::new();
                for l in topo.labels(v) {
                    if l.dep != l.arr {
                        return Err(Error::LatencyUnsupported);
                    }
                    set.push(l.dep);
                }
                sets.push(set);
                f.edge_at.insert(v, (f.paths.len(), pos));
            }
            f.paths.push(HeavyPath {
                structure: PathStructure::build(&sets)?,
                vertices: chain,
            });
        }
        Ok(f)
    }

    pub fn topology(&self) -> &ForestTopology {
        &self.topo
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    /// Vertices of path `i`, deepest first.
    pub fn path_vertices(&self, i: usize) -> &[VertexId] {
        &self.paths[i].vertices
    }

    pub fn path_structure(&self, i: usize) -> &PathStructure {
        &self.paths[i].structure
    }

    /// Path holding the edge above `v`, with the edge's position on it.
    pub fn edge_location(&self, v: VertexId) -> Option<(usize, usize)> {
        self.edge_at.get(&v).copied()
    }

    /// Distinct path structures used by the most recent query.
    pub fn last_query_paths(&self) -> usize {
        self.last_paths
    }

    /// Segments over all queries so far.
    pub fn total_segments(&self) -> u64 {
        self.total_segments
    }

    fn apply_label(&mut self, update: Update) -> Result<()> {
        self.topo.check(&update)?;
        let (v, l, add) = match update {
            Update::AddLabel(v, l) => (v, l, true),
            Update::DeleteLabel(v, l) => (v, l, false),
            _ => unreachable!("label updates only"),
        };
        if l.dep != l.arr {
            return Err(Error::LatencyUnsupported);
        }
        let (p, pos) = self.edge_at[&v];
        let s = &mut self.paths[p].structure;
        if add {
            s.add_label(pos, l.dep)?;
        } else {
            s.delete_label(pos, l.dep)?;
        }
        self.topo.apply_unchecked(&update);
        Ok(())
    }

    pub fn add_label(&mut self, v: VertexId, label: i64) -> Result<()> {
        self.apply_label(Update::AddLabel(v, Label::instant(label)?))
    }

    pub fn delete_label(&mut self, v: VertexId, label: i64) -> Result<()> {
        self.apply_label(Update::DeleteLabel(v, Label::instant(label)?))
    }

    fn known(&self, v: VertexId) -> Result<()> {
        if self.topo.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn lca(&self, mut u: VertexId, mut v: VertexId) -> Option<VertexId> {
        while self.chain_head[&u] != self.chain_head[&v] {
            let (hu, hv) = (self.chain_head[&u], self.chain_head[&v]);
            if self.depth[&hu] >= self.depth[&hv] {
                u = self.topo.parent(hu)?;
            } else {
                v = self.topo.parent(hv)?;
            }
        }
        Some(if self.depth[&u] <= self.depth[&v] { u } else { v })
    }

    /// Segments from `u` up to its ancestor `w`, starting at `u`.
    fn climb(&self, mut u: VertexId, w: VertexId) -> Vec<Segment> {
        let dw = self.depth[&w];
        let mut out = Vec::new();
        while u != w {
            let (path, low) = self.edge_at[&u];
            let vs = &self.paths[path].vertices;
            let top = vs.len() - 1;
            let high = if dw >= self.depth[&vs[top]] {
                low + (self.depth[&u] - dw)
            } else {
                top
            };
            out.push(Segment { path, low, high });
            u = vs[high];
        }
        out
    }

    fn record(&mut self, segments: &[&[Segment]]) {
        let distinct: BTreeSet<usize> = segments.iter().flat_map(|s| s.iter().map(|x| x.path)).collect();
        self.last_paths = distinct.len();
        self.total_segments += segments.iter().map(|s| s.len() as u64).sum::<u64>();
    }

    fn split(&mut self, u: VertexId, v: VertexId) -> Result<Option<(Vec<Segment>, Vec<Segment>)>> {
        self.known(u)?;
        self.known(v)?;
        let Some(w) = self.lca(u, v) else {
            self.record(&[]);
            return Ok(None);
        };
        let (up, down) = (self.climb(u, w), self.climb(v, w));
        self.record(&[&up, &down]);
        Ok(Some((up, down)))
    }

    pub fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        let Some((up, down)) = self.split(u, v)? else {
            return Ok(TimeValue::PosInf);
        };
        let mut cur = t;
        for s in &up {
            cur = self.paths[s.path].structure.ea(s.low, s.high, cur)?;
            if cur == TimeValue::PosInf {
                return Ok(cur);
            }
        }
        for s in down.iter().rev() {
            cur = self.paths[s.path].structure.ea(s.high, s.low, cur)?;
            if cur == TimeValue::PosInf {
                return Ok(cur);
            }
        }
        Ok(cur)
    }

    pub fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        let Some((up, down)) = self.split(u, v)? else {
            return Ok(TimeValue::NegInf);
        };
        let mut cur = t;
        for s in &down {
            cur = self.paths[s.path].structure.ld(s.high, s.low, cur)?;
            if cur == TimeValue::NegInf {
                return Ok(cur);
            }
        }
        for s in up.iter().rev() {
            cur = self.paths[s.path].structure.ld(s.low, s.high, cur)?;
            if cur == TimeValue::NegInf {
                return Ok(cur);
            }
        }
        Ok(cur)
    }

    pub fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        if u == v {
            self.known(u)?;
            self.record(&[]);
            return Ok(td <= ta);
        }
        let a = self.ea(u, v, td)?;
        Ok(a != TimeValue::PosInf && a <= ta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::path::Orientation;
    use TimeValue::{Finite, NegInf, PosInf};

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    fn tree(parents: &[(u32, u32)], labels: &[i64]) -> ForestTopology {
        let n = parents.iter().map(|&(c, p)| c.max(p)).max().unwrap_or(0) + 1;
        let edges: Vec<_> = parents
            .iter()
            .map(|&(c, p)| {
                (
                    v(c),
                    v(p),
                    vec![Label::instant(labels[c as usize % labels.len()]).unwrap()],
                )
            })
            .collect();
        ForestTopology::from_edges((0..n).map(v), edges).unwrap()
    }

    fn balanced(n: u32) -> ForestTopology {
        let parents: Vec<_> = (1..n).map(|c| (c, (c - 1) / 2)).collect();
        tree(&parents, &[3, 1, 4, 1, 5, 9, 2, 6])
    }

    #[test]
    fn bare_path_is_one_path() {
        let f = HldForest::build(&tree(&[(0, 1), (1, 2), (2, 3)], &[1])).unwrap();
        assert_eq!(f.path_count(), 1);
        assert_eq!(f.path_vertices(0), &[v(0), v(1), v(2), v(3)]);
    }

    #[test]
    fn star_edges_are_separate_paths() {
        let f = HldForest::build(&tree(&[(1, 0), (2, 0), (3, 0), (4, 0)], &[2])).unwrap();
        assert_eq!(f.path_count(), 4);
        for i in 0..4 {
            assert_eq!(f.path_vertices(i).len(), 2);
        }
        // Tie on subtree size: the smallest child is heavy.
        assert_eq!(
            f.edge_location(v(1)).map(|(p, _)| f.path_vertices(p).to_vec()),
            Some(vec![v(1), v(0)])
        );
    }

    #[test]
    fn every_edge_on_exactly_one_path() {
        let topo = balanced(15);
        let f = HldForest::build(&topo).unwrap();
        let mut seen = BTreeSet::new();
        for i in 0..f.path_count() {
            let vs = f.path_vertices(i);
            for w in vs.windows(2) {
                assert_eq!(topo.parent(w[0]), Some(w[1]));
                assert!(seen.insert(w[0]));
            }
        }
        assert_eq!(seen.len(), 14);
    }

    #[test]
    fn balanced_tree_segments() {
        let mut f = HldForest::build(&balanced(15)).unwrap();
        for leaf in 7..15 {
            f.ea(v(leaf), v(0), Finite(0)).unwrap();
            assert!(f.last_query_paths() <= 8);
            for other in 7..15 {
                f.ld(v(leaf), v(other), Finite(9)).unwrap();
                assert!(f.last_query_paths() <= 8);
            }
        }
    }

    #[test]
    fn matches_oracle_on_balanced_tree() {
        let topo = balanced(15);
        let mut f = HldForest::build(&topo).unwrap();
        for a in 0..15 {
            for b in 0..15 {
                for t in [NegInf, Finite(0), Finite(2), Finite(4), PosInf] {
                    let (a, b) = (v(a), v(b));
                    assert_eq!(
                        f.ea(a, b, t).unwrap(),
                        oracle::ea(&topo, a, b, t).unwrap(),
                        "ea {a} {b} {t}"
                    );
                    assert_eq!(
                        f.ld(a, b, t).unwrap(),
                        oracle::ld(&topo, a, b, t).unwrap(),
                        "ld {a} {b} {t}"
                    );
                    assert_eq!(
                        f.reach(a, b, t, Finite(6)).unwrap(),
                        oracle::reach(&topo, a, b, t, Finite(6)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn label_updates_touch_one_path() {
        let topo = balanced(15);
        let mut f = HldForest::build(&topo).unwrap();
        let (p, pos) = f.edge_location(v(9)).unwrap();
        let before: Vec<_> = (0..f.path_count())
            .map(|i| f.path_structure(i).total_counters())
            .collect();
        f.add_label(v(9), 7).unwrap();
        for (i, c) in before.iter().enumerate() {
            assert_eq!(f.path_structure(i).total_counters() != *c, i == p);
        }
        assert!(f.path_structure(p).labels(pos).unwrap().contains(&7));
        for o in Orientation::ALL {
            let (shape, labels) = f.path_structure(p).view(o);
            assert!(oracle::validate(&shape, &labels, &f.path_structure(p).snapshot(o)).is_empty());
        }
        let after = f.topology().clone();
        assert_eq!(
            f.ea(v(9), v(0), Finite(6)).unwrap(),
            oracle::ea(&after, v(9), v(0), Finite(6)).unwrap()
        );
        f.delete_label(v(9), 7).unwrap();
        assert_eq!(f.topology(), &topo);
        assert_eq!(f.delete_label(v(9), 1), Err(Error::LastLabelRequiresCut(v(9))));
        assert_eq!(f.add_label(v(0), 1), Err(Error::NotAnEdge(v(0))));
    }

    #[test]
    fn separate_trees_and_conventions() {
        let mut topo = tree(&[(1, 0)], &[4]);
        topo.apply(&Update::AddVertex(v(2))).unwrap();
        let mut f = HldForest::build(&topo).unwrap();
        assert_eq!(f.ea(v(1), v(2), Finite(0)).unwrap(), PosInf);
        assert_eq!(f.ld(v(1), v(2), Finite(0)).unwrap(), NegInf);
        assert!(!f.reach(v(1), v(2), NegInf, PosInf).unwrap());
        assert_eq!(f.ea(v(2), v(2), Finite(5)).unwrap(), Finite(5));
        assert_eq!(f.ld(v(1), v(1), Finite(5)).unwrap(), Finite(5));
        assert!(f.ea(v(7), v(1), Finite(0)).is_err());
    }
}
