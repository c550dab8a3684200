//! Temporal path with a fixed topology `v_0 - v_1 - ... - v_{n-1}`.
//!
//! Edge `i` joins `v_i` and `v_{i+1}`. Four successor forests answer every
//! query with a single level-ancestor lookup:
//!
//! | copy              | rooted at   | labels | answers                |
//! |-------------------|-------------|--------|------------------------|
//! | `Rightward`       | `v_{n-1}`   | `ℓ`    | EA with `i < j`        |
//! | `Leftward`        | `v_0`       | `ℓ`    | EA with `i > j`        |
//! | `MirrorRightward` | `v_{n-1}`   | `-ℓ`   | LD with `i > j`        |
//! | `MirrorLeftward`  | `v_0`       | `-ℓ`   | LD with `i < j`        |
//!
//! Latest departure uses `LD(i, j, t) = -EA'(j, i, -t)` on the mirrored labels.
//! Inside a leftward copy vertex `v_k` is renumbered `n-1-k`, so every copy is
//! a path whose parent map is `k -> k+1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::instrument::{Counters, Snapshot};
use crate::model::{Label, TimeValue, TreeShape, VertexId};
use crate::successor::SuccessorForest;

/// One of the four oriented copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Rightward,
    Leftward,
    MirrorRightward,
    MirrorLeftward,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::Rightward,
        Orientation::Leftward,
        Orientation::MirrorRightward,
        Orientation::MirrorLeftward,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    fn leftward(self) -> bool {
        matches!(self, Orientation::Leftward | Orientation::MirrorLeftward)
    }

    fn mirrored(self) -> bool {
        matches!(self, Orientation::MirrorRightward | Orientation::MirrorLeftward)
    }
}

/// Parent map `k -> k+1` on `n` vertices.
#[derive(Clone, Copy, Debug)]
pub struct PathShape {
    pub n: u32,
}

impl TreeShape for PathShape {
    fn parent_of(&self, v: VertexId) -> Option<VertexId> {
        (v.0 + 1 < self.n).then_some(VertexId(v.0 + 1))
    }
}

#[derive(Clone, Debug)]
pub struct PathStructure {
    n: usize,
    edges: Vec<BTreeSet<i64>>,
    copies: [SuccessorForest; 4],
}

impl PathStructure {
    /// A path on `n >= 1` vertices with no labels.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > u32::MAX as usize {
            return Err(Error::IndexOutOfRange { index: n, len: 0 });
        }
        Ok(PathStructure {
            n,
            edges: vec![BTreeSet::new(); n - 1],
            copies: Default::default(),
        })
    }

    /// Builds the path whose edge `i` carries `label_sets[i]`.
    ///
    /// Labels are inserted one at a time.
    pub fn build(label_sets: &[Vec<i64>]) -> Result<Self> {
        let mut p = PathStructure::new(label_sets.len() + 1)?;
        for (i, set) in label_sets.iter().enumerate() {
            for &l in set {
                p.add_label(i, l)?;
            }
        }
        Ok(p)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.n - 1
    }

    pub fn labels(&self, edge: usize) -> Result<&BTreeSet<i64>> {
        self.edges.get(edge).ok_or(Error::IndexOutOfRange {
            index: edge,
            len: self.n - 1,
        })
    }

    fn shape(&self) -> PathShape {
        PathShape { n: self.n as u32 }
    }

    fn copy_vertex(&self, o: Orientation, edge: usize) -> VertexId {
        VertexId(if o.leftward() { self.n - 2 - edge } else { edge } as u32)
    }

    fn copy_label(o: Orientation, label: i64) -> i64 {
        if o.mirrored() {
            -label
        } else {
            label
        }
    }

    fn check_edge(&self, edge: usize) -> Result<()> {
        if edge + 1 >= self.n {
            return Err(Error::IndexOutOfRange {
                index: edge,
                len: self.n - 1,
            });
        }
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::IndexOutOfRange { index: v, len: self.n });
        }
        Ok(())
    }

    pub fn add_label(&mut self, edge: usize, label: i64) -> Result<()> {
        self.check_edge(edge)?;
        let checked = Label::instant(label)?;
        if self.edges[edge].contains(&label) {
            return Err(Error::DuplicateLabel(VertexId(edge as u32), checked));
        }
        self.edges[edge].insert(label);
        let shape = self.shape();
        for o in Orientation::ALL {
            let u = self.copy_vertex(o, edge);
            self.copies[o.slot()].add_label(&shape, u, Self::copy_label(o, label));
        }
        Ok(())
    }

    /// Removes a label. Unlike forest edges, a path edge may become empty.
    pub fn delete_label(&mut self, edge: usize, label: i64) -> Result<()> {
        self.check_edge(edge)?;
        if !self.edges[edge].remove(&label) {
            let l = Label::instant(label)?;
            return Err(Error::MissingLabel(VertexId(edge as u32), l));
        }
        let shape = self.shape();
        for o in Orientation::ALL {
            let u = self.copy_vertex(o, edge);
            self.copies[o.slot()].delete_label(&shape, u, Self::copy_label(o, label));
        }
        Ok(())
    }

    /// Recomputes the parent of the node for `label` on `edge` in one copy.
    pub fn fix_parent(&mut self, o: Orientation, edge: usize, label: i64) -> Result<()> {
        self.check_edge(edge)?;
        if !self.edges[edge].contains(&label) {
            return Err(Error::MissingLabel(VertexId(edge as u32), Label::instant(label)?));
        }
        let shape = self.shape();
        let u = self.copy_vertex(o, edge);
        self.copies[o.slot()].fix_parent(&shape, u, Self::copy_label(o, label));
        Ok(())
    }

    /// Parent of the node for `label` on `edge` in copy `o`, as
    /// `(label, edge, weight)` in that copy's label space.
    pub fn sigma(&self, o: Orientation, edge: usize, label: i64) -> Result<Option<(i64, usize, u32)>> {
        self.check_edge(edge)?;
        if !self.edges[edge].contains(&label) {
            return Err(Error::MissingLabel(VertexId(edge as u32), Label::instant(label)?));
        }
        let u = self.copy_vertex(o, edge);
        let s = self.copies[o.slot()].sigma(&self.shape(), u, Self::copy_label(o, label));
        Ok(s.map(|(l, v, w)| {
            let e = if o.leftward() {
                self.n - 2 - v.0 as usize
            } else {
                v.0 as usize
            };
            (l, e, w)
        }))
    }

    /// Earliest arrival at `v_j` departing `v_i` no earlier than `t`.
    pub fn ea(&mut self, i: usize, j: usize, t: TimeValue) -> Result<TimeValue> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Ok(match i.cmp(&j) {
            std::cmp::Ordering::Equal => t,
            std::cmp::Ordering::Less => {
                self.copies[Orientation::Rightward.slot()].up_ea(VertexId(i as u32), (j - i) as u64, t)
            }
            std::cmp::Ordering::Greater => {
                self.copies[Orientation::Leftward.slot()].up_ea(VertexId((self.n - 1 - i) as u32), (i - j) as u64, t)
            }
        })
    }

    /// Latest departure from `v_i` arriving at `v_j` no later than `t`.
    pub fn ld(&mut self, i: usize, j: usize, t: TimeValue) -> Result<TimeValue> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Ok(match i.cmp(&j) {
            std::cmp::Ordering::Equal => t,
            // Mirrored EA from v_j back to v_i.
            std::cmp::Ordering::Less => -self.copies[Orientation::MirrorLeftward.slot()].up_ea(
                VertexId((self.n - 1 - j) as u32),
                (j - i) as u64,
                -t,
            ),
            std::cmp::Ordering::Greater => {
                -self.copies[Orientation::MirrorRightward.slot()].up_ea(VertexId(j as u32), (i - j) as u64, -t)
            }
        })
    }

    pub fn counters(&self, o: Orientation) -> Counters {
        self.copies[o.slot()].counters()
    }

    /// Sum of the counters of all four copies.
    pub fn total_counters(&self) -> Counters {
        Orientation::ALL
            .iter()
            .map(|&o| self.counters(o))
            .fold(Counters::default(), |a, b| a + b)
    }

    pub fn snapshot(&self, o: Orientation) -> Snapshot {
        self.copies[o.slot()].snapshot()
    }

    /// Parent map and per-vertex labels of copy `o`, for validation.
    pub fn view(&self, o: Orientation) -> (PathShape, BTreeMap<VertexId, Vec<Label>>) {
        let mut labels = BTreeMap::new();
        for (i, set) in self.edges.iter().enumerate() {
            let ls = set
                .iter()
                .map(|&l| Label::instant(Self::copy_label(o, l)).expect("validated on insert"))
                .collect();
            labels.insert(self.copy_vertex(o, i), ls);
        }
        (self.shape(), labels)
    }

    #[cfg(test)]
    pub(crate) fn corrupt_detach(&mut self, o: Orientation, edge: usize, label: i64) {
        let u = self.copy_vertex(o, edge);
        self.copies[o.slot()].corrupt_detach(u, Self::copy_label(o, label));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use TimeValue::{Finite, NegInf, PosInf};

    fn sample() -> PathStructure {
        PathStructure::build(&[vec![2, 5], vec![4, 6], vec![1, 6]]).unwrap()
    }

    fn assert_consistent(p: &PathStructure) {
        for o in Orientation::ALL {
            let (shape, labels) = p.view(o);
            let report = oracle::validate(&shape, &labels, &p.snapshot(o));
            assert!(report.is_empty(), "{o:?}: {report:?}");
        }
    }

    #[test]
    fn sample_queries() {
        let mut p = sample();
        assert_consistent(&p);
        assert_eq!(p.ea(0, 3, Finite(1)).unwrap(), Finite(6));
        assert_eq!(p.ea(0, 3, Finite(6)).unwrap(), PosInf);
        assert_eq!(p.ld(0, 3, Finite(6)).unwrap(), Finite(5));
        assert_eq!(p.ea(2, 2, Finite(-4)).unwrap(), Finite(-4));
        assert_eq!(p.ld(1, 1, NegInf).unwrap(), NegInf);
    }

    #[test]
    fn sigma_crosses_to_next_edge() {
        let p = PathStructure::build(&[vec![2], vec![4]]).unwrap();
        assert_eq!(p.sigma(Orientation::Rightward, 0, 2).unwrap(), Some((4, 1, 1)));
        assert_eq!(p.sigma(Orientation::Rightward, 1, 4).unwrap(), None);
    }

    #[test]
    fn trivial_paths() {
        let mut single = PathStructure::new(1).unwrap();
        assert_eq!(single.edge_count(), 0);
        assert!(single.ea(0, 1, Finite(0)).is_err());
        assert_eq!(single.ea(0, 0, Finite(3)).unwrap(), Finite(3));

        let one = PathStructure::build(&[vec![7]]).unwrap();
        for o in Orientation::ALL {
            let s = one.snapshot(o);
            assert_eq!(s.nodes.len(), 1);
            assert!(s.nodes.values().all(|n| n.parent.is_none() && n.children == 0));
        }
    }

    #[test]
    fn add_then_delete_on_inner_edge() {
        let mut p = PathStructure::build(&[vec![1, 4], vec![2, 6], vec![3, 7], vec![2, 6, 9], vec![5, 8]]).unwrap();
        let before: Vec<Snapshot> = Orientation::ALL.iter().map(|&o| p.snapshot(o)).collect();
        p.add_label(3, 5).unwrap();
        assert_consistent(&p);
        p.delete_label(3, 6).unwrap();
        assert_consistent(&p);
        p.add_label(3, 6).unwrap();
        p.delete_label(3, 5).unwrap();
        let after: Vec<Snapshot> = Orientation::ALL.iter().map(|&o| p.snapshot(o)).collect();
        assert_eq!(before, after);
        assert!(p.delete_label(0, 3).is_err());
        assert!(p.add_label(0, 4).is_err());
    }

    #[test]
    fn edges_may_become_empty() {
        let mut p = sample();
        p.delete_label(1, 4).unwrap();
        p.delete_label(1, 6).unwrap();
        assert_consistent(&p);
        assert_eq!(p.ea(0, 3, NegInf).unwrap(), PosInf);
        assert_eq!(p.ld(3, 0, PosInf).unwrap(), NegInf);
        assert_eq!(p.ea(2, 3, Finite(0)).unwrap(), Finite(1));
        assert!(p.delete_label(1, 6).is_err());
    }

    #[test]
    fn fix_parent_is_idempotent() {
        let mut p = sample();
        let before = p.snapshot(Orientation::Leftward);
        let calls = p.counters(Orientation::Leftward).fix_parent;
        p.fix_parent(Orientation::Leftward, 1, 4).unwrap();
        assert_eq!(p.snapshot(Orientation::Leftward), before);
        assert_eq!(p.counters(Orientation::Leftward).fix_parent, calls + 1);
    }

    #[test]
    fn validator_flags_a_detached_node() {
        let mut p = sample();
        p.corrupt_detach(Orientation::Rightward, 0, 2);
        let (shape, labels) = p.view(Orientation::Rightward);
        let report = oracle::validate(&shape, &labels, &p.snapshot(Orientation::Rightward));
        assert_eq!(report.len(), 1, "{report:?}");
        assert_eq!(
            report[0].node,
            Some(crate::instrument::NodeKey::instant(2, VertexId(0)))
        );
    }
}
