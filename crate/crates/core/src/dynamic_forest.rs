//! Rooted dynamic forest with 0/1 edge weights.
//!
//! Backed by a link-cut tree: each preferred path is a splay tree keyed by
//! depth, and every node stores the weight of the edge to its parent plus the
//! weight sum of its splay subtree. Weighted level ancestor is a descent over
//! the splay tree of the exposed root path.
//!
//! All bounds are amortized `O(log n)`, and queries restructure the trees, so
//! every method takes `&mut self`. Trees are never re-rooted; `link` always
//! hangs a root below another node.

use crate::error::{Error, Result};

const NIL: u32 = u32::MAX;

/// Stable node identifier. Never reused within one [`DynamicForest`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeHandle(u32);

impl NodeHandle {
    pub fn index(self) -> u32 {
        self.0
    }
}

#[derive(Clone, Debug)]
struct Node {
    ch: [u32; 2],
    /// Splay parent or, for a splay root, the path-parent.
    p: u32,
    /// Weight of the edge to `parent`; zero for roots.
    weight: u32,
    sum: u64,
    parent: u32,
    children: u32,
    alive: bool,
}

/// Operation counters, cumulative since construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForestCounters {
    /// Public operations (add, remove, link, cut, root, parent, dist, lca, wla).
    /// Inspection through [`DynamicForest::edge`] is not counted.
    pub primitives: u64,
    pub rotations: u64,
}

#[derive(Clone, Debug, Default)]
pub struct DynamicForest {
    nodes: Vec<Node>,
    live: usize,
    counters: ForestCounters,
}

impl DynamicForest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of live nodes.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn counters(&self) -> ForestCounters {
        self.counters
    }

    fn check(&self, h: NodeHandle) -> Result<u32> {
        match self.nodes.get(h.0 as usize) {
            Some(n) if n.alive => Ok(h.0),
            _ => Err(Error::InvalidHandle),
        }
    }

    pub fn contains(&self, h: NodeHandle) -> bool {
        self.check(h).is_ok()
    }

    pub fn add_node(&mut self) -> NodeHandle {
        self.counters.primitives += 1;
        assert!(self.nodes.len() < NIL as usize, "node arena exhausted");
        self.nodes.push(Node {
            ch: [NIL, NIL],
            p: NIL,
            weight: 0,
            sum: 0,
            parent: NIL,
            children: 0,
            alive: true,
        });
        self.live += 1;
        NodeHandle((self.nodes.len() - 1) as u32)
    }

    /// Removes an isolated node. The handle becomes invalid.
    pub fn remove_node(&mut self, h: NodeHandle) -> Result<()> {
        self.counters.primitives += 1;
        let x = self.check(h)?;
        let n = &self.nodes[x as usize];
        if n.parent != NIL || n.children != 0 {
            return Err(Error::DynamicNotIsolated);
        }
        debug_assert!(n.ch == [NIL, NIL]);
        self.nodes[x as usize].alive = false;
        self.nodes[x as usize].p = NIL;
        self.live -= 1;
        Ok(())
    }

    /// Hangs root `child` below `parent` with edge weight `w` (0 or 1).
    pub fn link(&mut self, child: NodeHandle, parent: NodeHandle, w: u32) -> Result<()> {
        self.counters.primitives += 1;
        debug_assert!(w <= 1);
        let c = self.check(child)?;
        let p = self.check(parent)?;
        if self.nodes[c as usize].parent != NIL {
            return Err(Error::NotADynamicRoot);
        }
        if self.find_root(p) == c {
            return Err(Error::DynamicSameTree);
        }
        self.access(c);
        let n = &mut self.nodes[c as usize];
        debug_assert!(n.ch[0] == NIL);
        n.weight = w;
        n.p = p;
        n.parent = p;
        self.pull(c);
        self.nodes[p as usize].children += 1;
        Ok(())
    }

    /// Detaches `child` from its parent.
    pub fn cut(&mut self, child: NodeHandle) -> Result<()> {
        self.counters.primitives += 1;
        let c = self.check(child)?;
        let p = self.nodes[c as usize].parent;
        if p == NIL {
            return Err(Error::NoParent);
        }
        self.access(c);
        let l = self.nodes[c as usize].ch[0];
        self.nodes[l as usize].p = NIL;
        let n = &mut self.nodes[c as usize];
        n.ch[0] = NIL;
        n.weight = 0;
        n.parent = NIL;
        self.pull(c);
        self.nodes[p as usize].children -= 1;
        Ok(())
    }

    pub fn root(&mut self, h: NodeHandle) -> Result<NodeHandle> {
        self.counters.primitives += 1;
        let x = self.check(h)?;
        Ok(NodeHandle(self.find_root(x)))
    }

    pub fn parent(&mut self, h: NodeHandle) -> Result<Option<NodeHandle>> {
        self.counters.primitives += 1;
        let x = self.check(h)?;
        let p = self.nodes[x as usize].parent;
        Ok((p != NIL).then_some(NodeHandle(p)))
    }

    /// Parent together with the weight of the edge to it.
    pub fn parent_edge(&mut self, h: NodeHandle) -> Result<Option<(NodeHandle, u32)>> {
        self.counters.primitives += 1;
        self.edge(h)
    }

    /// As [`parent_edge`](Self::parent_edge), for inspection: not counted.
    pub fn edge(&self, h: NodeHandle) -> Result<Option<(NodeHandle, u32)>> {
        let x = self.check(h)?;
        let n = &self.nodes[x as usize];
        Ok((n.parent != NIL).then_some((NodeHandle(n.parent), n.weight)))
    }

    pub fn child_count(&self, h: NodeHandle) -> Result<u32> {
        Ok(self.nodes[self.check(h)? as usize].children)
    }

    /// Weighted distance between `a` and `b`, or `None` across trees.
    pub fn dist(&mut self, a: NodeHandle, b: NodeHandle) -> Result<Option<u64>> {
        self.counters.primitives += 1;
        let (x, y) = (self.check(a)?, self.check(b)?);
        let Some(l) = self.lca_raw(x, y) else {
            return Ok(None);
        };
        let dx = self.depth(x);
        let dy = self.depth(y);
        let dl = self.depth(l);
        Ok(Some(dx + dy - 2 * dl))
    }

    /// Lowest common ancestor, or `None` across trees.
    pub fn lca(&mut self, a: NodeHandle, b: NodeHandle) -> Result<Option<NodeHandle>> {
        self.counters.primitives += 1;
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.lca_raw(x, y).map(NodeHandle))
    }

    /// Deepest ancestor-or-self of `h` at weighted distance at least `w`.
    pub fn wla(&mut self, h: NodeHandle, w: u64) -> Result<Option<NodeHandle>> {
        self.counters.primitives += 1;
        let x = self.check(h)?;
        if w == 0 {
            return Ok(Some(h));
        }
        self.access(x);
        if self.nodes[x as usize].sum < w {
            return Ok(None);
        }
        // Deepest t whose weight plus everything below it on the path reaches w.
        let mut t = x;
        let mut acc = 0u64;
        let found = loop {
            let n = &self.nodes[t as usize];
            let right = acc + self.sum_of(n.ch[1]);
            if right >= w {
                t = n.ch[1];
            } else if right + n.weight as u64 >= w {
                break t;
            } else {
                acc = right + n.weight as u64;
                t = n.ch[0];
            }
        };
        self.splay(found);
        let mut y = self.nodes[found as usize].ch[0];
        if y == NIL {
            return Ok(None);
        }
        while self.nodes[y as usize].ch[1] != NIL {
            y = self.nodes[y as usize].ch[1];
        }
        self.splay(y);
        Ok(Some(NodeHandle(y)))
    }

    /// Weighted depth of `h` (distance to its root).
    pub fn weighted_depth(&mut self, h: NodeHandle) -> Result<u64> {
        let x = self.check(h)?;
        Ok(self.depth(x))
    }

    fn depth(&mut self, x: u32) -> u64 {
        self.access(x);
        self.nodes[x as usize].sum
    }

    fn lca_raw(&mut self, x: u32, y: u32) -> Option<u32> {
        if self.find_root(x) != self.find_root(y) {
            return None;
        }
        self.access(x);
        Some(self.access(y))
    }

    fn find_root(&mut self, x: u32) -> u32 {
        self.access(x);
        let mut r = x;
        while self.nodes[r as usize].ch[0] != NIL {
            r = self.nodes[r as usize].ch[0];
        }
        self.splay(r);
        r
    }

    #[inline]
    fn sum_of(&self, x: u32) -> u64 {
        if x == NIL {
            0
        } else {
            self.nodes[x as usize].sum
        }
    }

    fn pull(&mut self, x: u32) {
        let n = &self.nodes[x as usize];
        let s = self.sum_of(n.ch[0]) + self.sum_of(n.ch[1]) + n.weight as u64;
        self.nodes[x as usize].sum = s;
    }

    #[inline]
    fn is_splay_root(&self, x: u32) -> bool {
        let p = self.nodes[x as usize].p;
        p == NIL || (self.nodes[p as usize].ch[0] != x && self.nodes[p as usize].ch[1] != x)
    }

    fn rotate(&mut self, x: u32) {
        self.counters.rotations += 1;
        let p = self.nodes[x as usize].p;
        let g = self.nodes[p as usize].p;
        let dir = (self.nodes[p as usize].ch[1] == x) as usize;
        let b = self.nodes[x as usize].ch[dir ^ 1];
        if !self.is_splay_root(p) {
            let gd = (self.nodes[g as usize].ch[1] == p) as usize;
            self.nodes[g as usize].ch[gd] = x;
        }
        self.nodes[x as usize].p = g;
        self.nodes[x as usize].ch[dir ^ 1] = p;
        self.nodes[p as usize].p = x;
        self.nodes[p as usize].ch[dir] = b;
        if b != NIL {
            self.nodes[b as usize].p = p;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: u32) {
        while !self.is_splay_root(x) {
            let p = self.nodes[x as usize].p;
            if !self.is_splay_root(p) {
                let g = self.nodes[p as usize].p;
                let zigzig = (self.nodes[g as usize].ch[1] == p) == (self.nodes[p as usize].ch[1] == x);
                self.rotate(if zigzig { p } else { x });
            }
            self.rotate(x);
        }
    }

    /// Makes the root-to-`x` path preferred and splays `x` to its top.
    /// Returns the last node where the exposed path joined an existing one.
    fn access(&mut self, x: u32) -> u32 {
        let mut last = NIL;
        let mut y = x;
        while y != NIL {
            self.splay(y);
            self.nodes[y as usize].ch[1] = last;
            self.pull(y);
            last = y;
            y = self.nodes[y as usize].p;
        }
        self.splay(x);
        last
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Parent-pointer model for differential checks.
    #[derive(Default)]
    struct Naive {
        parent: Vec<Option<(usize, u32)>>,
        alive: Vec<bool>,
    }

    impl Naive {
        fn chain(&self, mut x: usize) -> Vec<(usize, u64)> {
            let mut out = vec![(x, 0)];
            let mut d = 0;
            while let Some((p, w)) = self.parent[x] {
                d += w as u64;
                out.push((p, d));
                x = p;
            }
            out
        }
        fn wla(&self, x: usize, w: u64) -> Option<usize> {
            self.chain(x).into_iter().find(|&(_, d)| d >= w).map(|(y, _)| y)
        }
        fn lca(&self, a: usize, b: usize) -> Option<usize> {
            let ca = self.chain(a);
            let cb: Vec<usize> = self.chain(b).into_iter().map(|(y, _)| y).collect();
            ca.into_iter().map(|(y, _)| y).find(|y| cb.contains(y))
        }
        fn dist(&self, a: usize, b: usize) -> Option<u64> {
            let l = self.lca(a, b)?;
            let da = self.chain(a).into_iter().find(|&(y, _)| y == l)?.1;
            let db = self.chain(b).into_iter().find(|&(y, _)| y == l)?.1;
            Some(da + db)
        }
    }

    fn chain() -> (DynamicForest, Vec<NodeHandle>) {
        let mut f = DynamicForest::new();
        let n: Vec<_> = (0..4).map(|_| f.add_node()).collect();
        f.link(n[0], n[1], 1).unwrap();
        f.link(n[1], n[2], 0).unwrap();
        f.link(n[2], n[3], 0).unwrap();
        (f, n)
    }

    #[test]
    fn weighted_level_ancestor_on_chain() {
        let (mut f, n) = chain();
        let naive = Naive {
            parent: vec![Some((1, 1)), Some((2, 0)), Some((3, 0)), None],
            alive: vec![true; 4],
        };
        for w in 0..3 {
            let got = f.wla(n[0], w).unwrap().map(|h| h.index() as usize);
            assert_eq!(got, naive.wla(0, w), "w = {w}");
        }
        assert_eq!(f.wla(n[0], 1).unwrap(), Some(n[1]));
        assert_eq!(f.wla(n[0], 2).unwrap(), None);
        assert_eq!(f.wla(n[2], 0).unwrap(), Some(n[2]));
        assert_eq!(f.dist(n[0], n[2]).unwrap(), Some(1));
        assert_eq!(f.dist(n[1], n[1]).unwrap(), Some(0));
    }

    #[test]
    fn link_cut_preconditions() {
        let (mut f, n) = chain();
        assert_eq!(f.link(n[3], n[0], 1), Err(Error::DynamicSameTree));
        assert_eq!(f.link(n[0], n[3], 1), Err(Error::NotADynamicRoot));
        assert_eq!(f.cut(n[3]), Err(Error::NoParent));
        assert_eq!(f.remove_node(n[0]), Err(Error::DynamicNotIsolated));
        f.cut(n[0]).unwrap();
        assert_eq!(f.root(n[0]).unwrap(), n[0]);
        assert_eq!(f.lca(n[0], n[1]).unwrap(), None);
        assert_eq!(f.dist(n[0], n[3]).unwrap(), None);
        f.remove_node(n[0]).unwrap();
        assert_eq!(f.parent(n[0]), Err(Error::InvalidHandle));
        let fresh = f.add_node();
        assert_ne!(fresh, n[0]);
        assert_eq!(f.root(fresh).unwrap(), fresh);
    }

    #[test]
    fn unit_weight_hop_distance() {
        let mut f = DynamicForest::new();
        let n: Vec<_> = (0..4).map(|_| f.add_node()).collect();
        for i in 0..3 {
            f.link(n[i], n[i + 1], 1).unwrap();
        }
        let r = f.add_node();
        let s = f.add_node();
        f.link(r, n[3], 1).unwrap();
        f.link(s, n[3], 1).unwrap();
        assert_eq!(f.dist(n[0], n[3]).unwrap(), Some(3));
        assert_eq!(f.lca(r, s).unwrap(), Some(n[3]));
        assert_eq!(f.lca(n[0], s).unwrap(), Some(n[3]));
        assert_eq!(f.lca(n[1], n[1]).unwrap(), Some(n[1]));
    }

    fn check_against(f: &mut DynamicForest, handles: &[NodeHandle], naive: &Naive) {
        let alive: Vec<usize> = (0..handles.len()).filter(|&i| naive.alive[i]).collect();
        for &a in &alive {
            let h = handles[a];
            let max = naive.chain(a).last().map_or(0, |x| x.1);
            for w in 0..=max + 1 {
                let got = f.wla(h, w).unwrap().map(|x| x.index() as usize);
                assert_eq!(got, naive.wla(a, w));
            }
            let root = naive.chain(a).last().unwrap().0;
            assert_eq!(f.root(h).unwrap().index() as usize, root);
            assert_eq!(
                f.parent(h).unwrap().map(|x| x.index() as usize),
                naive.parent[a].map(|x| x.0)
            );
        }
        for &a in alive.iter().step_by(3) {
            for &b in alive.iter().step_by(2) {
                let got = f.lca(handles[a], handles[b]).unwrap().map(|x| x.index() as usize);
                assert_eq!(got, naive.lca(a, b));
                assert_eq!(f.dist(handles[a], handles[b]).unwrap(), naive.dist(a, b));
            }
        }
    }

    #[test]
    fn agrees_with_parent_pointer_walks() {
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f = DynamicForest::new();
            let mut naive = Naive::default();
            let mut handles = Vec::new();
            for step in 0..600 {
                let live: Vec<usize> = (0..handles.len()).filter(|&i| naive.alive[i]).collect();
                match rng.gen_range(0..10) {
                    0 | 1 if live.len() < 200 => {
                        handles.push(f.add_node());
                        naive.parent.push(None);
                        naive.alive.push(true);
                    }
                    2..=5 if live.len() >= 2 => {
                        let c = live[rng.gen_range(0..live.len())];
                        let p = live[rng.gen_range(0..live.len())];
                        let w = rng.gen_range(0..2);
                        let ok = naive.parent[c].is_none() && naive.chain(p).last().unwrap().0 != c;
                        assert_eq!(f.link(handles[c], handles[p], w).is_ok(), ok);
                        if ok {
                            naive.parent[c] = Some((p, w));
                        }
                    }
                    6 | 7 if !live.is_empty() => {
                        let c = live[rng.gen_range(0..live.len())];
                        assert_eq!(f.cut(handles[c]).is_ok(), naive.parent[c].is_some());
                        naive.parent[c] = None;
                    }
                    8 if !live.is_empty() => {
                        let c = live[rng.gen_range(0..live.len())];
                        let isolated = naive.parent[c].is_none()
                            && !naive
                                .parent
                                .iter()
                                .enumerate()
                                .any(|(i, p)| naive.alive[i] && p.is_some_and(|x| x.0 == c));
                        assert_eq!(f.remove_node(handles[c]).is_ok(), isolated);
                        if isolated {
                            naive.alive[c] = false;
                        }
                    }
                    _ => {}
                }
                if step % 7 == 0 {
                    check_against(&mut f, &handles, &naive);
                }
            }
            check_against(&mut f, &handles, &naive);
        }
    }

    #[test]
    fn rotations_are_amortized_logarithmic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1 << 12;
        let mut f = DynamicForest::new();
        let h: Vec<_> = (0..n).map(|_| f.add_node()).collect();
        // A long path plus random attachments, then random queries.
        for i in 1..n {
            let p = if i % 4 == 0 { rng.gen_range(0..i) } else { i - 1 };
            f.link(h[i], h[p], rng.gen_range(0..2)).unwrap();
        }
        for _ in 0..4 * n {
            let a = h[rng.gen_range(0..n)];
            let b = h[rng.gen_range(0..n)];
            match rng.gen_range(0..3) {
                0 => {
                    let _ = f.lca(a, b).unwrap();
                }
                1 => {
                    let _ = f.wla(a, rng.gen_range(0..8)).unwrap();
                }
                _ => {
                    let _ = f.dist(a, b).unwrap();
                }
            }
        }
        let c = f.counters();
        let per_op = c.rotations as f64 / c.primitives as f64;
        let bound = 12.0 * (1.0 + (n as f64).log2());
        assert!(per_op <= bound, "{per_op} rotations per op exceeds {bound}");
    }
}
