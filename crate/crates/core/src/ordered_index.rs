//! Ordered indexes with predecessor/successor and monotone-predicate search.
//!
//! Everything here sits on [`Treap`], an arena-backed treap whose nodes carry
//! a subtree aggregate. Three instantiations are used by the structures:
//!
//! * [`LabelIndex`]: the labels of one edge, each pointing at its successor-forest node.
//! * [`BlockIndex`]: successor-forest nodes grouped under a common parent vertex,
//!   keyed lexicographically.
//! * [`PairIndex`]: `(departure, arrival)` pairs of one edge with the two
//!   range-extremum queries the latency structure needs.
//!
//! Priorities come from a fixed-seed generator, so shapes (and therefore the
//! probe counters) are reproducible.

use std::cell::Cell;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::TimeValue;

const NIL: u32 = u32::MAX;

/// Subtree summary maintained by a [`Treap`].
pub trait Aggregate<K, V> {
    type Value: Copy;
    fn empty() -> Self::Value;
    fn single(key: &K, value: &V) -> Self::Value;
    fn combine(a: Self::Value, b: Self::Value) -> Self::Value;
}

/// No aggregate.
#[derive(Clone, Debug)]
pub struct Plain;

impl<K, V> Aggregate<K, V> for Plain {
    type Value = ();
    fn empty() {}
    fn single(_: &K, _: &V) {}
    fn combine(_: (), _: ()) {}
}

#[derive(Clone, Debug)]
struct Node<K, V, S> {
    key: K,
    value: V,
    prio: u64,
    left: u32,
    right: u32,
    agg: S,
}

/// Ordered map with expected `O(log n)` operations.
#[derive(Clone, Debug)]
pub struct Treap<K, V, A: Aggregate<K, V> = Plain> {
    nodes: Vec<Node<K, V, A::Value>>,
    free: Vec<u32>,
    root: u32,
    len: usize,
    rng: u64,
    probes: Cell<u64>,
}

impl<K: Ord + Copy, V: Copy, A: Aggregate<K, V>> Default for Treap<K, V, A> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Copy, V: Copy, A: Aggregate<K, V>> Treap<K, V, A> {
    pub fn new() -> Self {
        Treap {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            len: 0,
            rng: 0x9E37_79B9_7F4A_7C15,
            probes: Cell::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Nodes visited by all operations so far.
    pub fn probes(&self) -> u64 {
        self.probes.get()
    }

    #[inline]
    fn probe(&self) {
        self.probes.set(self.probes.get() + 1);
    }

    fn next_prio(&mut self) -> u64 {
        // splitmix64
        self.rng = self.rng.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.rng;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn agg(&self, t: u32) -> A::Value {
        if t == NIL {
            A::empty()
        } else {
            self.nodes[t as usize].agg
        }
    }

    fn pull(&mut self, t: u32) {
        let n = &self.nodes[t as usize];
        let (l, r) = (n.left, n.right);
        let own = A::single(&n.key, &n.value);
        let agg = A::combine(A::combine(self.agg(l), own), self.agg(r));
        self.nodes[t as usize].agg = agg;
    }

    /// Splits `t` into the keys where `right_of` is false and those where it
    /// is true. `right_of` must be monotone over the key order.
    fn split_by(&mut self, t: u32, right_of: &impl Fn(&K) -> bool) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        self.probe();
        if right_of(&self.nodes[t as usize].key) {
            let l = self.nodes[t as usize].left;
            let (a, b) = self.split_by(l, right_of);
            self.nodes[t as usize].left = b;
            self.pull(t);
            (a, t)
        } else {
            let r = self.nodes[t as usize].right;
            let (a, b) = self.split_by(r, right_of);
            self.nodes[t as usize].right = a;
            self.pull(t);
            (t, b)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        self.probe();
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let r = self.nodes[a as usize].right;
            let m = self.merge(r, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            let l = self.nodes[b as usize].left;
            let m = self.merge(a, l);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }

    fn find(&self, key: &K) -> u32 {
        let mut t = self.root;
        while t != NIL {
            self.probe();
            let n = &self.nodes[t as usize];
            t = match key.cmp(&n.key) {
                Ordering::Less => n.left,
                Ordering::Greater => n.right,
                Ordering::Equal => return t,
            };
        }
        NIL
    }

    pub fn contains(&self, key: &K) -> bool {
        self.find(key) != NIL
    }

    pub fn get(&self, key: &K) -> Option<V> {
        match self.find(key) {
            NIL => None,
            t => Some(self.nodes[t as usize].value),
        }
    }

    /// Inserts a new key; fails if it is already present.
    pub fn insert(&mut self, key: K, value: V) -> Result<()> {
        if self.contains(&key) {
            return Err(Error::DuplicateKey);
        }
        let prio = self.next_prio();
        let node = Node {
            key,
            value,
            prio,
            left: NIL,
            right: NIL,
            agg: A::single(&key, &value),
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        let (a, b) = self.split_by(self.root, &|k| *k > key);
        let m = self.merge(a, id);
        self.root = self.merge(m, b);
        self.len += 1;
        Ok(())
    }

    /// Removes `key`, returning its value; fails if it is absent.
    pub fn remove(&mut self, key: &K) -> Result<V> {
        if !self.contains(key) {
            return Err(Error::MissingKey);
        }
        let (a, rest) = self.split_by(self.root, &|k| k >= key);
        let (mid, b) = self.split_by(rest, &|k| k > key);
        debug_assert!(mid != NIL && self.nodes[mid as usize].left == NIL && self.nodes[mid as usize].right == NIL);
        let value = self.nodes[mid as usize].value;
        self.free.push(mid);
        self.root = self.merge(a, b);
        self.len -= 1;
        Ok(value)
    }

    /// Last entry for which `pred` holds, where `pred` is true on a prefix of the order.
    pub fn last_where(&self, mut pred: impl FnMut(&K, &V) -> bool) -> Option<(K, V)> {
        let mut t = self.root;
        let mut best = NIL;
        while t != NIL {
            self.probe();
            let n = &self.nodes[t as usize];
            if pred(&n.key, &n.value) {
                best = t;
                t = n.right;
            } else {
                t = n.left;
            }
        }
        (best != NIL).then(|| {
            let n = &self.nodes[best as usize];
            (n.key, n.value)
        })
    }

    /// First entry for which `pred` holds, where `pred` is true on a suffix of the order.
    pub fn first_where(&self, mut pred: impl FnMut(&K, &V) -> bool) -> Option<(K, V)> {
        let mut t = self.root;
        let mut best = NIL;
        while t != NIL {
            self.probe();
            let n = &self.nodes[t as usize];
            if pred(&n.key, &n.value) {
                best = t;
                t = n.left;
            } else {
                t = n.right;
            }
        }
        (best != NIL).then(|| {
            let n = &self.nodes[best as usize];
            (n.key, n.value)
        })
    }

    /// Aggregate over the prefix of keys satisfying `pred` (true on a prefix).
    pub fn prefix_aggregate(&self, pred: impl Fn(&K) -> bool) -> A::Value {
        let mut acc = A::empty();
        let mut t = self.root;
        while t != NIL {
            self.probe();
            let n = &self.nodes[t as usize];
            if pred(&n.key) {
                acc = A::combine(A::combine(acc, self.agg(n.left)), A::single(&n.key, &n.value));
                t = n.right;
            } else {
                t = n.left;
            }
        }
        acc
    }

    /// Aggregate over the suffix of keys satisfying `pred` (true on a suffix).
    pub fn suffix_aggregate(&self, pred: impl Fn(&K) -> bool) -> A::Value {
        let mut acc = A::empty();
        let mut t = self.root;
        while t != NIL {
            self.probe();
            let n = &self.nodes[t as usize];
            if pred(&n.key) {
                acc = A::combine(A::combine(A::single(&n.key, &n.value), self.agg(n.right)), acc);
                t = n.left;
            } else {
                t = n.right;
            }
        }
        acc
    }

    pub fn total(&self) -> A::Value {
        self.agg(self.root)
    }

    pub fn first(&self) -> Option<(K, V)> {
        self.first_where(|_, _| true)
    }

    pub fn last(&self) -> Option<(K, V)> {
        self.last_where(|_, _| true)
    }

    /// Smallest key `>= key` (`strict`: `> key`).
    pub fn succ(&self, key: &K, strict: bool) -> Option<(K, V)> {
        if strict {
            self.first_where(|k, _| k > key)
        } else {
            self.first_where(|k, _| k >= key)
        }
    }

    /// Largest key `<= key` (`strict`: `< key`).
    pub fn pred(&self, key: &K, strict: bool) -> Option<(K, V)> {
        if strict {
            self.last_where(|k, _| k < key)
        } else {
            self.last_where(|k, _| k <= key)
        }
    }

    /// All entries in key order.
    pub fn entries(&self) -> Vec<(K, V)> {
        let mut out = Vec::with_capacity(self.len);
        let mut stack = Vec::new();
        let mut t = self.root;
        while t != NIL || !stack.is_empty() {
            while t != NIL {
                stack.push(t);
                t = self.nodes[t as usize].left;
            }
            let x = stack.pop().expect("non-empty");
            let n = &self.nodes[x as usize];
            out.push((n.key, n.value));
            t = n.right;
        }
        out
    }

    pub fn keys(&self) -> Vec<K> {
        self.entries().into_iter().map(|(k, _)| k).collect()
    }

    /// Height of the tree, for instrumentation.
    pub fn height(&self) -> usize {
        fn h<K, V, S>(nodes: &[Node<K, V, S>], t: u32) -> usize {
            if t == NIL {
                0
            } else {
                let n = &nodes[t as usize];
                1 + h(nodes, n.left).max(h(nodes, n.right))
            }
        }
        h(&self.nodes, self.root)
    }
}

/// Which neighbour [`neighbor`] looks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Succ,
    Pred,
}

/// Successor or predecessor of `key`, optionally strict.
pub fn neighbor<K: Ord + Copy, V: Copy, A: Aggregate<K, V>>(
    index: &Treap<K, V, A>,
    key: &K,
    side: Side,
    strict: bool,
) -> Option<K> {
    match side {
        Side::Succ => index.succ(key, strict),
        Side::Pred => index.pred(key, strict),
    }
    .map(|(k, _)| k)
}

/// Labels of one edge, each carrying a payload (a successor-forest node).
pub type LabelIndex<V> = Treap<i64, V>;

/// Successor-forest nodes under one parent vertex, ordered lexicographically.
pub type BlockIndex<K, V> = Treap<K, V>;

/// `(departure, arrival)` key ordered departure-major.
type DepKey = (i64, i64);
/// `(arrival, departure)` key ordered arrival-major.
type ArrKey = (i64, i64);

/// Minimum arrival over a subtree; ties go to the larger departure.
#[derive(Clone, Debug)]
pub struct MinArrival;

impl<V> Aggregate<DepKey, V> for MinArrival {
    /// `(arrival, departure)` of the best pair, or `None`.
    type Value = Option<(i64, i64)>;
    fn empty() -> Self::Value {
        None
    }
    fn single(k: &DepKey, _: &V) -> Self::Value {
        Some((k.1, k.0))
    }
    fn combine(a: Self::Value, b: Self::Value) -> Self::Value {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => {
                let better = match x.0.cmp(&y.0) {
                    Ordering::Less => x,
                    Ordering::Greater => y,
                    Ordering::Equal => {
                        if x.1 >= y.1 {
                            x
                        } else {
                            y
                        }
                    }
                };
                Some(better)
            }
        }
    }
}

/// Maximum departure over a subtree.
#[derive(Clone, Debug)]
pub struct MaxDeparture;

impl<V> Aggregate<ArrKey, V> for MaxDeparture {
    type Value = Option<i64>;
    fn empty() -> Self::Value {
        None
    }
    fn single(k: &ArrKey, _: &V) -> Self::Value {
        Some(k.1)
    }
    fn combine(a: Self::Value, b: Self::Value) -> Self::Value {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(x.max(y)),
        }
    }
}

/// `(departure, arrival)` pairs of one edge with range-extremum queries.
///
/// Two treaps over the same pairs: one departure-major with a min-arrival
/// aggregate, one arrival-major with a max-departure aggregate.
#[derive(Clone, Debug)]
pub struct PairIndex<V: Copy> {
    by_dep: Treap<DepKey, V, MinArrival>,
    by_arr: Treap<ArrKey, V, MaxDeparture>,
}

impl<V: Copy> Default for PairIndex<V> {
    fn default() -> Self {
        PairIndex {
            by_dep: Treap::new(),
            by_arr: Treap::new(),
        }
    }
}

impl<V: Copy> PairIndex<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_dep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dep.is_empty()
    }

    pub fn probes(&self) -> u64 {
        self.by_dep.probes() + self.by_arr.probes()
    }

    pub fn insert(&mut self, dep: i64, arr: i64, value: V) -> Result<()> {
        if arr < dep {
            return Err(Error::NegativeLatency { dep, arr });
        }
        self.by_dep.insert((dep, arr), value)?;
        self.by_arr.insert((arr, dep), value).expect("indexes in sync");
        Ok(())
    }

    pub fn remove(&mut self, dep: i64, arr: i64) -> Result<V> {
        let v = self.by_dep.remove(&(dep, arr))?;
        self.by_arr.remove(&(arr, dep)).expect("indexes in sync");
        Ok(v)
    }

    pub fn get(&self, dep: i64, arr: i64) -> Option<V> {
        self.by_dep.get(&(dep, arr))
    }

    /// Among pairs with departure `>= min_departure`, one with minimum
    /// arrival, ties broken towards the largest departure. Returns `(dep, arr, value)`.
    pub fn min_arrival(&self, min_departure: TimeValue) -> Option<(i64, i64, V)> {
        let (arr, dep) = self.by_dep.suffix_aggregate(|k| min_departure.le_int(k.0))?;
        let v = self.by_dep.get(&(dep, arr)).expect("aggregate names a stored pair");
        Some((dep, arr, v))
    }

    /// Largest departure among pairs with arrival strictly below `bound`.
    pub fn max_departure_below(&self, bound: TimeValue) -> Option<i64> {
        self.by_arr
            .prefix_aggregate(|k| bound.cmp_int(k.0) == Ordering::Greater)
    }

    /// Largest departure among pairs with arrival `<= bound`.
    pub fn max_departure_at_most(&self, bound: i64) -> Option<i64> {
        self.by_arr.prefix_aggregate(|k| k.0 <= bound)
    }

    /// Last pair in arrival-major order satisfying `pred`, which must be
    /// true on a prefix of that order. Returns `(dep, arr, value)`.
    pub fn last_by_arrival_where(&self, mut pred: impl FnMut(i64, i64, V) -> bool) -> Option<(i64, i64, V)> {
        self.by_arr
            .last_where(|k, v| pred(k.1, k.0, *v))
            .map(|(k, v)| (k.1, k.0, v))
    }

    /// Largest departure among pairs up to `(arr, dep)` in arrival-major order.
    pub fn max_departure_through(&self, arr: i64, dep: i64) -> Option<i64> {
        self.by_arr.prefix_aggregate(|k| *k <= (arr, dep))
    }

    /// Pairs in arrival-major order, as `(dep, arr, value)`.
    pub fn entries_by_arrival(&self) -> Vec<(i64, i64, V)> {
        self.by_arr.entries().into_iter().map(|((a, d), v)| (d, a, v)).collect()
    }

    /// All pairs in departure-major order with their values.
    pub fn entries(&self) -> Vec<(i64, i64, V)> {
        self.by_dep.entries().into_iter().map(|((d, a), v)| (d, a, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set(keys: &[i64]) -> Treap<i64, ()> {
        let mut t = Treap::new();
        for &k in keys {
            t.insert(k, ()).unwrap();
        }
        t
    }

    #[test]
    fn insert_delete_and_neighbors() {
        let mut t = set(&[2, 5]);
        t.insert(4, ()).unwrap();
        assert_eq!(t.keys(), vec![2, 4, 5]);
        t.remove(&4).unwrap();
        assert_eq!(t.remove(&4), Err(Error::MissingKey));
        assert_eq!(t.insert(5, ()), Err(Error::DuplicateKey));
        assert_eq!(t.keys(), vec![2, 5]);

        assert_eq!(neighbor(&t, &3, Side::Succ, false), Some(5));
        assert_eq!(neighbor(&t, &5, Side::Succ, true), None);
        assert_eq!(neighbor(&t, &5, Side::Succ, false), Some(5));
        assert_eq!(neighbor(&t, &3, Side::Pred, false), Some(2));
        assert_eq!(neighbor(&t, &2, Side::Pred, true), None);
    }

    fn pairs(list: &[(i64, i64)]) -> PairIndex<()> {
        let mut p = PairIndex::new();
        for &(d, a) in list {
            p.insert(d, a, ()).unwrap();
        }
        p
    }

    // Linear-scan references for the two pair queries.
    fn scan_min_arrival(list: &[(i64, i64)], min_dep: TimeValue) -> Option<(i64, i64)> {
        list.iter()
            .copied()
            .filter(|&(d, _)| min_dep.le_int(d))
            .min_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
    }

    fn scan_max_departure(list: &[(i64, i64)], bound: TimeValue) -> Option<i64> {
        list.iter()
            .filter(|&&(_, a)| bound.cmp_int(a) == Ordering::Greater)
            .map(|&(d, _)| d)
            .max()
    }

    #[test]
    fn min_arrival_examples() {
        let list = [(3, 9), (4, 6), (5, 5)];
        let p = pairs(&list);
        let got = p.min_arrival(TimeValue::Finite(3)).map(|(d, a, _)| (d, a));
        assert_eq!(got, scan_min_arrival(&list, TimeValue::Finite(3)));
        assert_eq!(got, Some((5, 5)));

        let tie = [(4, 6), (5, 6)];
        let p = pairs(&tie);
        let got = p.min_arrival(TimeValue::Finite(4)).map(|(d, a, _)| (d, a));
        assert_eq!(got, scan_min_arrival(&tie, TimeValue::Finite(4)));
        assert_eq!(got, Some((5, 6)));

        assert!(pairs(&list).min_arrival(TimeValue::Finite(10)).is_none());
    }

    #[test]
    fn max_departure_examples() {
        let list = [(3, 9), (4, 6), (5, 5)];
        let p = pairs(&list);
        for (bound, want) in [
            (TimeValue::Finite(6), Some(5)),
            (TimeValue::Finite(5), None),
            (TimeValue::PosInf, Some(5)),
        ] {
            assert_eq!(scan_max_departure(&list, bound), want);
            assert_eq!(p.max_departure_below(bound), want);
        }
    }

    #[test]
    fn pair_index_rejects_inverted_pairs() {
        let mut p = PairIndex::<()>::new();
        assert!(p.insert(5, 4, ()).is_err());
        assert!(p.is_empty());
    }

    #[test]
    fn probes_are_logarithmic() {
        let mut t: Treap<i64, ()> = Treap::new();
        let mut x: i64 = 12345;
        let n = 1 << 14;
        let mut worst = 0;
        for _ in 0..n {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let before = t.probes();
            let _ = t.insert(x >> 16, ());
            worst = worst.max(t.probes() - before);
        }
        let bound = 8.0 * (1.0 + (t.len() as f64).log2());
        assert!((worst as f64) <= bound, "worst {worst} > {bound}");
        let before = t.probes();
        let _ = t.succ(&0, false);
        assert!(((t.probes() - before) as f64) <= bound);
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(ops in proptest::collection::vec((any::<bool>(), -40i64..40), 0..300),
                                probe in -45i64..45) {
            let mut t: Treap<i64, ()> = Treap::new();
            let mut reference = BTreeSet::new();
            for (ins, k) in ops {
                if ins {
                    prop_assert_eq!(t.insert(k, ()).is_ok(), reference.insert(k));
                } else {
                    prop_assert_eq!(t.remove(&k).is_ok(), reference.remove(&k));
                }
            }
            prop_assert_eq!(t.keys(), reference.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(neighbor(&t, &probe, Side::Succ, false), reference.range(probe..).next().copied());
            prop_assert_eq!(neighbor(&t, &probe, Side::Succ, true), reference.range(probe + 1..).next().copied());
            prop_assert_eq!(neighbor(&t, &probe, Side::Pred, false), reference.range(..=probe).next_back().copied());
            prop_assert_eq!(neighbor(&t, &probe, Side::Pred, true), reference.range(..probe).next_back().copied());
        }

        #[test]
        fn pair_queries_match_scan(raw in proptest::collection::btree_set((-30i64..30, 0i64..10), 0..120),
                                   bound in -35i64..45) {
            let list: Vec<(i64, i64)> = raw.into_iter().map(|(d, lat)| (d, d + lat)).collect::<BTreeSet<_>>().into_iter().collect();
            let p = pairs(&list);
            for b in [TimeValue::NegInf, TimeValue::Finite(bound), TimeValue::PosInf] {
                prop_assert_eq!(p.min_arrival(b).map(|(d, a, _)| (d, a)), scan_min_arrival(&list, b));
                prop_assert_eq!(p.max_departure_below(b), scan_max_departure(&list, b));
            }
            prop_assert_eq!(p.max_departure_at_most(bound),
                list.iter().filter(|x| x.1 <= bound).map(|x| x.0).max());
        }
    }
}
