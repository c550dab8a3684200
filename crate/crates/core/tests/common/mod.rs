#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use temporal_forest::forest::replay;
use temporal_forest::model::{ForestTopology, Label, TimeValue, Update, VertexId};

pub const QUERY_TIMES: [TimeValue; 9] = [
    TimeValue::NegInf,
    TimeValue::Finite(-6),
    TimeValue::Finite(-4),
    TimeValue::Finite(-1),
    TimeValue::Finite(0),
    TimeValue::Finite(2),
    TimeValue::Finite(5),
    TimeValue::Finite(6),
    TimeValue::PosInf,
];

pub const REACH_WINDOWS: [(TimeValue, TimeValue); 6] = [
    (TimeValue::NegInf, TimeValue::PosInf),
    (TimeValue::Finite(-3), TimeValue::Finite(2)),
    (TimeValue::Finite(0), TimeValue::Finite(0)),
    (TimeValue::Finite(1), TimeValue::Finite(5)),
    (TimeValue::Finite(-6), TimeValue::Finite(-5)),
    (TimeValue::Finite(4), TimeValue::Finite(3)),
];

/// Every parent array on `n` vertices where vertex `i` hangs below a vertex
/// `< i` or is a root.
pub fn shapes(n: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for s in &out {
            let mut root = s.clone();
            root.push(None);
            next.push(root);
            for p in 0..i {
                let mut t = s.clone();
                t.push(Some(p));
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Builds a topology from a parent array, renaming vertex `i` to `ids[i]`
/// and drawing 1..=3 distinct labels per edge from `[-5, 5]` with latencies
/// up to `max_latency`.
pub fn instance(shape: &[Option<usize>], rng: &mut ChaCha8Rng, max_latency: i64) -> ForestTopology {
    let mut ids: Vec<u32> = (0..shape.len() as u32).collect();
    ids.shuffle(rng);
    let mut topo = ForestTopology::new();
    for &id in &ids {
        topo.apply(&Update::AddVertex(VertexId(id))).unwrap();
    }
    for (i, p) in shape.iter().enumerate() {
        let Some(p) = *p else { continue };
        let k = rng.gen_range(1..=3);
        let mut labels = Vec::new();
        while labels.len() < k {
            let dep = rng.gen_range(-5..=5);
            let l = Label::new(dep, dep + rng.gen_range(0..=max_latency)).unwrap();
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
        let (c, pv) = (VertexId(ids[i]), VertexId(ids[p]));
        topo.apply(&Update::Link {
            child: c,
            parent: pv,
            label: labels[0],
        })
        .unwrap();
        for l in &labels[1..] {
            topo.apply(&Update::AddLabel(c, *l)).unwrap();
        }
    }
    topo
}

/// Forests on up to six vertices, `per_shape` labelings of each shape.
pub fn family(per_shape: usize, max_latency: i64, seed: u64) -> Vec<ForestTopology> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in 1..=6 {
        for s in shapes(n) {
            for _ in 0..per_shape {
                out.push(instance(&s, &mut rng, max_latency));
            }
        }
    }
    out
}

/// Whether the whole topology is a single undirected path.
pub fn is_path(topo: &ForestTopology) -> bool {
    let n = topo.vertex_count();
    let edges = topo.vertices().filter(|&v| !topo.is_root(v)).count();
    let degree_ok = topo
        .vertices()
        .all(|v| topo.children(v).count() + usize::from(!topo.is_root(v)) <= 2);
    n > 0 && edges == n - 1 && degree_ok
}

pub fn replay_into(engine: &mut dyn temporal_forest::cli::Engine, topo: &ForestTopology) {
    for u in replay(topo) {
        engine.apply(&u).unwrap();
    }
}

/// Random tree on `n` vertices; `window` bounds how far back a parent may be
/// (`None` for uniform over all earlier vertices).
pub fn random_tree(n: u32, window: Option<u32>, rng: &mut ChaCha8Rng) -> ForestTopology {
    let mut topo = ForestTopology::new();
    for v in 0..n {
        topo.apply(&Update::AddVertex(VertexId(v))).unwrap();
    }
    for v in 1..n {
        let lo = window.map_or(0, |w| v.saturating_sub(w));
        let p = rng.gen_range(lo..v);
        let l = rng.gen_range(-1000..=1000);
        topo.apply(&Update::Link {
            child: VertexId(v),
            parent: VertexId(p),
            label: Label::instant(l).unwrap(),
        })
        .unwrap();
    }
    topo
}
