//! Seeded workload generator.
//!
//! Every generated update satisfies its precondition against the topology
//! built by the updates before it, so a generated trace never has rejected
//! lines on a correct engine.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ForestTopology, Label, TimeValue, Update, VertexId};

use super::trace::Op;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatencyMode {
    /// Every label has arrival equal to departure.
    None,
    /// Every label has latency exactly `d`.
    Uniform(i64),
    /// Latencies drawn uniformly from `0..=max`.
    Random(i64),
}

impl std::str::FromStr for LatencyMode {
    type Err = String;

    /// `none`, `uniform:D` or `random:MAX`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = || {
            arg.parse::<i64>()
                .map_err(|_| format!("invalid latency bound in `{s}`"))
        };
        match kind {
            "none" if arg.is_empty() => Ok(LatencyMode::None),
            "uniform" => Ok(LatencyMode::Uniform(num()?)),
            "random" => Ok(LatencyMode::Random(num()?)),
            _ => Err(format!(
                "invalid latency mode `{s}`; expected none, uniform:D or random:MAX"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Regime {
    /// Any update kind.
    Mixed,
    /// Vertices, links and label additions only.
    Incremental,
    /// A build prefix, then only label deletions, cuts and vertex deletions.
    Decremental,
}

#[derive(Clone, Debug)]
pub struct GenParams {
    /// Number of vertices.
    pub n: u32,
    /// Operations after the vertex prefix (and, when decremental, after the
    /// build prefix).
    pub ops: usize,
    /// Inclusive departure range.
    pub labels: (i64, i64),
    pub latency: LatencyMode,
    pub regime: Regime,
    /// Fraction of generated operations that are queries.
    pub query_ratio: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 16,
            ops: 256,
            labels: (-50, 50),
            latency: LatencyMode::None,
            regime: Regime::Mixed,
            query_ratio: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("infeasible parameters: {0}")]
pub struct GenError(pub String);

impl GenParams {
    fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError(m.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.labels.0 > self.labels.1 {
            return bad("empty label range");
        }
        if !(0.0..=1.0).contains(&self.query_ratio) {
            return bad("query ratio outside [0, 1]");
        }
        let d = match self.latency {
            LatencyMode::None => 0,
            LatencyMode::Uniform(d) | LatencyMode::Random(d) => d,
        };
        if d < 0 {
            return bad("negative latency");
        }
        if self.labels.0 == i64::MIN || self.labels.1.checked_add(d).is_none() {
            return bad("label range overflows");
        }
        Ok(())
    }
}

struct Generator<'a> {
    p: &'a GenParams,
    rng: ChaCha8Rng,
    topo: ForestTopology,
    live: Vec<VertexId>,
    edges: usize,
    next_id: u32,
    out: Vec<Op>,
}

impl Generator<'_> {
    fn label(&mut self) -> Label {
        let dep = self.rng.gen_range(self.p.labels.0..=self.p.labels.1);
        let d = match self.p.latency {
            LatencyMode::None => 0,
            LatencyMode::Uniform(d) => d,
            LatencyMode::Random(max) => self.rng.gen_range(0..=max),
        };
        Label::new(dep, dep + d).expect("range checked")
    }

    fn pick(&mut self) -> Option<VertexId> {
        self.live.choose(&mut self.rng).copied()
    }

    /// A random vertex satisfying `ok`: a few random probes, then a scan
    /// from a random offset.
    fn pick_where(&mut self, ok: impl Fn(&ForestTopology, VertexId) -> bool) -> Option<VertexId> {
        if let Some(v) = (0..8).find_map(|_| self.pick().filter(|&v| ok(&self.topo, v))) {
            return Some(v);
        }
        let n = self.live.len();
        let start = if n == 0 { 0 } else { self.rng.gen_range(0..n) };
        (0..n).map(|i| self.live[(start + i) % n]).find(|&v| ok(&self.topo, v))
    }

    fn time(&mut self) -> TimeValue {
        match self.rng.gen_range(0..40) {
            0 => TimeValue::NegInf,
            1 => TimeValue::PosInf,
            _ => {
                let (lo, hi) = self.p.labels;
                TimeValue::Finite(self.rng.gen_range(lo.saturating_sub(2)..=hi.saturating_add(2)))
            }
        }
    }

    fn query(&mut self) -> Option<Op> {
        let (u, v) = (self.pick()?, self.pick()?);
        Some(match self.rng.gen_range(0..3) {
            0 => Op::Ea(u, v, self.time()),
            1 => Op::Ld(u, v, self.time()),
            _ => {
                let (a, b) = (self.time(), self.time());
                Op::Reach(u, v, a.min(b), a.max(b))
            }
        })
    }

    fn add_vertex(&mut self) -> Option<Update> {
        (self.live.len() < self.p.n as usize).then(|| {
            let v = VertexId(self.next_id);
            self.next_id += 1;
            Update::AddVertex(v)
        })
    }

    fn delete_vertex(&mut self) -> Option<Update> {
        self.pick_where(|t, v| t.is_isolated(v)).map(Update::DeleteVertex)
    }

    fn link(&mut self) -> Option<Update> {
        if self.live.len() - self.edges < 2 {
            return None;
        }
        let child = self.pick_where(|t, v| t.is_root(v))?;
        let parent = self.pick_where(|t, v| t.root_of(v) != child)?;
        Some(Update::Link {
            child,
            parent,
            label: self.label(),
        })
    }

    fn cut(&mut self) -> Option<Update> {
        self.pick_where(|t, v| t.labels(v).len() == 1).map(Update::Cut)
    }

    fn add_label(&mut self) -> Option<Update> {
        let v = self.pick_where(|t, v| !t.is_root(v))?;
        (0..4).find_map(|_| {
            let l = self.label();
            (!self.topo.labels(v).contains(&l)).then_some(Update::AddLabel(v, l))
        })
    }

    fn delete_label(&mut self) -> Option<Update> {
        let v = self.pick_where(|t, v| t.labels(v).len() >= 2)?;
        let ls = self.topo.labels(v);
        let l = *ls.iter().nth(self.rng.gen_range(0..ls.len())).expect("non-empty");
        Some(Update::DeleteLabel(v, l))
    }

    fn emit(&mut self, u: Update) {
        self.topo.apply(&u).expect("generated updates respect preconditions");
        match u {
            Update::AddVertex(v) => self.live.push(v),
            Update::DeleteVertex(v) => {
                let i = self.live.iter().position(|&x| x == v).expect("live");
                self.live.swap_remove(i);
            }
            Update::Link { .. } => self.edges += 1,
            Update::Cut(_) => self.edges -= 1,
            _ => {}
        }
        self.out.push(Op::Update(u));
    }

    fn make(&mut self, kind: Kind) -> Option<Update> {
        match kind {
            Kind::AddVertex => self.add_vertex(),
            Kind::DeleteVertex => self.delete_vertex(),
            Kind::Link => self.link(),
            Kind::Cut => self.cut(),
            Kind::AddLabel => self.add_label(),
            Kind::DeleteLabel => self.delete_label(),
        }
    }

    /// Tries update kinds by weight, falling back through the list.
    fn update(&mut self, weights: &[(u32, Kind)]) -> bool {
        let total: u32 = weights.iter().map(|w| w.0).sum();
        let mut roll = self.rng.gen_range(0..total);
        let mut start = 0;
        while roll >= weights[start].0 {
            roll -= weights[start].0;
            start += 1;
        }
        for k in 0..weights.len() {
            if let Some(u) = self.make(weights[(start + k) % weights.len()].1) {
                self.emit(u);
                return true;
            }
        }
        false
    }

    /// Emits `ops` operations; stops early when no update is possible.
    fn phase(&mut self, ops: usize, weights: &[(u32, Kind)], queries: bool) {
        for _ in 0..ops {
            if queries && self.rng.gen_bool(self.p.query_ratio) {
                if let Some(q) = self.query() {
                    self.out.push(q);
                    continue;
                }
            }
            if !self.update(weights) {
                break;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    AddVertex,
    DeleteVertex,
    Link,
    Cut,
    AddLabel,
    DeleteLabel,
}

const MIXED: &[(u32, Kind)] = &[
    (4, Kind::AddVertex),
    (2, Kind::DeleteVertex),
    (15, Kind::Link),
    (8, Kind::Cut),
    (40, Kind::AddLabel),
    (25, Kind::DeleteLabel),
];
const GROWING: &[(u32, Kind)] = &[(20, Kind::Link), (80, Kind::AddLabel)];
const SHRINKING: &[(u32, Kind)] = &[(70, Kind::DeleteLabel), (25, Kind::Cut), (5, Kind::DeleteVertex)];

/// Generates a trace; identical `(seed, params)` give identical traces.
pub fn generate(seed: u64, params: &GenParams) -> Result<Vec<Op>, GenError> {
    params.check()?;
    let mut g = Generator {
        p: params,
        rng: ChaCha8Rng::seed_from_u64(seed),
        topo: ForestTopology::new(),
        live: Vec::new(),
        edges: 0,
        next_id: 0,
        out: Vec::new(),
    };
    for _ in 0..params.n {
        let u = g.add_vertex().expect("below n");
        g.emit(u);
    }
    match params.regime {
        Regime::Mixed => g.phase(params.ops, MIXED, true),
        Regime::Incremental => g.phase(params.ops, GROWING, true),
        Regime::Decremental => {
            g.phase(params.ops, GROWING, false);
            g.phase(params.ops, SHRINKING, true);
        }
    }
    Ok(g.out)
}
