//! Uniform interface over every structure and the oracle.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forest::{TemporalForest, Twin};
use crate::hld::HldForest;
use crate::instrument::Counters;
use crate::latency::LatencyForest;
use crate::model::{ForestTopology, TimeValue, Update, VertexId};
use crate::oracle;
use crate::path::{Orientation, PathStructure};

use super::trace::Op;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum EngineKind {
    Forest,
    Latency,
    Hld,
    Path,
    Oracle,
}

impl EngineKind {
    pub fn build(self) -> Box<dyn Engine> {
        match self {
            EngineKind::Forest => Box::new(TemporalForest::new()),
            EngineKind::Latency => Box::new(LatencyForest::new()),
            EngineKind::Hld => Box::new(HldEngine::default()),
            EngineKind::Path => Box::new(PathEngine::default()),
            EngineKind::Oracle => Box::new(OracleEngine::default()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Forest => "forest",
            EngineKind::Latency => "latency",
            EngineKind::Hld => "hld",
            EngineKind::Path => "path",
            EngineKind::Oracle => "oracle",
        }
    }
}

pub trait Engine {
    fn apply(&mut self, update: &Update) -> Result<()>;
    fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue>;
    fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue>;
    fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool>;
    fn topology(&self) -> &ForestTopology;

    /// Structural inconsistencies, one message each; always empty for
    /// engines without auxiliary structure.
    fn validate(&self) -> Vec<String> {
        Vec::new()
    }

    /// FixParent calls, rewires and dynamic-forest primitives so far.
    fn counters(&self) -> Counters {
        Counters::default()
    }

    /// Runs one op; queries return their output token.
    fn execute(&mut self, op: &Op) -> Result<Option<String>> {
        Ok(match *op {
            Op::Update(ref u) => {
                self.apply(u)?;
                None
            }
            Op::Ea(u, v, t) => Some(self.ea(u, v, t)?.to_string()),
            Op::Ld(u, v, t) => Some(self.ld(u, v, t)?.to_string()),
            Op::Reach(u, v, td, ta) => Some(self.reach(u, v, td, ta)?.to_string()),
        })
    }
}

fn validate_twins(topo: &ForestTopology, snap: impl Fn(Twin) -> crate::instrument::Snapshot) -> Vec<String> {
    let mut out = Vec::new();
    for (twin, name, mirrored) in [(Twin::Forward, "forward", false), (Twin::Mirror, "mirror", true)] {
        let labels = oracle::label_map(topo, mirrored);
        out.extend(
            oracle::validate(topo, &labels, &snap(twin))
                .into_iter()
                .map(|m| format!("{name}: {m}")),
        );
    }
    out
}

impl Engine for TemporalForest {
    fn apply(&mut self, update: &Update) -> Result<()> {
        TemporalForest::apply(self, update)
    }
    fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        TemporalForest::ea(self, u, v, t)
    }
    fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        TemporalForest::ld(self, u, v, t)
    }
    fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        TemporalForest::reach(self, u, v, td, ta)
    }
    fn topology(&self) -> &ForestTopology {
        TemporalForest::topology(self)
    }
    fn validate(&self) -> Vec<String> {
        validate_twins(self.topology(), |t| self.snapshot(t))
    }
    fn counters(&self) -> Counters {
        TemporalForest::counters(self, Twin::Forward) + TemporalForest::counters(self, Twin::Mirror)
    }
}

impl Engine for LatencyForest {
    fn apply(&mut self, update: &Update) -> Result<()> {
        LatencyForest::apply(self, update)
    }
    fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        LatencyForest::ea(self, u, v, t)
    }
    fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        LatencyForest::ld(self, u, v, t)
    }
    fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        LatencyForest::reach(self, u, v, td, ta)
    }
    fn topology(&self) -> &ForestTopology {
        LatencyForest::topology(self)
    }
    fn validate(&self) -> Vec<String> {
        validate_twins(self.topology(), |t| self.snapshot(t))
    }
    fn counters(&self) -> Counters {
        LatencyForest::counters(self, Twin::Forward) + LatencyForest::counters(self, Twin::Mirror)
    }
}

fn require_instant(update: &Update) -> Result<()> {
    match update {
        Update::Link { label, .. } | Update::AddLabel(_, label) | Update::DeleteLabel(_, label)
            if label.dep != label.arr =>
        {
            Err(Error::LatencyUnsupported)
        }
        _ => Ok(()),
    }
}

fn known(topo: &ForestTopology, v: VertexId) -> Result<()> {
    if topo.contains(v) {
        Ok(())
    } else {
        Err(Error::UnknownVertex(v))
    }
}

fn validate_path(p: &PathStructure, what: &str) -> Vec<String> {
    let mut out = Vec::new();
    for o in Orientation::ALL {
        let (shape, labels) = p.view(o);
        out.extend(
            oracle::validate(&shape, &labels, &p.snapshot(o))
                .into_iter()
                .map(|m| format!("{what} {o:?}: {m}")),
        );
    }
    out
}

/// Heavy-path engine; the decomposition is rebuilt on the first query after
/// a topology change.
#[derive(Clone, Debug, Default)]
pub struct HldEngine {
    topo: ForestTopology,
    built: Option<HldForest>,
}

impl HldEngine {
    fn forest(&mut self) -> Result<&mut HldForest> {
        if self.built.is_none() {
            self.built = Some(HldForest::build(&self.topo)?);
        }
        Ok(self.built.as_mut().expect("just built"))
    }
}

impl Engine for HldEngine {
    fn apply(&mut self, update: &Update) -> Result<()> {
        require_instant(update)?;
        self.topo.check(update)?;
        match (update, self.built.as_mut()) {
            (Update::AddLabel(v, l), Some(f)) => f.add_label(*v, l.dep)?,
            (Update::DeleteLabel(v, l), Some(f)) => f.delete_label(*v, l.dep)?,
            (Update::AddLabel(..) | Update::DeleteLabel(..), None) => {}
            _ => self.built = None,
        }
        self.topo.apply_unchecked(update);
        Ok(())
    }
    fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        self.forest()?.ea(u, v, t)
    }
    fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        self.forest()?.ld(u, v, t)
    }
    fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        self.forest()?.reach(u, v, td, ta)
    }
    fn topology(&self) -> &ForestTopology {
        &self.topo
    }
    fn validate(&self) -> Vec<String> {
        let Some(f) = &self.built else {
            return Vec::new();
        };
        (0..f.path_count())
            .flat_map(|i| validate_path(f.path_structure(i), &format!("path {i}")))
            .collect()
    }
    fn counters(&self) -> Counters {
        self.built.as_ref().map_or_else(Counters::default, |f| {
            (0..f.path_count())
                .map(|i| f.path_structure(i).total_counters())
                .fold(Counters::default(), |a, b| a + b)
        })
    }
}

#[derive(Clone, Debug)]
struct BuiltPath {
    structure: PathStructure,
    position: HashMap<VertexId, usize>,
    /// Path edge index of the edge above each non-root vertex.
    edge: HashMap<VertexId, usize>,
}

/// Single-path engine. Queries fail with [`Error::NotPathShaped`] unless the
/// whole topology is one path.
#[derive(Clone, Debug, Default)]
pub struct PathEngine {
    topo: ForestTopology,
    built: Option<BuiltPath>,
}

fn neighbours(topo: &ForestTopology, v: VertexId) -> Vec<VertexId> {
    topo.parent(v).into_iter().chain(topo.children(v)).collect()
}

fn build_path(topo: &ForestTopology) -> Result<BuiltPath> {
    let Some(start) = topo.vertices().find(|&v| neighbours(topo, v).len() <= 1) else {
        return Err(Error::NotPathShaped(topo.vertices().next().unwrap_or(VertexId(0))));
    };
    let mut order = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let ns = neighbours(topo, cur);
        if ns.len() > 2 {
            return Err(Error::NotPathShaped(cur));
        }
        match ns.into_iter().find(|&x| Some(x) != prev) {
            Some(next) => {
                order.push(next);
                prev = Some(cur);
                cur = next;
            }
            None => break,
        }
    }
    if order.len() != topo.vertex_count() {
        let stray = topo
            .vertices()
            .find(|v| !order.contains(v))
            .expect("vertex off the path");
        return Err(Error::NotPathShaped(stray));
    }
    let mut sets = Vec::with_capacity(order.len() - 1);
    let mut edge = HashMap::new();
    for (i, w) in order.windows(2).enumerate() {
        let child = if topo.parent(w[0]) == Some(w[1]) { w[0] } else { w[1] };
        edge.insert(child, i);
        sets.push(topo.labels(child).iter().map(|l| l.dep).collect());
    }
    Ok(BuiltPath {
        structure: PathStructure::build(&sets)?,
        position: order.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
        edge,
    })
}

impl PathEngine {
    fn positions(&mut self, u: VertexId, v: VertexId) -> Result<(&mut PathStructure, usize, usize)> {
        known(&self.topo, u)?;
        known(&self.topo, v)?;
        if self.built.is_none() {
            self.built = Some(build_path(&self.topo)?);
        }
        let b = self.built.as_mut().expect("just built");
        Ok((&mut b.structure, b.position[&u], b.position[&v]))
    }
}

impl Engine for PathEngine {
    fn apply(&mut self, update: &Update) -> Result<()> {
        require_instant(update)?;
        self.topo.check(update)?;
        match (update, self.built.as_mut()) {
            (Update::AddLabel(v, l), Some(b)) => b.structure.add_label(b.edge[v], l.dep)?,
            (Update::DeleteLabel(v, l), Some(b)) => b.structure.delete_label(b.edge[v], l.dep)?,
            (Update::AddLabel(..) | Update::DeleteLabel(..), None) => {}
            _ => self.built = None,
        }
        self.topo.apply_unchecked(update);
        Ok(())
    }
    fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        let (p, i, j) = self.positions(u, v)?;
        p.ea(i, j, t)
    }
    fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        let (p, i, j) = self.positions(u, v)?;
        p.ld(i, j, t)
    }
    fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        if u == v {
            known(&self.topo, u)?;
            return Ok(td <= ta);
        }
        let a = self.ea(u, v, td)?;
        Ok(a != TimeValue::PosInf && a <= ta)
    }
    fn topology(&self) -> &ForestTopology {
        &self.topo
    }
    fn validate(&self) -> Vec<String> {
        self.built
            .as_ref()
            .map_or_else(Vec::new, |b| validate_path(&b.structure, "path"))
    }
    fn counters(&self) -> Counters {
        self.built
            .as_ref()
            .map_or_else(Counters::default, |b| b.structure.total_counters())
    }
}

/// Brute-force reference over the plain topology.
#[derive(Clone, Debug, Default)]
pub struct OracleEngine {
    topo: ForestTopology,
}

impl OracleEngine {
    pub fn new(topo: ForestTopology) -> Self {
        OracleEngine { topo }
    }
}

impl Engine for OracleEngine {
    fn apply(&mut self, update: &Update) -> Result<()> {
        self.topo.apply(update)
    }
    fn ea(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        oracle::ea(&self.topo, u, v, t)
    }
    fn ld(&mut self, u: VertexId, v: VertexId, t: TimeValue) -> Result<TimeValue> {
        oracle::ld(&self.topo, u, v, t)
    }
    fn reach(&mut self, u: VertexId, v: VertexId, td: TimeValue, ta: TimeValue) -> Result<bool> {
        oracle::reach(&self.topo, u, v, td, ta)
    }
    fn topology(&self) -> &ForestTopology {
        &self.topo
    }
}

/// Whether `kind` accepts labels with latency.
pub fn supports_latency(kind: EngineKind) -> bool {
    matches!(kind, EngineKind::Latency | EngineKind::Oracle)
}
