use crate::model::{Label, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rejected operations. Every variant leaves the structure that produced it unchanged.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("vertex id {0} is reserved")]
    ReservedVertex(VertexId),
    #[error("vertex {0} is not isolated")]
    NotIsolated(VertexId),
    #[error("vertex {0} is not a root")]
    NotARoot(VertexId),
    #[error("vertices {0} and {1} are in the same tree")]
    SameTree(VertexId, VertexId),
    #[error("vertex {0} has no edge to a parent")]
    NotAnEdge(VertexId),
    #[error("cut of edge above {0} requires exactly one label, found {1}")]
    MultiLabelCut(VertexId, usize),
    #[error("duplicate label {1} on edge above {0}")]
    DuplicateLabel(VertexId, Label),
    #[error("label {1} not present on edge above {0}")]
    MissingLabel(VertexId, Label),
    #[error("last label requires cut (edge above {0})")]
    LastLabelRequiresCut(VertexId),
    #[error("arrival {arr} precedes departure {dep}")]
    NegativeLatency { dep: i64, arr: i64 },
    #[error("label value {0} out of range")]
    LabelOutOfRange(i64),
    #[error("this engine does not support latencies")]
    LatencyUnsupported,
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("key already present")]
    DuplicateKey,
    #[error("key not present")]
    MissingKey,
    #[error("invalid node handle")]
    InvalidHandle,
    #[error("node has a parent")]
    NotADynamicRoot,
    #[error("node has no parent")]
    NoParent,
    #[error("nodes are in the same tree")]
    DynamicSameTree,
    #[error("node is not isolated")]
    DynamicNotIsolated,
    #[error("tree rooted at {0} is not a path")]
    NotPathShaped(VertexId),
    #[error("structure corrupted: {0}")]
    Corrupt(String),
}
