//! Dynamic temporal forests.
//!
//! A temporal forest is a rooted forest whose edges carry sets of time
//! labels: a label `l` on an edge means the edge can be crossed at time `l`,
//! and a labelled pair `(l, a)` means it can be entered at `l` and left at
//! `a`. A journey crosses the edges of a forest path with non-decreasing
//! times. The structures here maintain such forests under vertex, edge and
//! label updates and answer three queries:
//!
//! * `ea(u, v, t)`: earliest arrival at `v` leaving `u` no earlier than `t`;
//! * `ld(u, v, t)`: latest departure from `u` reaching `v` no later than `t`;
//! * `reach(u, v, td, ta)`: whether some journey leaves at or after `td` and
//!   arrives at or before `ta`.
//!
//! Unreachable targets give `+inf`, `-inf` and `false`.
//!
//! | type | labels | topology | module |
//! |------|--------|----------|--------|
//! | [`forest::TemporalForest`] | instants | dynamic | [`forest`] |
//! | [`latency::LatencyForest`] | pairs | dynamic | [`latency`] |
//! | [`hld::HldForest`] | instants | fixed | [`hld`] |
//! | [`path::PathStructure`] | instants | one path | [`path`] |
//!
//! [`oracle`] holds brute-force answers and a structural validator used by
//! the tests and by the `temporal-forest` binary ([`cli`]).
//!
//! ```
//! use temporal_forest::forest::TemporalForest;
//! use temporal_forest::model::{TimeValue, VertexId};
//!
//! let mut f = TemporalForest::new();
//! for v in 0..3 {
//!     f.add_vertex(VertexId(v)).unwrap();
//! }
//! f.link(VertexId(1), VertexId(0), 4).unwrap();
//! f.link(VertexId(2), VertexId(1), 2).unwrap();
//! assert_eq!(f.ea(VertexId(2), VertexId(0), TimeValue::Finite(1)).unwrap(), TimeValue::Finite(4));
//! assert_eq!(f.ld(VertexId(0), VertexId(2), TimeValue::Finite(9)).unwrap(), TimeValue::NegInf);
//! ```

pub mod cli;
pub mod dynamic_forest;
pub mod error;
pub mod forest;
pub mod hld;
pub mod instrument;
pub mod latency;
pub mod model;
pub mod oracle;
pub mod ordered_index;
pub mod path;
mod successor;
