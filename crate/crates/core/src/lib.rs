//! Higher-order (k,h)-truss decomposition.
//!
//! An edge's h-support counts the vertices within `h` hops of both of its
//! endpoints. The h-trussness `t(e,h)` of an edge is the largest `k` such that
//! some subgraph containing the edge gives every one of its edges an
//! in-subgraph h-support of at least `k - 2`.
//!
//! Two independent engines compute it:
//!
//! * [`peel`]: sequential bin-sort peeling, the reference result.
//! * [`hindex`]: a parallel fixed-point iteration over per-edge H-indices,
//!   with synchronous, asynchronous and pruned execution modes.

pub mod bench;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hindex;
pub mod io;
mod parallel;
pub mod peel;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{build_graph, EdgeId, EdgeMask, Graph, HSupportArray, VertexId};
pub use hindex::{EngineConfig, FixpointEngine};
pub use peel::TrussnessResult;
pub use stats::{Mode, RunStats};

/// Runs one decomposition mode to completion: peeling, or the fixed-point
/// engine in the given mode.
pub fn decompose(
    g: &Graph,
    mode: Mode,
    h: u32,
    workers: usize,
) -> Result<(TrussnessResult, RunStats)> {
    bench::run_mode(g, mode, h, workers, None)
}
