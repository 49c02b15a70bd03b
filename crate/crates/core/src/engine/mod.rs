//! Monte Carlo seeded region growing.
//!
//! One refinement runs a fixed number of independent iterations. Each
//! iteration samples a subset of the labeled trace pixels as seeds, grows
//! one cluster per seed over the whole image without looking at labels,
//! then labels every cluster by majority vote over the trace pixels it
//! contains. The per-pixel fraction of iterations voting for each category
//! forms the likelihood tensor; its argmax is the output mask.

mod config;
mod frontier;
mod grow;
mod likelihood;
mod refine;
mod seeds;
mod vote;

pub use config::{Connectivity, RgrConfig};
pub use grow::{grow_clusters, ClusterMap};
pub use likelihood::LikelihoodTensor;
pub use refine::{iteration_stream_seed, refine, run_iteration, Refinement};
pub use seeds::{sample_seeds, seed_count, Seed};
pub use vote::vote_clusters;

#[cfg(any(test, feature = "test-hooks"))]
#[doc(hidden)]
pub use grow::grow_clusters_frozen;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("trace contains no labeled pixels")]
    EmptyTrace,
    #[error("no seeds to grow from")]
    NoSeeds,
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("seed at ({x}, {y}) lies outside the {width}x{height} image")]
    SeedOutOfBounds { x: u32, y: u32, width: u32, height: u32 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
