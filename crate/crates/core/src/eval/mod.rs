//! Overlap metrics, the timed game score, checkpoint gating and
//! multi-annotator consensus.

mod consensus;
mod iou;
mod score;

pub use consensus::{consensus_counts, consensus_majority, ConsensusMap};
pub use iou::{iou, CategoryIou, IouReport};
pub use score::{
    base_score, bonus, checkpoint_gate, expected_time, final_score, ScoreInput, ScoreReport,
    DEFAULT_CHECKPOINT_THRESHOLD,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("no categories requested")]
    EmptyCategorySet,
    #[error("none of the requested categories occurs in either mask")]
    NothingToEvaluate,
    #[error("object count must be at least 1")]
    InvalidObjectCount,
    #[error("elapsed time must be non-negative")]
    NegativeTime,
    #[error("value outside [0, 1]")]
    OutOfRange,
    #[error("no masks given")]
    EmptyList,
}
