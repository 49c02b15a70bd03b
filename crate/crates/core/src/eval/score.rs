use serde::Serialize;

use super::{EvalError, IouReport};
use crate::scalar::Scalar;

/// Minimum mean IoU a checkpoint image needs for its batch to pass.
pub const DEFAULT_CHECKPOINT_THRESHOLD: f64 = 0.70;

/// Expected annotation time: 60 s for the first object plus 30 s for each
/// additional one.
pub fn expected_time<T: Scalar>(objects: u32) -> Result<T, EvalError> {
    if objects == 0 {
        return Err(EvalError::InvalidObjectCount);
    }
    Ok(T::from_count(60 + 30 * (u64::from(objects) - 1)))
}

/// Time bonus multiplier `max(2 + (T - t) / T, 1)`, additionally capped at
/// 2 so finishing early never pays more than finishing on time.
pub fn bonus<T: Scalar>(elapsed: T, objects: u32) -> Result<T, EvalError> {
    if elapsed < T::zero() {
        return Err(EvalError::NegativeTime);
    }
    let expected = expected_time::<T>(objects)?;
    let one = T::one();
    let two = one + one;
    let raw = two + (expected - elapsed) / expected;
    Ok(if raw > two {
        two
    } else if raw < one {
        one
    } else {
        raw
    })
}

/// Base points for an accuracy: `round(100 * mean_iou^3)`.
///
/// Any strictly increasing convex curve fits the intended shape; the cube
/// is this implementation's choice.
pub fn base_score<T: Scalar>(mean_iou: T) -> Result<u32, EvalError> {
    if mean_iou < T::zero() || mean_iou > T::one() {
        return Err(EvalError::OutOfRange);
    }
    let hundred = T::from_count(100);
    Ok((hundred * mean_iou * mean_iou * mean_iou).round_to_i64() as u32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreInput<T> {
    pub mean_iou: T,
    /// Seconds spent on the image.
    pub elapsed: T,
    pub objects: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport<T> {
    pub base_score: u32,
    pub bonus: T,
    /// `floor(base_score * bonus)`.
    pub final_score: u64,
    pub expected_time: T,
}

pub fn final_score<T: Scalar>(input: ScoreInput<T>) -> Result<ScoreReport<T>, EvalError> {
    let base = base_score(input.mean_iou)?;
    let bonus = bonus(input.elapsed, input.objects)?;
    let expected_time = expected_time(input.objects)?;
    let total = T::from_count(u64::from(base)) * bonus;
    Ok(ScoreReport { base_score: base, bonus, final_score: total.floor_to_i64() as u64, expected_time })
}

/// Passes when the mean IoU reaches the threshold (inclusive).
pub fn checkpoint_gate<T: Scalar>(report: &IouReport<T>, threshold: T) -> bool {
    report.mean_iou >= threshold
}
