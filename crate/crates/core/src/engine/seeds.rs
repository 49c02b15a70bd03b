use rand::Rng;

use super::EngineError;
use crate::grid::{LabelPlane, TraceRaster, UNLABELED};

/// A sampled trace pixel together with its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seed {
    pub x: u32,
    pub y: u32,
    pub label: u8,
}

/// `max(1, round(fraction * labeled))`, clamped to `labeled`.
pub fn seed_count(labeled: usize, fraction: f64) -> usize {
    let n = (fraction * labeled as f64).round() as usize;
    n.max(1).min(labeled)
}

/// Uniformly samples seeds without replacement from the labeled pixels.
///
/// Seeds come back in row-major order, which fixes the cluster ids used
/// for tie-breaking during growth.
pub fn sample_seeds<R: Rng + ?Sized>(
    trace: &TraceRaster,
    fraction: f64,
    rng: &mut R,
) -> Result<Vec<Seed>, EngineError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(EngineError::InvalidConfig("seed fraction must lie in (0, 1]"));
    }
    let labeled: Vec<usize> = trace
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != UNLABELED)
        .map(|(i, _)| i)
        .collect();
    if labeled.is_empty() {
        return Err(EngineError::EmptyTrace);
    }
    let amount = seed_count(labeled.len(), fraction);
    let mut picked = rand::seq::index::sample(rng, labeled.len(), amount).into_vec();
    picked.sort_unstable();
    let w = trace.width() as usize;
    Ok(picked
        .into_iter()
        .map(|k| {
            let i = labeled[k];
            Seed { x: (i % w) as u32, y: (i / w) as u32, label: trace.labels()[i] }
        })
        .collect())
}
