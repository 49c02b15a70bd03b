use super::EvalError;
use crate::grid::{LabelMask, LabelPlane};

/// Per-pixel number of annotators that chose one category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusMap {
    pub width: u32,
    pub height: u32,
    pub category: u8,
    pub counts: Vec<u32>,
    pub annotator_total: u32,
}

fn check(masks: &[LabelMask]) -> Result<&LabelMask, EvalError> {
    let first = masks.first().ok_or(EvalError::EmptyList)?;
    if let Some(m) = masks.iter().find(|m| !m.same_shape(first)) {
        return Err(EvalError::DimensionMismatch {
            left: (first.width(), first.height()),
            right: (m.width(), m.height()),
        });
    }
    Ok(first)
}

pub fn consensus_counts(masks: &[LabelMask], category: u8) -> Result<ConsensusMap, EvalError> {
    let first = check(masks)?;
    let mut counts = vec![0u32; first.labels().len()];
    for m in masks {
        for (c, &l) in counts.iter_mut().zip(m.labels()) {
            *c += u32::from(l == category);
        }
    }
    Ok(ConsensusMap {
        width: first.width(),
        height: first.height(),
        category,
        counts,
        annotator_total: masks.len() as u32,
    })
}

/// Per-pixel mode across annotators, ties toward the smaller label.
pub fn consensus_majority(masks: &[LabelMask]) -> Result<LabelMask, EvalError> {
    let first = check(masks)?;
    let mut out = first.clone();
    let mut hist = [0u32; 256];
    for (p, slot) in out.labels_mut().iter_mut().enumerate() {
        hist.fill(0);
        for m in masks {
            hist[m.labels()[p] as usize] += 1;
        }
        let mut best = 0usize;
        for (l, &n) in hist.iter().enumerate() {
            if n > hist[best] {
                best = l;
            }
        }
        *slot = best as u8;
    }
    Ok(out)
}
