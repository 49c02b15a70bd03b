use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::grid::{LabelPlane, UNLABELED};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryIou<T> {
    pub intersection: u64,
    pub union: u64,
    pub iou: T,
}

/// Per-category intersection over union and their mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IouReport<T> {
    pub per_category: BTreeMap<u8, CategoryIou<T>>,
    pub mean_iou: T,
    pub categories_evaluated: BTreeSet<u8>,
}

/// PASCAL-style IoU of `pred` against `gt`.
///
/// Pixels that are void in `gt` are ignored entirely. A category whose
/// union is empty is left out of the report and of the mean.
pub fn iou<T: Scalar>(
    pred: &impl LabelPlane,
    gt: &impl LabelPlane,
    categories: &BTreeSet<u8>,
) -> Result<IouReport<T>, EvalError> {
    if !pred.same_shape(gt) {
        return Err(EvalError::DimensionMismatch {
            left: (pred.width(), pred.height()),
            right: (gt.width(), gt.height()),
        });
    }
    if categories.is_empty() {
        return Err(EvalError::EmptyCategorySet);
    }
    let mut inter = [0u64; 256];
    let mut pred_n = [0u64; 256];
    let mut gt_n = [0u64; 256];
    for (&p, &g) in pred.labels().iter().zip(gt.labels()) {
        if g == UNLABELED {
            continue;
        }
        pred_n[p as usize] += 1;
        gt_n[g as usize] += 1;
        if p == g {
            inter[p as usize] += 1;
        }
    }
    let mut per_category = BTreeMap::new();
    let mut sum = T::zero();
    for &c in categories {
        let i = inter[c as usize];
        let u = pred_n[c as usize] + gt_n[c as usize] - i;
        if u == 0 {
            continue;
        }
        let v = T::from_count(i) / T::from_count(u);
        sum = sum + v;
        per_category.insert(c, CategoryIou { intersection: i, union: u, iou: v });
    }
    if per_category.is_empty() {
        return Err(EvalError::NothingToEvaluate);
    }
    let mean_iou = sum / T::from_count(per_category.len() as u64);
    let categories_evaluated = per_category.keys().copied().collect();
    Ok(IouReport { per_category, mean_iou, categories_evaluated })
}
