use super::{ClusterMap, EngineError};
use crate::grid::{LabelPlane, TraceRaster, UNLABELED};

/// Labels each cluster with the category holding the most trace pixels
/// inside it (sampled as seeds or not) and paints the cluster with it.
///
/// Ties go to the smaller category id. A cluster without any trace pixel
/// cannot come out of [`super::grow_clusters`]; if one is passed in anyway
/// its pixels stay [`UNLABELED`].
pub fn vote_clusters(clusters: &ClusterMap, trace: &TraceRaster) -> Result<Vec<u8>, EngineError> {
    if clusters.width() != trace.width() || clusters.height() != trace.height() {
        return Err(EngineError::DimensionMismatch {
            left: (clusters.width(), clusters.height()),
            right: (trace.width(), trace.height()),
        });
    }
    let categories = trace
        .labels()
        .iter()
        .filter(|&&l| l != UNLABELED)
        .map(|&l| l as usize + 1)
        .max()
        .unwrap_or(0);
    let k = clusters.cluster_count() as usize;
    let mut tally = vec![0u32; k * categories];
    for (&id, &label) in clusters.ids().iter().zip(trace.labels()) {
        if label != UNLABELED {
            tally[id as usize * categories + label as usize] += 1;
        }
    }
    let winners: Vec<u8> = (0..k)
        .map(|c| {
            let row = &tally[c * categories..(c + 1) * categories];
            let mut best = UNLABELED;
            let mut best_votes = 0;
            for (cat, &votes) in row.iter().enumerate() {
                if votes > best_votes {
                    best = cat as u8;
                    best_votes = votes;
                }
            }
            best
        })
        .collect();
    Ok(clusters.ids().iter().map(|&id| winners[id as usize]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::to_lab;
    use crate::engine::{grow_clusters, RgrConfig, Seed};
    use crate::grid::RgbImage;

    // A single-cluster map over a 4x4 grid with the given trace pixels.
    fn one_cluster(labels: &[(u32, u32, u8)]) -> (ClusterMap, TraceRaster) {
        let img = RgbImage::from_fn(4, 4, |_, _| [10, 10, 10]);
        let lab = to_lab::<f64>(&img);
        let (x, y, label) = labels[0];
        let map = grow_clusters(&lab, &[Seed { x, y, label }], &RgrConfig::default()).unwrap();
        let mut trace = TraceRaster::empty(4, 4);
        for &(x, y, l) in labels {
            trace.set(x, y, l);
        }
        (map, trace)
    }

    fn count_oracle(labels: &[(u32, u32, u8)]) -> u8 {
        let mut hist = [0usize; 256];
        for &(_, _, l) in labels {
            hist[l as usize] += 1;
        }
        let max = *hist.iter().max().unwrap();
        hist.iter().position(|&h| h == max).unwrap() as u8
    }

    #[test]
    fn strict_majority() {
        let px: Vec<(u32, u32, u8)> =
            (0..5).map(|i| (i % 4, i / 4, 1)).chain((5..7).map(|i| (i % 4, i / 4, 3))).collect();
        let (map, trace) = one_cluster(&px);
        assert!(vote_clusters(&map, &trace).unwrap().iter().all(|&l| l == 1));
    }

    #[test]
    fn single_voter() {
        let (map, trace) = one_cluster(&[(2, 2, 7)]);
        assert!(vote_clusters(&map, &trace).unwrap().iter().all(|&l| l == 7));
    }

    #[test]
    fn tie_goes_to_smaller_category() {
        let px: Vec<(u32, u32, u8)> = (0..6).map(|i| (i % 4, i / 4, if i % 2 == 0 { 4 } else { 2 })).collect();
        assert_eq!(count_oracle(&px), 2);
        let (map, trace) = one_cluster(&px);
        assert!(vote_clusters(&map, &trace).unwrap().iter().all(|&l| l == 2));
    }

    #[test]
    fn non_seed_trace_pixels_vote_too() {
        // Two clusters split by color; the right one is seeded with label 0
        // but contains three unsampled pixels of label 5.
        let img = RgbImage::from_fn(6, 2, |x, _| if x < 3 { [0, 0, 0] } else { [250, 250, 250] });
        let lab = to_lab::<f64>(&img);
        let seeds = [Seed { x: 0, y: 0, label: 1 }, Seed { x: 5, y: 1, label: 0 }];
        let map = grow_clusters(&lab, &seeds, &RgrConfig::default()).unwrap();
        let mut trace = TraceRaster::empty(6, 2);
        trace.set(0, 0, 1);
        trace.set(5, 1, 0);
        for x in 3..6 {
            trace.set(x, 0, 5);
        }
        let labels = vote_clusters(&map, &trace).unwrap();
        assert_eq!(&labels[..6], &[1, 1, 1, 5, 5, 5]);
        assert_eq!(&labels[6..], &[1, 1, 1, 5, 5, 5]);
    }

    #[test]
    fn dimension_mismatch() {
        let (map, _) = one_cluster(&[(0, 0, 1)]);
        let trace = TraceRaster::empty(3, 4);
        assert!(matches!(vote_clusters(&map, &trace), Err(EngineError::DimensionMismatch { .. })));
    }
}
