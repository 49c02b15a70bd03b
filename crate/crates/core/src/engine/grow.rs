use super::frontier::{pack, unpack, Frontier};
use super::{EngineError, RgrConfig, Seed};
use crate::color::LabColorPlane;
use crate::scalar::Real;

/// Assignment of every pixel to one grown cluster. Cluster `k` was grown
/// from the `k`-th seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMap {
    width: u32,
    height: u32,
    ids: Vec<u32>,
    count: u32,
}

impl ClusterMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cluster_count(&self) -> u32 {
        self.count
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn id(&self, x: u32, y: u32) -> u32 {
        self.ids[y as usize * self.width as usize + x as usize]
    }
}

fn key<T: Real>(dist: T, cluster: u32, pixel: u32) -> u128 {
    let d = dist.to_f64().unwrap_or(f64::INFINITY);
    debug_assert!(d >= 0.0);
    // Non-negative IEEE doubles order like their bit patterns.
    pack(d.to_bits(), cluster, pixel)
}

struct Centroid<T> {
    x: T,
    y: T,
    lab: [T; 3],
    n: T,
}

const NONE: u32 = u32::MAX;

/// Grows one cluster per seed with a priority flood.
///
/// The queue starts with every seed at distance zero. Popping the smallest
/// `(distance, cluster id, pixel)` commits an uncommitted pixel to that
/// cluster, folds it into the cluster's running position/color mean and
/// pushes its uncommitted 4-neighbors with the distance to the updated
/// mean. Growth stops when the queue drains, at which point every pixel is
/// committed.
pub fn grow_clusters<T: Real>(
    lab: &LabColorPlane<T>,
    seeds: &[Seed],
    config: &RgrConfig<T>,
) -> Result<ClusterMap, EngineError> {
    let spatial = config.spatial_scale_for(lab.width(), lab.height());
    grow(lab, seeds, config.color_scale, spatial, true)
}

/// Same flood with each cluster's centroid fixed at its seed.
#[cfg(any(test, feature = "test-hooks"))]
#[doc(hidden)]
pub fn grow_clusters_frozen<T: Real>(
    lab: &LabColorPlane<T>,
    seeds: &[Seed],
    config: &RgrConfig<T>,
) -> Result<ClusterMap, EngineError> {
    let spatial = config.spatial_scale_for(lab.width(), lab.height());
    grow(lab, seeds, config.color_scale, spatial, false)
}

fn grow<T: Real>(
    lab: &LabColorPlane<T>,
    seeds: &[Seed],
    color_scale: T,
    spatial_scale: T,
    update_centroids: bool,
) -> Result<ClusterMap, EngineError> {
    let (w, h) = (lab.width(), lab.height());
    if seeds.is_empty() {
        return Err(EngineError::NoSeeds);
    }
    if let Some(s) = seeds.iter().find(|s| s.x >= w || s.y >= h) {
        return Err(EngineError::SeedOutOfBounds { x: s.x, y: s.y, width: w, height: h });
    }
    let n = w as usize * h as usize;
    let values = lab.values();

    let mut centroids: Vec<Centroid<T>> = Vec::with_capacity(seeds.len());
    let mut frontier = Frontier::new(n);
    for (k, s) in seeds.iter().enumerate() {
        let p = s.y as usize * w as usize + s.x as usize;
        centroids.push(Centroid {
            x: T::lit(f64::from(s.x)),
            y: T::lit(f64::from(s.y)),
            lab: values[p],
            n: T::zero(),
        });
        frontier.offer(key(T::zero(), k as u32, p as u32));
    }

    // Squared distance; it orders entries exactly like the distance itself.
    let inv_s2 = T::one() / (spatial_scale * spatial_scale);
    let inv_m2 = T::one() / (color_scale * color_scale);
    let distance2 = |c: &Centroid<T>, x: usize, y: usize, p: usize| -> T {
        let dx = T::lit(x as f64) - c.x;
        let dy = T::lit(y as f64) - c.y;
        let v = values[p];
        let (d0, d1, d2) = (v[0] - c.lab[0], v[1] - c.lab[1], v[2] - c.lab[2]);
        (dx * dx + dy * dy) * inv_s2 + (d0 * d0 + d1 * d1 + d2 * d2) * inv_m2
    };

    let mut ids = vec![NONE; n];
    let mut committed = 0usize;
    let w = w as usize;
    let h = h as usize;
    while let Some(top) = frontier.pop() {
        let (cluster, pixel) = unpack(top);
        let p = pixel as usize;
        ids[p] = cluster;
        committed += 1;
        if committed == n {
            break;
        }
        let (x, y) = (p % w, p / w);
        let c = &mut centroids[cluster as usize];
        if update_centroids {
            let v = values[p];
            c.n = c.n + T::one();
            let r = T::one() / c.n;
            c.x = c.x + (T::lit(x as f64) - c.x) * r;
            c.y = c.y + (T::lit(y as f64) - c.y) * r;
            for (m, &value) in c.lab.iter_mut().zip(&v) {
                *m = *m + (value - *m) * r;
            }
        }
        let c = &centroids[cluster as usize];
        let mut visit = |qx: usize, qy: usize| {
            let q = qy * w + qx;
            if ids[q] != NONE {
                return;
            }
            frontier.offer(key(distance2(c, qx, qy, q), cluster, q as u32));
        };
        if x > 0 {
            visit(x - 1, y);
        }
        if x + 1 < w {
            visit(x + 1, y);
        }
        if y > 0 {
            visit(x, y - 1);
        }
        if y + 1 < h {
            visit(x, y + 1);
        }
    }
    debug_assert_eq!(committed, n, "4-connected flood reaches every pixel");

    Ok(ClusterMap { width: w as u32, height: h as u32, ids, count: seeds.len() as u32 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::to_lab;
    use crate::grid::RgbImage;
    use proptest::prelude::*;

    /// Scan-based flood: at every step commit the smallest
    /// (distance, cluster, pixel) over all uncommitted pixels that are a
    /// seed or touch a committed pixel, with distances to the frozen seed
    /// centroid. Quadratic and heap-free.
    fn frozen_oracle(lab: &LabColorPlane<f64>, seeds: &[Seed], theta_m: f64, theta_s: f64) -> Vec<u32> {
        let (w, h) = (lab.width() as i64, lab.height() as i64);
        let n = (w * h) as usize;
        let mut owner: Vec<Option<u32>> = vec![None; n];
        let d = |k: usize, x: i64, y: i64| {
            let s = seeds[k];
            let ds2 = ((x - s.x as i64).pow(2) + (y - s.y as i64).pow(2)) as f64;
            let (a, b) = (lab.at(x as u32, y as u32), lab.at(s.x, s.y));
            let dc2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
            // Squared form of sqrt((ds/theta_s)^2 + (dc/theta_m)^2).
            ds2 * (1.0 / (theta_s * theta_s)) + dc2 * (1.0 / (theta_m * theta_m))
        };
        for _ in 0..n {
            let mut best: Option<(f64, u32, usize)> = None;
            for y in 0..h {
                for x in 0..w {
                    let p = (y * w + x) as usize;
                    if owner[p].is_some() {
                        continue;
                    }
                    let mut candidates: Vec<u32> = seeds
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.x as i64 == x && s.y as i64 == y)
                        .map(|(k, _)| k as u32)
                        .collect();
                    for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
                        if nx >= 0 && ny >= 0 && nx < w && ny < h {
                            if let Some(k) = owner[(ny * w + nx) as usize] {
                                candidates.push(k);
                            }
                        }
                    }
                    for k in candidates {
                        let is_seed = seeds[k as usize].x as i64 == x && seeds[k as usize].y as i64 == y;
                        let dist = if is_seed { 0.0 } else { d(k as usize, x, y) };
                        let cand = (dist, k, p);
                        let better = match best {
                            None => true,
                            Some(b) => cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2)),
                        };
                        if better {
                            best = Some(cand);
                        }
                    }
                }
            }
            let (_, k, p) = best.expect("some pixel is reachable");
            owner[p] = Some(k);
        }
        owner.into_iter().map(Option::unwrap).collect()
    }

    fn seed(x: u32, y: u32) -> Seed {
        Seed { x, y, label: 0 }
    }

    #[test]
    fn uniform_image_single_seed_floods_everything() {
        let img = RgbImage::from_fn(9, 7, |_, _| [90, 120, 30]);
        let lab = to_lab::<f64>(&img);
        let map = grow_clusters(&lab, &[seed(4, 3)], &RgrConfig::default()).unwrap();
        assert_eq!(map.cluster_count(), 1);
        assert!(map.ids().iter().all(|&k| k == 0));
    }

    #[test]
    fn two_tone_splits_at_color_boundary() {
        let img = RgbImage::from_fn(4, 4, |x, _| if x < 2 { [0, 0, 0] } else { [255, 255, 255] });
        let lab = to_lab::<f64>(&img);
        let seeds = [seed(1, 1), seed(2, 2)];
        let cfg = RgrConfig::default();
        let expected: Vec<u32> = (0..16).map(|i| u32::from(i % 4 >= 2)).collect();
        let grown = grow_clusters(&lab, &seeds, &cfg).unwrap();
        assert_eq!(grown.ids(), expected.as_slice());
        let frozen = grow_clusters_frozen(&lab, &seeds, &cfg).unwrap();
        assert_eq!(frozen.ids(), expected.as_slice());
        let oracle = frozen_oracle(&lab, &seeds, cfg.color_scale, cfg.spatial_scale_for(4, 4));
        assert_eq!(oracle, expected);
    }

    // Uniform color, seeds at opposite corners: nearer seed wins, the
    // anti-diagonal ties go to cluster 0.
    #[test]
    fn opposite_corners_split_by_distance() {
        let img = RgbImage::from_fn(6, 6, |_, _| [200, 10, 10]);
        let lab = to_lab::<f64>(&img);
        let seeds = [seed(0, 0), seed(5, 5)];
        let cfg = RgrConfig::default();
        let map = grow_clusters_frozen(&lab, &seeds, &cfg).unwrap();
        for y in 0..6u32 {
            for x in 0..6u32 {
                let d0 = f64::from(x * x + y * y);
                let d1 = f64::from((5 - x) * (5 - x) + (5 - y) * (5 - y));
                let want = if d0 <= d1 { 0 } else { 1 };
                assert_eq!(map.id(x, y), want, "({x},{y})");
            }
        }
        let oracle = frozen_oracle(&lab, &seeds, cfg.color_scale, cfg.spatial_scale_for(6, 6));
        assert_eq!(map.ids(), oracle.as_slice());
    }

    #[test]
    fn errors() {
        let lab = to_lab::<f32>(&RgbImage::from_fn(3, 3, |_, _| [0, 0, 0]));
        let cfg = RgrConfig::default();
        assert_eq!(grow_clusters(&lab, &[], &cfg), Err(EngineError::NoSeeds));
        assert!(matches!(
            grow_clusters(&lab, &[seed(3, 0)], &cfg),
            Err(EngineError::SeedOutOfBounds { .. })
        ));
    }

    #[test]
    fn every_seed_keeps_its_pixel() {
        let img = RgbImage::from_fn(16, 12, |x, y| [(x * 15) as u8, (y * 20) as u8, ((x ^ y) * 9) as u8]);
        let lab = to_lab::<f32>(&img);
        let seeds: Vec<Seed> = (0..10).map(|i| seed((i * 7) % 16, (i * 5) % 12)).collect();
        let mut uniq = seeds.clone();
        uniq.sort();
        uniq.dedup();
        let map = grow_clusters(&lab, &uniq, &RgrConfig::default()).unwrap();
        for (k, s) in uniq.iter().enumerate() {
            assert_eq!(map.id(s.x, s.y), k as u32);
        }
    }

    fn grid_strategy() -> impl Strategy<Value = (u32, u32, Vec<[u8; 3]>, Vec<usize>)> {
        (1u32..=8, 1u32..=8).prop_flat_map(|(w, h)| {
            let n = (w * h) as usize;
            (
                Just(w),
                Just(h),
                proptest::collection::vec(prop_oneof![Just([0u8, 0, 0]), Just([255, 255, 255]), Just([200, 30, 30]), any::<[u8; 3]>()], n),
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(6)),
            )
        })
    }

    proptest! {
        #[test]
        fn frozen_flood_matches_scan_oracle((w, h, px, picks) in grid_strategy()) {
            let img = RgbImage::from_raw(w, h, px.concat()).unwrap();
            let lab = to_lab::<f64>(&img);
            let seeds: Vec<Seed> = picks.iter().map(|&i| seed(i as u32 % w, i as u32 / w)).collect();
            let cfg = RgrConfig::default();
            let map = grow_clusters_frozen(&lab, &seeds, &cfg).unwrap();
            let oracle = frozen_oracle(&lab, &seeds, cfg.color_scale, cfg.spatial_scale_for(w, h));
            prop_assert_eq!(map.ids(), oracle.as_slice());
        }

        #[test]
        fn growth_covers_every_pixel((w, h, px, picks) in grid_strategy()) {
            let img = RgbImage::from_raw(w, h, px.concat()).unwrap();
            let lab = to_lab::<f32>(&img);
            let seeds: Vec<Seed> = picks.iter().map(|&i| seed(i as u32 % w, i as u32 / w)).collect();
            let map = grow_clusters(&lab, &seeds, &RgrConfig::default()).unwrap();
            prop_assert!(map.ids().iter().all(|&k| k < map.cluster_count()));
            for (k, s) in seeds.iter().enumerate() {
                prop_assert_eq!(map.id(s.x, s.y), k as u32);
            }
        }
    }
}
