use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{grow_clusters, sample_seeds, vote_clusters, EngineError, LikelihoodTensor, RgrConfig};
use crate::color::{to_lab, LabColorPlane};
use crate::grid::{LabelMask, LabelPlane, RgbImage, TraceRaster, UNLABELED};
use crate::scalar::Real;

/// Output of [`refine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub likelihood: LikelihoodTensor,
    pub mask: LabelMask,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random stream for iteration `i` of a run seeded with `seed`.
pub fn iteration_stream_seed(seed: u64, i: u32) -> u64 {
    splitmix64(splitmix64(seed) ^ u64::from(i).wrapping_mul(0xD605_BBB5_8C8A_BBB9))
}

/// One Monte Carlo iteration: sample, grow, vote. Returns per-pixel labels.
pub fn run_iteration<T: Real>(
    lab: &LabColorPlane<T>,
    trace: &TraceRaster,
    config: &RgrConfig<T>,
    iteration: u32,
) -> Result<Vec<u8>, EngineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(iteration_stream_seed(config.rng_seed, iteration));
    let seeds = sample_seeds(trace, config.seed_fraction, &mut rng)?;
    let clusters = grow_clusters(lab, &seeds, config)?;
    vote_clusters(&clusters, trace)
}

/// Grows a sparse trace into a dense mask.
///
/// Identical inputs and `config.rng_seed` give bit-identical output for any
/// thread count: each iteration draws from its own stream and the
/// aggregation is a sum of counts.
pub fn refine<T: Real>(
    image: &RgbImage,
    trace: &TraceRaster,
    config: &RgrConfig<T>,
) -> Result<Refinement, EngineError> {
    config.validate()?;
    if image.width() != trace.width() || image.height() != trace.height() {
        return Err(EngineError::DimensionMismatch {
            left: (image.width(), image.height()),
            right: (trace.width(), trace.height()),
        });
    }
    let categories = trace
        .labels()
        .iter()
        .filter(|&&l| l != UNLABELED)
        .map(|&l| l as usize + 1)
        .max()
        .ok_or(EngineError::EmptyTrace)?;

    let lab = to_lab::<T>(image);
    let run = || -> Result<Vec<Vec<u8>>, EngineError> {
        (0..config.mc_iterations)
            .into_par_iter()
            .map(|i| run_iteration(&lab, trace, config, i))
            .collect()
    };
    let planes = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|_| EngineError::InvalidConfig("could not start worker threads"))?
            .install(run)?,
        None => run()?,
    };

    let mut likelihood = LikelihoodTensor::new(image.width(), image.height(), categories);
    for plane in &planes {
        likelihood.accumulate(plane);
    }
    let mask = likelihood.argmax();
    Ok(Refinement { likelihood, mask })
}
