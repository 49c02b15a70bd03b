use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::scalar::Real;

/// Pixel adjacency used while growing. Only 4-connectivity is supported.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    #[default]
    Four,
}

/// Parameters of one refinement run.
///
/// `color_scale` and the default `spatial_scale` (a quarter of the larger
/// image side) are tuning constants of this implementation; the growing
/// distance divides Lab distance by the former and pixel distance by the
/// latter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RgrConfig<T> {
    /// Fraction of labeled pixels sampled as seeds per iteration, in (0, 1].
    pub seed_fraction: f64,
    /// Number of Monte Carlo iterations, at least 1.
    pub mc_iterations: u32,
    /// Lab distance normalizer.
    pub color_scale: T,
    /// Pixel distance normalizer; `None` means `max(width, height) / 4`.
    pub spatial_scale: Option<T>,
    pub connectivity: Connectivity,
    pub rng_seed: u64,
    /// Worker threads for the iterations; `None` uses the global pool.
    /// Results do not depend on this value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl<T: Real> Default for RgrConfig<T> {
    fn default() -> Self {
        Self {
            seed_fraction: 0.75,
            mc_iterations: 8,
            color_scale: T::lit(20.0),
            spatial_scale: None,
            connectivity: Connectivity::Four,
            rng_seed: 0,
            threads: None,
        }
    }
}

impl<T: Real> RgrConfig<T> {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self { rng_seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.seed_fraction > 0.0 && self.seed_fraction <= 1.0) {
            return Err(EngineError::InvalidConfig("seed fraction must lie in (0, 1]"));
        }
        if self.mc_iterations == 0 {
            return Err(EngineError::InvalidConfig("at least one iteration is required"));
        }
        if self.mc_iterations > u32::from(u16::MAX) {
            return Err(EngineError::InvalidConfig("too many iterations"));
        }
        if self.color_scale.is_nan() || self.color_scale <= T::zero() {
            return Err(EngineError::InvalidConfig("color scale must be positive"));
        }
        if let Some(s) = self.spatial_scale {
            if s.is_nan() || s <= T::zero() {
                return Err(EngineError::InvalidConfig("spatial scale must be positive"));
            }
        }
        if self.threads == Some(0) {
            return Err(EngineError::InvalidConfig("thread count must be positive"));
        }
        Ok(())
    }

    pub fn spatial_scale_for(&self, width: u32, height: u32) -> T {
        self.spatial_scale
            .unwrap_or_else(|| T::lit(f64::from(width.max(height))) / T::lit(4.0))
    }
}
