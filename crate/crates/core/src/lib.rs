//! Scribble-to-mask propagation for interactive segmentation annotation.
//!
//! Annotators draw sparse strokes; [`engine::refine`] grows them into a
//! dense per-pixel mask with Monte Carlo seeded region growing. The
//! [`trace`] module rasterizes strokes and reads/writes indexed PNG masks,
//! and [`eval`] scores masks against ground truth.
//!
//! Numeric code is generic: the color and growing code over [`Real`]
//! (`f32`, `f64`), the evaluation code over [`Scalar`] (which also covers
//! exact rationals). The aliases below pick the usual instantiations.
//!
//! ```
//! use tracegrow_core::{refine, RgbImage, RgrConfig64, Stroke, raster_from_strokes, LabelPlane};
//!
//! let image = RgbImage::from_fn(32, 16, |x, _| if x < 16 { [20, 40, 200] } else { [230, 210, 30] });
//! let trace = raster_from_strokes(32, 16, &[
//!     Stroke::line(1, 2, (4, 4), (4, 11)),
//!     Stroke::line(2, 2, (27, 4), (27, 11)),
//! ]).unwrap();
//! let out = refine(&image, &trace, &RgrConfig64::with_seed(7)).unwrap();
//! assert_eq!(out.mask.label(0, 0), 1);
//! assert_eq!(out.mask.label(31, 15), 2);
//! ```

pub mod color;
pub mod engine;
pub mod eval;
pub mod grid;
pub mod scalar;
pub mod trace;

pub use color::{to_lab, LabColorPlane};
pub use engine::{refine, EngineError, LikelihoodTensor, Refinement, RgrConfig};
pub use eval::{EvalError, IouReport, ScoreReport};
pub use grid::{GridError, LabelMask, LabelPlane, RgbImage, TraceRaster, UNLABELED};
pub use scalar::{Real, Scalar};
pub use trace::{
    decode_mask_png, encode_mask_png, raster_from_strokes, Palette, Stroke, StrokeDocument, TraceError,
};

pub use num_rational::Rational64;

pub type LabPlane32 = LabColorPlane<f32>;
pub type LabPlane64 = LabColorPlane<f64>;
pub type RgrConfig32 = RgrConfig<f32>;
pub type RgrConfig64 = RgrConfig<f64>;
pub type IouReport64 = IouReport<f64>;
pub type IouReportExact = IouReport<Rational64>;
pub type ScoreReport64 = ScoreReport<f64>;
pub type ScoreReportExact = ScoreReport<Rational64>;
