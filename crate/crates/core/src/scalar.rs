//! Numeric traits the rest of the crate is generic over.
//!
//! Two families are needed. Color conversion and region growing take square
//! roots and cube roots, so they run on [`Real`] (`f32` or `f64`). Scoring
//! and overlap ratios only need field arithmetic and ordering, so they run on
//! [`Scalar`], which additionally admits exact rationals
//! ([`num_rational::Rational64`]).

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Floating point type usable by the color and growing code.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static {
    /// Converts a small constant. Panics only if the type cannot represent
    /// ordinary `f64` literals, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field type used by the evaluation code.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    /// Largest integer not greater than `self`.
    fn floor_to_i64(self) -> i64;
    /// Nearest integer, halves rounded away from zero.
    fn round_to_i64(self) -> i64;

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }
}

impl Scalar for f32 {
    fn floor_to_i64(self) -> i64 {
        self.floor() as i64
    }
    fn round_to_i64(self) -> i64 {
        self.round() as i64
    }
}

impl Scalar for f64 {
    fn floor_to_i64(self) -> i64 {
        self.floor() as i64
    }
    fn round_to_i64(self) -> i64 {
        self.round() as i64
    }
}

impl Scalar for Ratio<i64> {
    fn floor_to_i64(self) -> i64 {
        *self.floor().numer()
    }
    fn round_to_i64(self) -> i64 {
        *self.round().numer()
    }
}
