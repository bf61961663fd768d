//! Floating-point scalar abstraction.
//!
//! Every numeric kernel in this crate is generic over [`Real`] so the same
//! code drives `f32` and `f64`. The trait bundles the arithmetic bounds from
//! `num-traits` with the two distribution draws the algorithms need (standard
//! normal and standard Cauchy), so downstream code never has to spell out
//! `rand_distr` bounds.

use rand::distr::uniform::SampleUniform;
use rand::Rng;
use rand_distr::Distribution;

/// Scalar type usable by all numeric kernels (`f32` or `f64`).
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + SampleUniform
    + std::iter::Sum<Self>
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Draw from the standard normal distribution N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from the standard Cauchy distribution (location 0, scale 1).
    fn standard_cauchy<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossy conversion from `f64`, for configuration constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable")
    }

    /// Lossy conversion to `f64`, for reporting and p-value arithmetic.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rand_distr::StandardNormal.sample(rng)
    }

    fn standard_cauchy<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rand_distr::Cauchy::new(0.0f32, 1.0).expect("valid scale").sample(rng)
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rand_distr::StandardNormal.sample(rng)
    }

    fn standard_cauchy<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rand_distr::Cauchy::new(0.0f64, 1.0).expect("valid scale").sample(rng)
    }
}
