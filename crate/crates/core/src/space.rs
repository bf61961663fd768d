//! Axis-aligned box search spaces.

use crate::error::Error;
use crate::scalar::Real;
use rand::Rng;

/// A closed axis-aligned box `[lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace<F: Real> {
    lower: Vec<F>,
    upper: Vec<F>,
}

impl<F: Real> SearchSpace<F> {
    /// Build a box from per-coordinate bounds.
    ///
    /// Bounds must be finite, equally long, nonempty, and satisfy
    /// `lower[i] < upper[i]` strictly in every coordinate.
    pub fn new(lower: Vec<F>, upper: Vec<F>) -> Result<Self, Error> {
        if lower.is_empty() {
            return Err(Error::InvalidConfig("search space needs at least one dimension".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite bound in coordinate {i}")));
            }
            if lo >= hi {
                return Err(Error::InvalidConfig(format!(
                    "lower bound must be strictly below upper bound in coordinate {i}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The symmetric box `[-half, half]^dimension`.
    pub fn symmetric(dimension: usize, half: F) -> Result<Self, Error> {
        Self::new(vec![-half; dimension], vec![half; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[F] {
        &self.lower
    }

    pub fn upper(&self) -> &[F] {
        &self.upper
    }

    /// True iff `x` lies inside the closed box.
    pub fn contains(&self, x: &[F]) -> bool {
        assert_eq!(x.len(), self.dimension(), "point dimension mismatch");
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((&v, &lo), &hi)| v >= lo && v <= hi)
    }

    /// Project `x` onto the box, coordinate by coordinate.
    ///
    /// Idempotent; points already inside are untouched.
    pub fn clamp_in_place(&self, x: &mut [F]) {
        assert_eq!(x.len(), self.dimension(), "point dimension mismatch");
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            if *v < lo {
                *v = lo;
            } else if *v > hi {
                *v = hi;
            }
        }
    }

    /// Clamped copy of `x`.
    pub fn clamped(&self, x: &[F]) -> Vec<F> {
        let mut y = x.to_vec();
        self.clamp_in_place(&mut y);
        y
    }

    /// Draw a point with every coordinate independently uniform in its bounds.
    pub fn uniform_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<F> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| rng.random_range(lo..hi))
            .collect()
    }
}
