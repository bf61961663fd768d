//! Shifted scalable benchmark functions f1..f11.
//!
//! Each problem minimizes a classical test function evaluated at
//! `z = x - shift`, where the shift vector is drawn once per problem from
//! the central 80% of the box (so the optimum never sits on the boundary).
//! All eleven have optimum value 0, attained at `x = shift`.
//!
//! The shift is deterministic in `(name, dimension, shift_seed)`: two
//! problems built with the same triple are identical, which is what makes
//! stored campaign results comparable across processes.

use crate::error::Error;
use crate::objective::Objective;
use crate::rng::{hash_tag, RngStream};
use crate::scalar::Real;
use crate::space::SearchSpace;
use rand::Rng;

/// Identifier of one of the eleven benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
}

pub const ALL_BENCHMARKS: [BenchmarkId; 11] = [
    BenchmarkId::F1,
    BenchmarkId::F2,
    BenchmarkId::F3,
    BenchmarkId::F4,
    BenchmarkId::F5,
    BenchmarkId::F6,
    BenchmarkId::F7,
    BenchmarkId::F8,
    BenchmarkId::F9,
    BenchmarkId::F10,
    BenchmarkId::F11,
];

impl BenchmarkId {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::F1 => "f1",
            BenchmarkId::F2 => "f2",
            BenchmarkId::F3 => "f3",
            BenchmarkId::F4 => "f4",
            BenchmarkId::F5 => "f5",
            BenchmarkId::F6 => "f6",
            BenchmarkId::F7 => "f7",
            BenchmarkId::F8 => "f8",
            BenchmarkId::F9 => "f9",
            BenchmarkId::F10 => "f10",
            BenchmarkId::F11 => "f11",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BenchmarkId::F1 => "shifted sphere",
            BenchmarkId::F2 => "shifted Schwefel 2.21 (max of absolutes)",
            BenchmarkId::F3 => "shifted Rosenbrock",
            BenchmarkId::F4 => "shifted Rastrigin",
            BenchmarkId::F5 => "shifted Griewank",
            BenchmarkId::F6 => "shifted Ackley",
            BenchmarkId::F7 => "shifted Schwefel 2.22 (sum plus product of absolutes)",
            BenchmarkId::F8 => "shifted Schwefel 1.2 (rotated-sum squares)",
            BenchmarkId::F9 => "shifted extended Schaffer chain, cyclic",
            BenchmarkId::F10 => "shifted Bohachevsky chain",
            BenchmarkId::F11 => "shifted Schaffer chain",
        }
    }

    /// Half-width of the symmetric box `[-h, h]^n` the function is posed on.
    pub fn box_half_width(self) -> f64 {
        match self {
            BenchmarkId::F1 | BenchmarkId::F2 | BenchmarkId::F3 => 100.0,
            BenchmarkId::F4 => 5.0,
            BenchmarkId::F5 => 600.0,
            BenchmarkId::F6 => 32.0,
            BenchmarkId::F7 => 10.0,
            BenchmarkId::F8 => 65.536,
            BenchmarkId::F9 | BenchmarkId::F11 => 100.0,
            BenchmarkId::F10 => 15.0,
        }
    }

    pub fn from_name(name: &str) -> Result<Self, Error> {
        ALL_BENCHMARKS
            .iter()
            .copied()
            .find(|id| id.name() == name)
            .ok_or_else(|| Error::UnknownProblem(name.to_string()))
    }
}

/// A shifted benchmark instance: function id, box, and shift vector.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem<F: Real> {
    id: BenchmarkId,
    space: SearchSpace<F>,
    shift: Vec<F>,
}

impl<F: Real> BenchmarkProblem<F> {
    /// Build a problem with a seeded shift drawn uniformly from the central
    /// 80% of the box. Dimension must be at least 2 (the chain functions
    /// need a neighbor).
    pub fn new(id: BenchmarkId, dimension: usize, shift_seed: u64) -> Result<Self, Error> {
        if dimension < 2 {
            return Err(Error::InvalidConfig(format!(
                "benchmark dimension must be >= 2, got {dimension}"
            )));
        }
        let half = F::of(id.box_half_width());
        let space = SearchSpace::symmetric(dimension, half)?;
        let mut rng = RngStream::derived(
            shift_seed,
            &[hash_tag(b"benchmark-shift"), hash_tag(id.name().as_bytes()), dimension as u64],
        );
        // Central 80%: lo + width * (0.1 + 0.8 u), u in [0, 1).
        let shift = (0..dimension)
            .map(|i| {
                let lo = space.lower()[i];
                let width = space.upper()[i] - lo;
                let u: F = rng.random_range(F::zero()..F::one());
                lo + width * (F::of(0.1) + F::of(0.8) * u)
            })
            .collect();
        Ok(Self { id, space, shift })
    }

    /// Build a problem with an explicit shift (used by tests that need a
    /// known optimum location). The shift must lie inside the box.
    pub fn with_shift(id: BenchmarkId, shift: Vec<F>) -> Result<Self, Error> {
        if shift.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "benchmark dimension must be >= 2, got {}",
                shift.len()
            )));
        }
        let half = F::of(id.box_half_width());
        let space = SearchSpace::symmetric(shift.len(), half)?;
        if !space.contains(&shift) {
            return Err(Error::InvalidConfig("shift must lie inside the box".into()));
        }
        Ok(Self { id, space, shift })
    }

    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    pub fn shift(&self) -> &[F] {
        &self.shift
    }
}

/// Look a problem up by name ("f1".."f11") and instantiate it.
pub fn make_problem<F: Real>(
    name: &str,
    dimension: usize,
    shift_seed: u64,
) -> Result<BenchmarkProblem<F>, Error> {
    BenchmarkProblem::new(BenchmarkId::from_name(name)?, dimension, shift_seed)
}

impl<F: Real> Objective<F> for BenchmarkProblem<F> {
    fn dimension(&self) -> usize {
        self.space.dimension()
    }

    fn space(&self) -> &SearchSpace<F> {
        &self.space
    }

    fn raw_value(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.dimension(), "point dimension mismatch");
        let z: Vec<F> = x.iter().zip(&self.shift).map(|(&xi, &si)| xi - si).collect();
        match self.id {
            BenchmarkId::F1 => sphere(&z),
            BenchmarkId::F2 => schwefel_2_21(&z),
            BenchmarkId::F3 => rosenbrock(&z),
            BenchmarkId::F4 => rastrigin(&z),
            BenchmarkId::F5 => griewank(&z),
            BenchmarkId::F6 => ackley(&z),
            BenchmarkId::F7 => schwefel_2_22(&z),
            BenchmarkId::F8 => schwefel_1_2(&z),
            BenchmarkId::F9 => extended_schaffer_cyclic(&z),
            BenchmarkId::F10 => bohachevsky_chain(&z),
            BenchmarkId::F11 => schaffer_chain(&z),
        }
    }

    fn optimum_value(&self) -> Option<F> {
        Some(F::zero())
    }
}

/// Sphere: sum z_i^2.
fn sphere<F: Real>(z: &[F]) -> F {
    z.iter().map(|&v| v * v).sum()
}

/// Schwefel 2.21: max_i |z_i|.
fn schwefel_2_21<F: Real>(z: &[F]) -> F {
    z.iter().map(|&v| v.abs()).fold(F::zero(), F::max)
}

/// Rosenbrock: sum_{i<n} 100 (w_i^2 - w_{i+1})^2 + (w_i - 1)^2 with
/// w = z + 1, so the minimum value 0 sits at z = 0.
fn rosenbrock<F: Real>(z: &[F]) -> F {
    let one = F::one();
    let hundred = F::of(100.0);
    let mut total = F::zero();
    for i in 0..z.len() - 1 {
        let wi = z[i] + one;
        let wn = z[i + 1] + one;
        let a = wi * wi - wn;
        let b = wi - one;
        total += hundred * a * a + b * b;
    }
    total
}

/// Rastrigin: sum z_i^2 - 10 cos(2 pi z_i) + 10.
fn rastrigin<F: Real>(z: &[F]) -> F {
    let ten = F::of(10.0);
    let two_pi = F::of(2.0 * std::f64::consts::PI);
    z.iter().map(|&v| v * v - ten * (two_pi * v).cos() + ten).sum()
}

/// Griewank: 1 + sum z_i^2 / 4000 - prod cos(z_i / sqrt(i+1)).
fn griewank<F: Real>(z: &[F]) -> F {
    let sum: F = z.iter().map(|&v| v * v).sum::<F>() / F::of(4000.0);
    let prod = z
        .iter()
        .enumerate()
        .map(|(i, &v)| (v / F::of(((i + 1) as f64).sqrt())).cos())
        .fold(F::one(), |acc, c| acc * c);
    F::one() + sum - prod
}

/// Ackley: -20 exp(-0.2 sqrt(mean z_i^2)) - exp(mean cos(2 pi z_i)) + 20 + e.
fn ackley<F: Real>(z: &[F]) -> F {
    let n = F::of(z.len() as f64);
    let two_pi = F::of(2.0 * std::f64::consts::PI);
    let q = z.iter().map(|&v| v * v).sum::<F>() / n;
    let c = z.iter().map(|&v| (two_pi * v).cos()).sum::<F>() / n;
    let twenty = F::of(20.0);
    -twenty * (-F::of(0.2) * q.sqrt()).exp() - c.exp() + twenty + F::of(std::f64::consts::E)
}

/// Schwefel 2.22: sum |z_i| + prod |z_i|.
fn schwefel_2_22<F: Real>(z: &[F]) -> F {
    let sum: F = z.iter().map(|&v| v.abs()).sum();
    let prod = z.iter().map(|&v| v.abs()).fold(F::one(), |acc, a| acc * a);
    sum + prod
}

/// Schwefel 1.2: sum_i (sum_{j<=i} z_j)^2.
fn schwefel_1_2<F: Real>(z: &[F]) -> F {
    let mut prefix = F::zero();
    let mut total = F::zero();
    for &v in z {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

/// Pairwise Schaffer kernel: (x^2+y^2)^{1/4} (sin^2(50 (x^2+y^2)^{0.1}) + 1).
fn schaffer_pair<F: Real>(x: F, y: F) -> F {
    let s = x * x + y * y;
    if s == F::zero() {
        return F::zero();
    }
    let fifty = F::of(50.0);
    let sin_term = (fifty * s.powf(F::of(0.1))).sin();
    s.powf(F::of(0.25)) * (sin_term * sin_term + F::one())
}

/// Extended Schaffer chain with cyclic closure:
/// sum_{i<n} pair(z_i, z_{i+1}) + pair(z_n, z_1).
fn extended_schaffer_cyclic<F: Real>(z: &[F]) -> F {
    let n = z.len();
    let mut total = F::zero();
    for i in 0..n {
        total += schaffer_pair(z[i], z[(i + 1) % n]);
    }
    total
}

/// Schaffer chain without the cyclic term: sum_{i<n-1} pair(z_i, z_{i+1}).
fn schaffer_chain<F: Real>(z: &[F]) -> F {
    let mut total = F::zero();
    for i in 0..z.len() - 1 {
        total += schaffer_pair(z[i], z[i + 1]);
    }
    total
}

/// Bohachevsky chain:
/// sum_{i<n-1} z_i^2 + 2 z_{i+1}^2 - 0.3 cos(3 pi z_i) - 0.4 cos(4 pi z_{i+1}) + 0.7.
fn bohachevsky_chain<F: Real>(z: &[F]) -> F {
    let pi = F::of(std::f64::consts::PI);
    let three_pi = F::of(3.0) * pi;
    let four_pi = F::of(4.0) * pi;
    let mut total = F::zero();
    for i in 0..z.len() - 1 {
        let a = z[i];
        let b = z[i + 1];
        total += a * a + F::of(2.0) * b * b - F::of(0.3) * (three_pi * a).cos()
            - F::of(0.4) * (four_pi * b).cos()
            + F::of(0.7);
    }
    total
}
