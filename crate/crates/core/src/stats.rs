//! Run-error summaries and the rank-sum comparison machinery.
//!
//! The two-sample comparison is the two-sided Wilcoxon rank-sum test with
//! midrank tie handling, tie-corrected variance, continuity correction, and
//! the normal approximation for the p-value (sample sizes here are 25 per
//! side, where the approximation is accurate to well under a percent).

use crate::error::Error;
use crate::scalar::Real;
use statrs::distribution::{ContinuousCDF, Normal};

/// Error of a found objective value against the known optimum.
pub fn objective_error<F: Real>(found: F, optimum: F) -> F {
    found - optimum
}

/// Mean and sample standard deviation (n - 1 denominator; a single element
/// has deviation 0).
pub fn summarize<F: Real>(values: &[F]) -> (F, F) {
    assert!(!values.is_empty(), "cannot summarize an empty sample");
    let n = F::of(values.len() as f64);
    let mean = values.iter().copied().sum::<F>() / n;
    if values.len() == 1 {
        return (mean, F::zero());
    }
    let ss: F = values
        .iter()
        .map(|&v| {
            let d = v - mean;
            d * d
        })
        .sum();
    (mean, (ss / (n - F::one())).sqrt())
}

/// Sample median (mean of the middle pair for even sizes).
pub fn median<F: Real>(values: &[F]) -> F {
    assert!(!values.is_empty(), "cannot take the median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / F::of(2.0)
    }
}

/// Result of one pairwise comparison, from the first sample's perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Win,
    Loss,
    Draw,
}

impl Outcome {
    pub fn symbol(self) -> &'static str {
        match self {
            Outcome::Win => "+",
            Outcome::Loss => "-",
            Outcome::Draw => "=",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Win => Outcome::Loss,
            Outcome::Loss => Outcome::Win,
            Outcome::Draw => Outcome::Draw,
        }
    }
}

/// One cell of a comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonCell {
    pub outcome: Outcome,
    pub p_value: f64,
    /// U statistic of the first sample.
    pub u_statistic: f64,
    pub median_a: f64,
    pub median_b: f64,
}

/// Midranks of the pooled sample `values` (1-based; tied runs share their
/// average rank). Returns the ranks and the tie-group sizes.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the average of ranks i+1..=j+1.
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    (ranks, tie_sizes)
}

/// Two-sided Wilcoxon rank-sum test at significance `alpha`.
///
/// The outcome is `Draw` when `p >= alpha`, otherwise `Win`/`Loss` for the
/// side with the smaller median error. (Exactly equal medians with a
/// significant p cannot tell a direction and fall back to `Draw`; with
/// continuous errors this does not occur in practice.) A pooled sample with
/// zero rank variance (all values identical) is a `Draw` with p = 1.
pub fn wilcoxon_rank_sum<F: Real>(a: &[F], b: &[F], alpha: f64) -> Result<ComparisonCell, Error> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::NotEnoughPoints { needed: 1, got: 0 });
    }
    let av: Vec<f64> = a.iter().map(|&v| v.as_f64()).collect();
    let bv: Vec<f64> = b.iter().map(|&v| v.as_f64()).collect();
    if av.iter().chain(&bv).any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("rank-sum input contains NaN".into()));
    }
    let n1 = av.len() as f64;
    let n2 = bv.len() as f64;
    let n = n1 + n2;

    let pooled: Vec<f64> = av.iter().chain(&bv).copied().collect();
    let (ranks, tie_sizes) = midranks(&pooled);
    let r1: f64 = ranks[..av.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;

    let mean_u = n1 * n2 / 2.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));

    let median_a = median(&av);
    let median_b = median(&bv);

    let p_value = if variance <= 0.0 {
        1.0
    } else {
        let z = ((u1 - mean_u).abs() - 0.5).max(0.0) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        (2.0 * (1.0 - normal.cdf(z))).min(1.0)
    };

    let outcome = if p_value >= alpha {
        Outcome::Draw
    } else if median_a < median_b {
        Outcome::Win
    } else if median_a > median_b {
        Outcome::Loss
    } else {
        Outcome::Draw
    };

    Ok(ComparisonCell { outcome, p_value, u_statistic: u1, median_a, median_b })
}

/// Compare two means directly: draw inside a relative band, otherwise the
/// smaller mean wins. `Draw` when both are zero.
pub fn compare_means<F: Real>(mean_a: F, mean_b: F, relative_band: f64) -> Outcome {
    let a = mean_a.as_f64();
    let b = mean_b.as_f64();
    let scale = a.abs().max(b.abs());
    if scale == 0.0 || (a - b).abs() <= relative_band * scale {
        Outcome::Draw
    } else if a < b {
        Outcome::Win
    } else {
        Outcome::Loss
    }
}

/// Count (wins, losses, draws).
pub fn tally<I: IntoIterator<Item = Outcome>>(outcomes: I) -> (usize, usize, usize) {
    let mut w = 0;
    let mut l = 0;
    let mut d = 0;
    for o in outcomes {
        match o {
            Outcome::Win => w += 1,
            Outcome::Loss => l += 1,
            Outcome::Draw => d += 1,
        }
    }
    (w, l, d)
}

/// One row of a +/-/= summary table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallyRow {
    pub label: String,
    pub wins: usize,
    pub losses: usize,
    pub draws: usize,
}

/// CSV rendering of a +/-/= table (header `comparison,+,-,=`).
pub fn render_tally_csv(rows: &[TallyRow]) -> String {
    let mut out = String::from("comparison,+,-,=\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.label, r.wins, r.losses, r.draws));
    }
    out
}

/// Aligned-text rendering of a +/-/= table.
pub fn render_tally_text(rows: &[TallyRow]) -> String {
    let label_w = rows
        .iter()
        .map(|r| r.label.len())
        .chain(std::iter::once("comparison".len()))
        .max()
        .unwrap_or(10);
    let mut out = format!("{:<label_w$}  {:>4} {:>4} {:>4}\n", "comparison", "+", "-", "=");
    for r in rows {
        out.push_str(&format!(
            "{:<label_w$}  {:>4} {:>4} {:>4}\n",
            r.label, r.wins, r.losses, r.draws
        ));
    }
    out
}
