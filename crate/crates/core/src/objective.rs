//! Objective functions and budgeted evaluation.

use crate::budget::EvalBudget;
use crate::error::BudgetExhausted;
use crate::scalar::Real;
use crate::space::SearchSpace;

/// A minimization problem over a box-constrained continuous domain.
///
/// `Sync` so campaigns can evaluate runs on worker threads.
pub trait Objective<F: Real>: Sync {
    fn dimension(&self) -> usize;

    fn space(&self) -> &SearchSpace<F>;

    /// Raw objective value at `x`. `x.len()` must equal `dimension()`.
    fn raw_value(&self, x: &[F]) -> F;

    /// Known optimum value, if the problem has one (benchmarks do).
    fn optimum_value(&self) -> Option<F> {
        None
    }
}

/// Evaluate `x`, charging one unit of budget.
///
/// On exhaustion the evaluation does not happen and no budget is consumed.
/// A NaN objective value is mapped to `+inf` so that selection logic can
/// rank it below every real value.
pub fn evaluate<F: Real, O: Objective<F> + ?Sized>(
    objective: &O,
    x: &[F],
    budget: &mut EvalBudget,
) -> Result<F, BudgetExhausted> {
    budget.try_consume()?;
    let v = objective.raw_value(x);
    Ok(if v.is_nan() { F::infinity() } else { v })
}
