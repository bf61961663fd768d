//! Function-evaluation budgets.

use crate::error::BudgetExhausted;

/// Counter for objective evaluations with a hard cap.
///
/// Optimizer loops call [`EvalBudget::try_consume`] before every evaluation;
/// the `Err` return is the termination signal. `used` never exceeds `max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalBudget {
    max: u64,
    used: u64,
}

impl EvalBudget {
    pub fn new(max: u64) -> Self {
        Self { max, used: 0 }
    }

    /// Budget that never runs out (for tests and interactive probing).
    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    /// Reserve one evaluation, or report exhaustion without consuming.
    pub fn try_consume(&mut self) -> Result<(), BudgetExhausted> {
        if self.used >= self.max {
            Err(BudgetExhausted)
        } else {
            self.used += 1;
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn max(&self) -> u64 {
        self.max
    }

    pub fn remaining(&self) -> u64 {
        self.max - self.used
    }
}
