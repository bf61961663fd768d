//! Error types shared across the crate.

/// Signal that the evaluation budget ran out.
///
/// This is deliberately a separate type rather than an [`Error`] variant so
/// the optimizer inner loops can use it as a lightweight control-flow signal:
/// a generation that hits it is discarded and the run ends cleanly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("evaluation budget exhausted")]
pub struct BudgetExhausted;

/// Errors raised by configuration validation and the library entry points.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem name {0:?} (known: f1..f11)")]
    UnknownProblem(String),

    #[error("need at least {needed} data points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },

    #[error("budget of {available} evaluations cannot cover one population of {needed}")]
    BudgetTooSmall { needed: u64, available: u64 },

    #[error(transparent)]
    BudgetExhausted(#[from] BudgetExhausted),
}
