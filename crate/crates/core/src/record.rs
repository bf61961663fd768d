//! Per-run result records.

use crate::scalar::Real;

/// Everything one optimization run reports back.
///
/// `trace[g]` is the population's best objective value after generation `g`
/// (entry 0 is right after initialization); it is non-increasing because
/// survivor selection never lets a slot get worse. `evals` counts exactly
/// the committed evaluations: population size times (1 + generations).
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<F: Real> {
    /// Human-readable description of the algorithm configuration.
    pub algorithm: String,
    /// Seed of the stream that drove this run.
    pub seed: u64,
    pub best_position: Vec<F>,
    pub best_value: F,
    /// `best_value` minus the problem's known optimum (when it has one).
    pub best_error: F,
    pub evals: u64,
    pub generations: u64,
    pub trace: Vec<F>,
}
