//! Populations of candidate solutions.

use crate::budget::EvalBudget;
use crate::error::BudgetExhausted;
use crate::objective::{evaluate, Objective};
use crate::scalar::Real;
use rand::Rng;

/// One candidate solution with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<F: Real> {
    pub position: Vec<F>,
    pub value: F,
}

/// A fixed-size population, the unit one generation operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<F: Real> {
    pub members: Vec<Individual<F>>,
    pub generation: u64,
}

impl<F: Real> Population<F> {
    /// Initialize with uniform draws over the objective's box, evaluating
    /// every member (costs exactly `size` evaluations).
    pub fn init_uniform<O: Objective<F> + ?Sized, R: Rng + ?Sized>(
        objective: &O,
        size: usize,
        budget: &mut EvalBudget,
        rng: &mut R,
    ) -> Result<Self, BudgetExhausted> {
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let position = objective.space().uniform_sample(rng);
            let value = evaluate(objective, &position, budget)?;
            members.push(Individual { position, value });
        }
        Ok(Self { members, generation: 0 })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the best (lowest-value) member; ties go to the lower index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.members.len() {
            if self.members[i].value < self.members[best].value {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual<F> {
        &self.members[self.best_index()]
    }

    /// Member indices ordered by ascending value, ties by index.
    ///
    /// Used for best-of-the-top mutation variants.
    pub fn ranked_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|&a, &b| {
            self.members[a]
                .value
                .partial_cmp(&self.members[b].value)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }
}
