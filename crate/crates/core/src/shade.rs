//! Success-history parameter adaptation baseline.
//!
//! This is the classic success-history DE: a circular buffer of H
//! parameter memories, each generation sampling per-individual (F, CR)
//! near a random memory slot, and after the generation overwriting one
//! slot with improvement-weighted means of the parameters that produced
//! strictly better trials (Lehmer mean for F, arithmetic mean for CR).
//!
//! Two mutation flavors are supported: plain rand/1, and
//! current-to-pbest/1 with an external archive of replaced parents
//! (capacity = population size, random eviction). For the pbest flavor
//! each individual draws its own greediness p uniformly from
//! [2/N, 0.2] every generation.

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Normal};

use crate::budget::EvalBudget;
use crate::de::{de_generation, Crossover, DeParams, Mutation, PBestArchive};
use crate::error::Error;
use crate::objective::Objective;
use crate::population::Population;
use crate::record::RunRecord;
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::stats::objective_error;

/// Number of (F, CR) memory slots kept by default.
pub const DEFAULT_MEMORY_SIZE: usize = 100;

/// Circular success-history memory.
///
/// All slots start at 0.5 and stay within [0, 1] forever: CR slots are
/// arithmetic means of clamped values, F slots are Lehmer means of
/// values in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ShadeMemory<F: Real> {
    mean_f: Vec<F>,
    mean_cr: Vec<F>,
    write_index: usize,
}

impl<F: Real> ShadeMemory<F> {
    pub fn new(size: usize) -> Self {
        assert!(size >= 1, "memory needs at least one slot");
        let half = F::of(0.5);
        Self {
            mean_f: vec![half; size],
            mean_cr: vec![half; size],
            write_index: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.mean_f.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a memory always has at least one slot
    }

    pub fn slots(&self) -> impl Iterator<Item = (F, F)> + '_ {
        self.mean_f.iter().copied().zip(self.mean_cr.iter().copied())
    }

    /// Draw one (F, CR) pair: pick a slot uniformly, then
    /// CR ~ Normal(slot, 0.1) clamped to [0, 1] and
    /// F ~ Cauchy(slot, 0.1) redrawn while non-positive, clamped to 1.
    pub fn sample_params<R: Rng + ?Sized>(&self, rng: &mut R) -> DeParams<F> {
        let slot = rng.random_range(0..self.len());
        let scale = 0.1;

        let cr_dist = Normal::new(self.mean_cr[slot].as_f64(), scale)
            .expect("0.1 is a valid standard deviation");
        let cr = cr_dist.sample(rng).clamp(0.0, 1.0);

        let f_dist = Cauchy::new(self.mean_f[slot].as_f64(), scale)
            .expect("0.1 is a valid scale");
        let f = loop {
            let draw = f_dist.sample(rng);
            if draw > 0.0 {
                break draw.min(1.0);
            }
        };
        DeParams::new(F::of(f), F::of(cr))
    }

    /// Fold one generation's successes into the memory.
    ///
    /// Entries with non-positive improvement are ignored; if nothing
    /// remains the memory is left untouched and the write cursor does
    /// not move. Otherwise the current slot receives the
    /// improvement-weighted Lehmer mean of the F values and the
    /// improvement-weighted arithmetic mean of the CR values, and the
    /// cursor advances cyclically.
    pub fn update(&mut self, f_values: &[F], cr_values: &[F], improvements: &[F]) {
        assert_eq!(f_values.len(), cr_values.len());
        assert_eq!(f_values.len(), improvements.len());

        let mut total_weight = F::zero();
        let mut lehmer_num = F::zero();
        let mut lehmer_den = F::zero();
        let mut cr_sum = F::zero();
        for ((&f, &cr), &w) in f_values.iter().zip(cr_values).zip(improvements) {
            if !(w > F::zero()) {
                continue;
            }
            total_weight += w;
            lehmer_num += w * f * f;
            lehmer_den += w * f;
            cr_sum += w * cr;
        }
        if total_weight <= F::zero() || lehmer_den <= F::zero() {
            return;
        }

        self.mean_f[self.write_index] = lehmer_num / lehmer_den;
        self.mean_cr[self.write_index] = cr_sum / total_weight;
        self.write_index = (self.write_index + 1) % self.len();
    }
}

/// Mutation flavor for the success-history baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadeMutation {
    /// rand/1; no parent archive.
    Rand1,
    /// current-to-pbest/1 with parent archive, per-individual p drawn
    /// uniformly from [2/N, 0.2] each generation.
    CurrentToPBest,
}

#[derive(Debug, Clone)]
pub struct ShadeConfig {
    pub memory_size: usize,
    pub population_size: usize,
    pub mutation: ShadeMutation,
    pub crossover: Crossover,
}

impl ShadeConfig {
    pub fn standard(mutation: ShadeMutation, population_size: usize) -> Self {
        Self {
            memory_size: DEFAULT_MEMORY_SIZE,
            population_size,
            mutation,
            // Binomial is the convention for the pbest flavor; callers
            // pairing against exponential-crossover DE can override.
            crossover: Crossover::Binomial,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.memory_size < 1 {
            return Err(Error::InvalidConfig("memory needs at least one slot".into()));
        }
        let min_pop = match self.mutation {
            ShadeMutation::Rand1 => Mutation::Rand1.min_population(),
            // The pbest pool needs two candidates even at the smallest p.
            ShadeMutation::CurrentToPBest => 4,
        };
        if self.population_size < min_pop {
            return Err(Error::InvalidConfig(format!(
                "population of {} too small for {:?} (needs {})",
                self.population_size, self.mutation, min_pop
            )));
        }
        Ok(())
    }

    /// Compact human-readable description for run records.
    pub fn describe(&self) -> String {
        format!(
            "shade(h={},n={},mut={:?},cross={:?})",
            self.memory_size, self.population_size, self.mutation, self.crossover
        )
    }
}

/// Run the success-history baseline until the budget cannot cover
/// another full generation. Same budget and trace discipline as the
/// cluster controller: evaluations = N x (1 + generations), best-value
/// trace non-increasing.
pub fn shade_run<F: Real, O: Objective<F> + ?Sized>(
    objective: &O,
    config: &ShadeConfig,
    budget: &mut EvalBudget,
    rng: &mut RngStream,
) -> Result<RunRecord<F>, Error> {
    config.validate()?;
    let n = config.population_size;
    if budget.remaining() < n as u64 {
        return Err(Error::BudgetTooSmall {
            needed: n as u64,
            available: budget.remaining(),
        });
    }

    let seed = rng.seed();
    let start_used = budget.used();
    let mut pop = Population::init_uniform(objective, n, budget, rng)?;
    let mut trace = vec![pop.best().value];

    let mut memory = ShadeMemory::<F>::new(config.memory_size);
    let uses_archive = matches!(config.mutation, ShadeMutation::CurrentToPBest);
    let mut parent_archive = PBestArchive::new(if uses_archive { n } else { 0 });
    let mut generations = 0u64;
    let p_low = 2.0 / n as f64;

    while budget.remaining() >= n as u64 {
        let params: Vec<DeParams<F>> = (0..n).map(|_| memory.sample_params(rng)).collect();
        let kinds: Vec<Mutation> = match config.mutation {
            ShadeMutation::Rand1 => vec![Mutation::Rand1; n],
            ShadeMutation::CurrentToPBest => (0..n)
                .map(|_| Mutation::CurrentToPBest1 {
                    // [2/N, 0.2) degenerates for N <= 10; pin p at the
                    // two-candidate floor there.
                    p: if p_low < 0.2 { rng.random_range(p_low..0.2) } else { p_low },
                    archive: true,
                })
                .collect(),
        };

        let outcome = match de_generation(
            &mut pop,
            &params,
            &kinds,
            config.crossover,
            objective,
            budget,
            uses_archive.then_some(&mut parent_archive),
            rng,
        ) {
            Ok(o) => o,
            Err(_) => break, // unreachable given the remaining-budget guard
        };
        generations += 1;
        trace.push(pop.best().value);

        let mut s_f = Vec::new();
        let mut s_cr = Vec::new();
        let mut s_w = Vec::new();
        for (i, p) in params.iter().enumerate() {
            if outcome.improvement[i] > F::zero() {
                s_f.push(p.f);
                s_cr.push(p.cr);
                s_w.push(outcome.improvement[i]);
            }
        }
        memory.update(&s_f, &s_cr, &s_w);
    }

    let evals = budget.used() - start_used;
    debug_assert_eq!(evals, (n as u64) * (1 + generations));
    let best = pop.best().clone();
    let optimum = objective.optimum_value().unwrap_or_else(F::zero);
    Ok(RunRecord {
        algorithm: config.describe(),
        seed,
        best_error: objective_error(best.value, optimum),
        best_value: best.value,
        best_position: best.position,
        evals,
        generations,
        trace,
    })
}
