//! Differential evolution: mutation operators, crossover, selection, and the
//! synchronous generation step all higher-level optimizers share.
//!
//! The six mutation variants build a donor vector from population members:
//!
//! - `best/1`:           v = x_best + F (x_r1 - x_r2)
//! - `best/2`:           v = x_best + F (x_r1 - x_r2) + F (x_r3 - x_r4)
//! - `rand/1`:           v = x_r1 + F (x_r2 - x_r3)
//! - `rand/2`:           v = x_r1 + F (x_r2 - x_r3) + F (x_r4 - x_r5)
//! - `current-to-best/1`: v = x_i + F (x_best - x_i) + F (x_r1 - x_r2)
//! - `current-to-pbest/1`: v = x_i + F (x_pbest - x_i) + F (x_r1 - x_r2),
//!   with x_pbest drawn from the best `ceil(p N)` members and, optionally,
//!   x_r2 drawn from the population joined with an archive of replaced
//!   parents.
//!
//! The r-indices in one draw are mutually distinct and differ from the
//! target index `i`; the best/pbest index is exempt from that rule.
//!
//! Index selection is split from the arithmetic ([`pick_donors`] vs
//! [`mutate_with_donors`]) so the arithmetic can be exercised against
//! hand-worked examples with forced indices.

use crate::budget::EvalBudget;
use crate::error::BudgetExhausted;
use crate::objective::{evaluate, Objective};
use crate::population::Population;
use crate::scalar::Real;
use crate::space::SearchSpace;
use rand::Rng;

/// One (F, CR) control-parameter pair.
///
/// The engine itself places no hard range restriction on the pair (F = 0 is
/// a legitimate degenerate mutation weight, and success-history samplers can
/// produce CR = 0); samplers that need a restricted range enforce it with
/// their own parameter-space bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams<F: Real> {
    pub f: F,
    pub cr: F,
}

impl<F: Real> DeParams<F> {
    pub fn new(f: F, cr: F) -> Self {
        Self { f, cr }
    }
}

/// Mutation variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mutation {
    Best1,
    Best2,
    Rand1,
    Rand2,
    CurrentToBest1,
    /// `p` is the fraction of the population eligible as "pbest" (pool
    /// floored at 2 members); `archive` switches the second difference
    /// vector's tail to the population-plus-archive pool.
    CurrentToPBest1 { p: f64, archive: bool },
}

impl Mutation {
    /// Number of distinct r-indices the variant consumes.
    pub fn r_count(self) -> usize {
        match self {
            Mutation::Best1 => 2,
            Mutation::Best2 => 4,
            Mutation::Rand1 => 3,
            Mutation::Rand2 => 5,
            Mutation::CurrentToBest1 => 2,
            Mutation::CurrentToPBest1 { .. } => 2,
        }
    }

    /// Smallest population the variant can run on: the r-indices plus the
    /// excluded target must fit.
    pub fn min_population(self) -> usize {
        self.r_count() + 1
    }
}

/// Crossover variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossover {
    Binomial,
    Exponential,
}

/// Archive of replaced parents for the `current-to-pbest/1` variant.
///
/// Bounded; a push into a full archive evicts a uniformly random entry.
#[derive(Debug, Clone, Default)]
pub struct PBestArchive<F: Real> {
    entries: Vec<Vec<F>>,
    capacity: usize,
}

impl<F: Real> PBestArchive<F> {
    pub fn new(capacity: usize) -> Self {
        Self { entries: Vec::new(), capacity }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Vec<F>] {
        &self.entries
    }

    pub fn push<R: Rng + ?Sized>(&mut self, position: Vec<F>, rng: &mut R) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() < self.capacity {
            self.entries.push(position);
        } else {
            let victim = rng.random_range(0..self.entries.len());
            self.entries[victim] = position;
        }
    }
}

/// Donor indices for one mutation draw.
///
/// `r` entries below the population size index the population; an entry
/// `>= pop.len()` indexes `archive[entry - pop.len()]` (only produced for
/// the archive-enabled pbest variant's second tail index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DonorIndices {
    pub best: usize,
    pub r: Vec<usize>,
}

/// Draw `count` mutually distinct indices from `0..n`, all different from
/// `excluded`, by rejection.
fn distinct_indices<R: Rng + ?Sized>(
    n: usize,
    excluded: usize,
    count: usize,
    rng: &mut R,
) -> Vec<usize> {
    assert!(n > count, "population of {n} cannot supply {count} distinct donors plus the target");
    let mut picked: Vec<usize> = Vec::with_capacity(count);
    while picked.len() < count {
        let cand = rng.random_range(0..n);
        if cand != excluded && !picked.contains(&cand) {
            picked.push(cand);
        }
    }
    picked
}

/// Sample donor indices for member `i` under the given variant.
///
/// Draw order (fixed for reproducibility): pbest index first where the
/// variant has one, then the r-indices left to right.
pub fn pick_donors<F: Real, R: Rng + ?Sized>(
    kind: Mutation,
    pop: &Population<F>,
    i: usize,
    archive_len: usize,
    rng: &mut R,
) -> DonorIndices {
    let n = pop.len();
    assert!(n >= kind.min_population(), "population too small for the variant");
    match kind {
        Mutation::Best1 | Mutation::Best2 | Mutation::CurrentToBest1 => DonorIndices {
            best: pop.best_index(),
            r: distinct_indices(n, i, kind.r_count(), rng),
        },
        Mutation::Rand1 | Mutation::Rand2 => DonorIndices {
            best: 0,
            r: distinct_indices(n, i, kind.r_count(), rng),
        },
        Mutation::CurrentToPBest1 { p, archive } => {
            // Pool of the best ceil(p n) members, floored at 2, capped at n.
            let pool = ((p * n as f64).ceil() as usize).clamp(2, n);
            let ranked = pop.ranked_indices();
            let best = ranked[rng.random_range(0..pool)];
            let r1 = {
                let mut v;
                loop {
                    v = rng.random_range(0..n);
                    if v != i {
                        break;
                    }
                }
                v
            };
            // Second tail index from population or population + archive,
            // distinct from i and r1 (archive entries cannot collide).
            let tail_n = if archive { n + archive_len } else { n };
            let r2 = {
                let mut v;
                loop {
                    v = rng.random_range(0..tail_n);
                    if v != i && v != r1 {
                        break;
                    }
                }
                v
            };
            DonorIndices { best, r: vec![r1, r2] }
        }
    }
}

/// Apply the mutation arithmetic with explicit donor indices.
pub fn mutate_with_donors<F: Real>(
    kind: Mutation,
    pop: &Population<F>,
    i: usize,
    f: F,
    donors: &DonorIndices,
    archive: &PBestArchive<F>,
) -> Vec<F> {
    let n = pop.len();
    let pos = |idx: usize| -> &[F] {
        if idx < n {
            &pop.members[idx].position
        } else {
            &archive.entries()[idx - n]
        }
    };
    let dim = pop.members[i].position.len();
    let r = &donors.r;
    (0..dim)
        .map(|j| match kind {
            Mutation::Best1 => {
                pos(donors.best)[j] + f * (pos(r[0])[j] - pos(r[1])[j])
            }
            Mutation::Best2 => {
                pos(donors.best)[j]
                    + f * (pos(r[0])[j] - pos(r[1])[j])
                    + f * (pos(r[2])[j] - pos(r[3])[j])
            }
            Mutation::Rand1 => pos(r[0])[j] + f * (pos(r[1])[j] - pos(r[2])[j]),
            Mutation::Rand2 => {
                pos(r[0])[j]
                    + f * (pos(r[1])[j] - pos(r[2])[j])
                    + f * (pos(r[3])[j] - pos(r[4])[j])
            }
            Mutation::CurrentToBest1 => {
                let xi = pop.members[i].position[j];
                xi + f * (pos(donors.best)[j] - xi) + f * (pos(r[0])[j] - pos(r[1])[j])
            }
            Mutation::CurrentToPBest1 { .. } => {
                let xi = pop.members[i].position[j];
                xi + f * (pos(donors.best)[j] - xi) + f * (pos(r[0])[j] - pos(r[1])[j])
            }
        })
        .collect()
}

/// Sample donors and build the mutant for member `i`.
pub fn mutate<F: Real, R: Rng + ?Sized>(
    kind: Mutation,
    pop: &Population<F>,
    i: usize,
    f: F,
    archive: &PBestArchive<F>,
    rng: &mut R,
) -> Vec<F> {
    let donors = pick_donors(kind, pop, i, archive.len(), rng);
    mutate_with_donors(kind, pop, i, f, &donors, archive)
}

/// Binomial crossover: coordinate j comes from the mutant when
/// `u_j <= CR` or `j = j_rand`, where `j_rand` is drawn once per trial.
/// Guarantees at least one mutant coordinate.
pub fn crossover_binomial<F: Real, R: Rng + ?Sized>(
    target: &[F],
    mutant: &[F],
    cr: F,
    rng: &mut R,
) -> Vec<F> {
    assert_eq!(target.len(), mutant.len());
    let d = target.len();
    let j_rand = rng.random_range(0..d);
    (0..d)
        .map(|j| {
            let u: F = rng.random_range(F::zero()..F::one());
            if u <= cr || j == j_rand {
                mutant[j]
            } else {
                target[j]
            }
        })
        .collect()
}

/// Copy a circular window of mutant coordinates starting at a random
/// position. The window length L grows while fresh uniform draws stay
/// `<= CR` (and L has not passed the dimension), is then forced to at least
/// one, and caps at the dimension.
pub fn crossover_exponential<F: Real, R: Rng + ?Sized>(
    target: &[F],
    mutant: &[F],
    cr: F,
    rng: &mut R,
) -> Vec<F> {
    assert_eq!(target.len(), mutant.len());
    let d = target.len();
    let start = rng.random_range(0..d);
    let len = exponential_window_len(d, cr, rng);
    let mut trial = target.to_vec();
    for k in 0..len {
        let j = (start + k) % d;
        trial[j] = mutant[j];
    }
    trial
}

/// The window-length draw of exponential crossover, exposed for
/// distribution testing. Law: P(1) = (1-CR)(1+CR), P(k) = CR^k (1-CR) for
/// 1 < k < d, P(d) = CR^d.
pub fn exponential_window_len<F: Real, R: Rng + ?Sized>(d: usize, cr: F, rng: &mut R) -> usize {
    let mut l = 0usize;
    loop {
        let u: F = rng.random_range(F::zero()..F::one());
        if u <= cr && l <= d {
            l += 1;
        } else {
            break;
        }
    }
    l.clamp(1, d)
}

/// Survivor selection: the trial replaces the target iff its value is no
/// worse (ties replace, and count as successes for parameter adaptation).
pub fn select<F: Real>(target_value: F, trial_value: F) -> bool {
    trial_value <= target_value
}

/// Build the trial vector for member `i`: mutate, project the mutant onto
/// the box, then cross with the target. The result always lies in the box.
pub fn build_trial<F: Real, R: Rng + ?Sized>(
    pop: &Population<F>,
    i: usize,
    params: DeParams<F>,
    kind: Mutation,
    cross: Crossover,
    space: &SearchSpace<F>,
    archive: &PBestArchive<F>,
    rng: &mut R,
) -> Vec<F> {
    let mut mutant = mutate(kind, pop, i, params.f, archive, rng);
    space.clamp_in_place(&mut mutant);
    let target = &pop.members[i].position;
    match cross {
        Crossover::Binomial => crossover_binomial(target, &mutant, params.cr, rng),
        Crossover::Exponential => crossover_exponential(target, &mutant, params.cr, rng),
    }
}

/// Per-member outcome of one generation.
#[derive(Debug, Clone)]
pub struct GenerationOutcome<F: Real> {
    /// True where the trial replaced the target (ties included).
    pub success: Vec<bool>,
    /// Objective improvement `old - new` per member; zero for failures and
    /// for tie replacements.
    pub improvement: Vec<F>,
}

/// Run one synchronous generation: every trial is built against the
/// incoming population, and replacements are committed together at the end.
///
/// `params[i]` and `kinds[i]` drive member `i`. If the budget dies before
/// all trials are evaluated, the partial generation is discarded, the
/// population is left untouched, and the exhaustion signal is returned.
///
/// When `archive` is given, parents that are strictly improved upon are
/// pushed into it (feeding the archive-enabled pbest variant).
#[allow(clippy::too_many_arguments)]
pub fn de_generation<F: Real, O: Objective<F> + ?Sized, R: Rng + ?Sized>(
    pop: &mut Population<F>,
    params: &[DeParams<F>],
    kinds: &[Mutation],
    cross: Crossover,
    objective: &O,
    budget: &mut EvalBudget,
    mut archive: Option<&mut PBestArchive<F>>,
    rng: &mut R,
) -> Result<GenerationOutcome<F>, BudgetExhausted> {
    let n = pop.len();
    assert_eq!(params.len(), n, "one parameter pair per member");
    assert_eq!(kinds.len(), n, "one mutation kind per member");
    let space = objective.space();

    let mut trials: Vec<(Vec<F>, F)> = Vec::with_capacity(n);
    let empty = PBestArchive::new(0);
    for i in 0..n {
        let archive_view = archive.as_deref().unwrap_or(&empty);
        let trial = build_trial(pop, i, params[i], kinds[i], cross, space, archive_view, rng);
        let value = evaluate(objective, &trial, budget)?;
        trials.push((trial, value));
    }

    let mut success = vec![false; n];
    let mut improvement = vec![F::zero(); n];
    for (i, (trial, value)) in trials.into_iter().enumerate() {
        let old = pop.members[i].value;
        if select(old, value) {
            success[i] = true;
            if value < old {
                improvement[i] = old - value;
                if let Some(a) = archive.as_deref_mut() {
                    a.push(std::mem::take(&mut pop.members[i].position), rng);
                }
            }
            pop.members[i].position = trial;
            pop.members[i].value = value;
        }
    }
    pop.generation += 1;
    Ok(GenerationOutcome { success, improvement })
}

/// Fixed-parameter DE baseline configuration: one (F, CR) pair for the
/// whole run, no adaptation.
#[derive(Debug, Clone)]
pub struct PlainDeConfig<F: Real> {
    pub params: DeParams<F>,
    pub population_size: usize,
    pub mutation: Mutation,
    pub crossover: Crossover,
}

impl<F: Real> PlainDeConfig<F> {
    /// The classic textbook setting F = 0.5, CR = 0.9.
    pub fn standard(mutation: Mutation, crossover: Crossover, population_size: usize) -> Self {
        Self {
            params: DeParams::new(F::of(0.5), F::of(0.9)),
            population_size,
            mutation,
            crossover,
        }
    }

    pub fn validate(&self) -> Result<(), crate::error::Error> {
        if self.population_size < self.mutation.min_population() {
            return Err(crate::error::Error::InvalidConfig(format!(
                "population of {} too small for {:?} (needs {})",
                self.population_size,
                self.mutation,
                self.mutation.min_population()
            )));
        }
        Ok(())
    }

    /// Compact human-readable description for run records.
    pub fn describe(&self) -> String {
        format!(
            "de(F={},CR={},n={},mut={:?},cross={:?})",
            self.params.f, self.params.cr, self.population_size, self.mutation, self.crossover
        )
    }
}

/// Run fixed-parameter DE until the budget cannot cover another full
/// generation. Same budget and trace discipline as the adaptive runners:
/// evaluations = N x (1 + generations), best-value trace non-increasing.
pub fn de_run<F: Real, O: Objective<F> + ?Sized>(
    objective: &O,
    config: &PlainDeConfig<F>,
    budget: &mut EvalBudget,
    rng: &mut crate::rng::RngStream,
) -> Result<crate::record::RunRecord<F>, crate::error::Error> {
    config.validate()?;
    let n = config.population_size;
    if budget.remaining() < n as u64 {
        return Err(crate::error::Error::BudgetTooSmall {
            needed: n as u64,
            available: budget.remaining(),
        });
    }

    let seed = rng.seed();
    let start_used = budget.used();
    let mut pop = Population::init_uniform(objective, n, budget, rng)?;
    let mut trace = vec![pop.best().value];

    let params = vec![config.params; n];
    let kinds = vec![config.mutation; n];
    let uses_archive = matches!(config.mutation, Mutation::CurrentToPBest1 { archive: true, .. });
    let mut parent_archive = PBestArchive::new(if uses_archive { n } else { 0 });
    let mut generations = 0u64;

    while budget.remaining() >= n as u64 {
        match de_generation(
            &mut pop,
            &params,
            &kinds,
            config.crossover,
            objective,
            budget,
            uses_archive.then_some(&mut parent_archive),
            rng,
        ) {
            Ok(_) => {}
            Err(_) => break, // unreachable given the remaining-budget guard
        }
        generations += 1;
        trace.push(pop.best().value);
    }

    let evals = budget.used() - start_used;
    debug_assert_eq!(evals, (n as u64) * (1 + generations));
    let best = pop.best().clone();
    let optimum = objective.optimum_value().unwrap_or_else(F::zero);
    Ok(crate::record::RunRecord {
        algorithm: config.describe(),
        seed,
        best_error: crate::stats::objective_error(best.value, optimum),
        best_value: best.value,
        best_position: best.position,
        evals,
        generations,
        trace,
    })
}
