//! Campaign execution: seeded independent runs fanned out over a worker
//! pool, with deterministic CSV outputs.
//!
//! Every run's seed is derived directly from the master seed and the
//! run's identity (problem name, dimension, algorithm label, run index),
//! so neither execution order nor parallel scheduling can change any
//! result. Output rows are written in canonical campaign order
//! (problem, then algorithm, then run index); rerunning an identical
//! campaign reproduces `runs.csv` byte for byte except for the trailing
//! wall-clock column.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use crate::config::{Campaign, ProblemSpec};
use cpa_core::rng::{hash_tag, mix_seed};
use cpa_core::stats::{
    render_tally_text, summarize, tally, wilcoxon_rank_sum, ComparisonCell, TallyRow,
};

/// Version tag written as the first line of `runs.csv`.
pub const RUNS_FILE_TAG: &str = "# cpa-results-v1";
/// Column header of `runs.csv`. `wall_ms` is last so determinism checks
/// can strip it cheaply.
pub const RUNS_HEADER: &str = "problem,dim,algorithm,run,seed,best_error,evals,generations,wall_ms";
/// Version tag written as the first line of `wilcoxon.csv`.
pub const WILCOXON_FILE_TAG: &str = "# cpa-wilcoxon-v1";
pub const WILCOXON_HEADER: &str =
    "problem,dim,algorithm_a,algorithm_b,outcome,p_value,u_statistic,median_a,median_b";

/// One completed run, as stored in `runs.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub problem: String,
    pub dim: usize,
    pub algorithm: String,
    pub run: usize,
    pub seed: u64,
    pub best_error: f64,
    pub evals: u64,
    pub generations: u64,
    pub wall_ms: u64,
}

impl RunRow {
    pub fn key(&self) -> (String, usize, String, usize) {
        (
            self.problem.clone(),
            self.dim,
            self.algorithm.clone(),
            self.run,
        )
    }

    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.16e},{},{},{}",
            self.problem,
            self.dim,
            self.algorithm,
            self.run,
            self.seed,
            self.best_error,
            self.evals,
            self.generations,
            self.wall_ms
        )
    }

    fn from_csv(line: &str, lineno: usize) -> Result<Self> {
        // Algorithm labels are validated comma-free at config time, so a
        // plain split is exact. Labels may contain '=', ' ' and '^'.
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            bail!("line {lineno}: expected 9 comma-separated fields, found {}", fields.len());
        }
        let ctx = |what: &str| format!("line {lineno}: bad {what}");
        Ok(RunRow {
            problem: fields[0].to_string(),
            dim: fields[1].parse().with_context(|| ctx("dim"))?,
            algorithm: fields[2].to_string(),
            run: fields[3].parse().with_context(|| ctx("run"))?,
            seed: fields[4].parse().with_context(|| ctx("seed"))?,
            best_error: fields[5].parse().with_context(|| ctx("best_error"))?,
            evals: fields[6].parse().with_context(|| ctx("evals"))?,
            generations: fields[7].parse().with_context(|| ctx("generations"))?,
            wall_ms: fields[8].parse().with_context(|| ctx("wall_ms"))?,
        })
    }
}

/// Derive the seed for one run from the campaign master seed. Depends
/// only on the run's identity, never on execution order.
pub fn run_seed(master: u64, problem: &str, dim: usize, algorithm: &str, run: usize) -> u64 {
    mix_seed(
        master,
        &[
            hash_tag(problem.as_bytes()),
            dim as u64,
            hash_tag(algorithm.as_bytes()),
            run as u64,
        ],
    )
}

/// Read a `runs.csv`, tolerating the tag and header lines.
pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') || line == RUNS_HEADER {
            continue;
        }
        rows.push(RunRow::from_csv(line, i + 1)?);
    }
    Ok(rows)
}

fn write_runs_csv(path: &Path, rows: &[RunRow]) -> Result<()> {
    let mut out = String::new();
    out.push_str(RUNS_FILE_TAG);
    out.push('\n');
    out.push_str(RUNS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Errors grouped by (problem, dim, algorithm), in campaign order.
struct ErrorTable<'a> {
    campaign: &'a Campaign,
    /// `samples[p][a]` = sorted-by-run error list for problem p, algorithm a.
    samples: Vec<Vec<Vec<f64>>>,
}

impl<'a> ErrorTable<'a> {
    fn build(campaign: &'a Campaign, rows: &[RunRow]) -> Self {
        let mut samples =
            vec![vec![Vec::new(); campaign.algorithms.len()]; campaign.problems.len()];
        for (pi, p) in campaign.problems.iter().enumerate() {
            for (ai, a) in campaign.algorithms.iter().enumerate() {
                let mut per_run: Vec<(usize, f64)> = rows
                    .iter()
                    .filter(|r| {
                        r.problem == p.name && r.dim == p.dim && r.algorithm == a.label
                    })
                    .map(|r| (r.run, r.best_error))
                    .collect();
                per_run.sort_by_key(|(run, _)| *run);
                samples[pi][ai] = per_run.into_iter().map(|(_, e)| e).collect();
            }
        }
        Self { campaign, samples }
    }

    fn errors(&self, problem_index: usize, algorithm_index: usize) -> &[f64] {
        &self.samples[problem_index][algorithm_index]
    }
}

/// The Wilcoxon cell for every algorithm pair on every problem.
fn write_wilcoxon_csv(path: &Path, table: &ErrorTable, alpha: f64) -> Result<()> {
    let mut out = String::new();
    out.push_str(WILCOXON_FILE_TAG);
    out.push('\n');
    out.push_str(WILCOXON_HEADER);
    out.push('\n');
    let algos = &table.campaign.algorithms;
    for (pi, p) in table.campaign.problems.iter().enumerate() {
        for ai in 0..algos.len() {
            for bi in ai + 1..algos.len() {
                let a = table.errors(pi, ai);
                let b = table.errors(pi, bi);
                if a.is_empty() || b.is_empty() {
                    continue;
                }
                let cell = wilcoxon_rank_sum(a, b, alpha)?;
                writeln!(
                    out,
                    "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                    p.name,
                    p.dim,
                    algos[ai].label,
                    algos[bi].label,
                    cell.outcome.symbol(),
                    cell.p_value,
                    cell.u_statistic,
                    cell.median_a,
                    cell.median_b
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Per-dimension summaries: mean (std) per problem x algorithm, plus the
/// win/loss/draw tally for every algorithm pair.
fn write_summaries(out_dir: &Path, table: &ErrorTable, alpha: f64) -> Result<()> {
    let dims: BTreeSet<usize> = table.campaign.problems.iter().map(|p| p.dim).collect();
    for dim in dims {
        let problem_indices: Vec<usize> = table
            .campaign
            .problems
            .iter()
            .enumerate()
            .filter(|(_, p)| p.dim == dim)
            .map(|(i, _)| i)
            .collect();
        let algos = &table.campaign.algorithms;

        // Aligned text: one row per problem, one column per algorithm.
        let mut txt = String::new();
        writeln!(txt, "mean error (sample std) over {} runs, {}-D", table.campaign.runs, dim)
            .unwrap();
        let name_w = problem_indices
            .iter()
            .map(|&pi| table.campaign.problems[pi].name.len())
            .chain(["problem".len()])
            .max()
            .unwrap();
        let col_w = algos.iter().map(|a| a.label.len()).max().unwrap().max(23);
        write!(txt, "{:name_w$}", "problem").unwrap();
        for a in algos {
            write!(txt, "  {:>col_w$}", a.label).unwrap();
        }
        txt.push('\n');
        for &pi in &problem_indices {
            write!(txt, "{:name_w$}", table.campaign.problems[pi].name).unwrap();
            for ai in 0..algos.len() {
                let errors = table.errors(pi, ai);
                if errors.is_empty() {
                    write!(txt, "  {:>col_w$}", "-").unwrap();
                } else {
                    let (mean, std) = summarize(errors);
                    let cell = format!("{mean:.3e} ({std:.2e})");
                    write!(txt, "  {cell:>col_w$}").unwrap();
                }
            }
            txt.push('\n');
        }

        // Pairwise rank-sum tallies across this dimension's problems.
        let mut tally_rows = Vec::new();
        for ai in 0..algos.len() {
            for bi in ai + 1..algos.len() {
                let mut cells: Vec<ComparisonCell> = Vec::new();
                for &pi in &problem_indices {
                    let a = table.errors(pi, ai);
                    let b = table.errors(pi, bi);
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    cells.push(wilcoxon_rank_sum(a, b, alpha)?);
                }
                if cells.is_empty() {
                    continue;
                }
                let counts = tally(cells.iter().map(|c| c.outcome));
                tally_rows.push(TallyRow {
                    label: format!("{} vs {}", algos[ai].label, algos[bi].label),
                    wins: counts.0,
                    losses: counts.1,
                    draws: counts.2,
                });
            }
        }
        if !tally_rows.is_empty() {
            txt.push('\n');
            writeln!(txt, "rank-sum verdicts at {:.0}% confidence", (1.0 - alpha) * 100.0)
                .unwrap();
            txt.push_str(&render_tally_text(&tally_rows));
            std::fs::write(
                out_dir.join(format!("summary_{dim}.csv")),
                cpa_core::stats::render_tally_csv(&tally_rows),
            )?;
        }
        std::fs::write(out_dir.join(format!("summary_{dim}.txt")), txt)?;
    }
    Ok(())
}

/// What `run_campaign` did, for reporting and tests.
#[derive(Debug)]
pub struct CampaignOutcome {
    pub executed: usize,
    pub skipped: usize,
    pub rows: Vec<RunRow>,
}

/// Execute a campaign into `out_dir`.
///
/// `jobs` = worker threads (0 = one per core). With `resume`, rows whose
/// (problem, dim, algorithm, run) key already exists in `runs.csv` are
/// kept as-is and not re-executed. Any run failure aborts with an error
/// after the parallel phase completes.
pub fn run_campaign(
    campaign: &Campaign,
    out_dir: &Path,
    jobs: usize,
    resume: bool,
) -> Result<CampaignOutcome> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let runs_path = out_dir.join("runs.csv");

    let existing: Vec<RunRow> = if resume && runs_path.exists() {
        read_runs_csv(&runs_path)?
    } else {
        Vec::new()
    };
    let done: HashSet<_> = existing.iter().map(|r| r.key()).collect();

    // Canonical enumeration: problems x algorithms x run index.
    struct Task<'a> {
        problem: &'a ProblemSpec,
        algorithm_index: usize,
        run: usize,
    }
    let mut tasks = Vec::new();
    for p in &campaign.problems {
        for (ai, a) in campaign.algorithms.iter().enumerate() {
            for run in 0..campaign.runs {
                let key = (p.name.clone(), p.dim, a.label.clone(), run);
                if !done.contains(&key) {
                    tasks.push(Task {
                        problem: p,
                        algorithm_index: ai,
                        run,
                    });
                }
            }
        }
    }
    let skipped = campaign.total_runs() - tasks.len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")?;
    let results: Vec<Result<RunRow>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let a = &campaign.algorithms[t.algorithm_index];
                let problem = campaign.problem(t.problem)?;
                let evals = campaign.budget.evals_for(t.problem.dim);
                let seed =
                    run_seed(campaign.master_seed, &t.problem.name, t.problem.dim, &a.label, t.run);
                let started = Instant::now();
                let record = a.execute(&problem, evals, seed).with_context(|| {
                    format!(
                        "running {} on {}:{} (run {})",
                        a.label, t.problem.name, t.problem.dim, t.run
                    )
                })?;
                Ok(RunRow {
                    problem: t.problem.name.clone(),
                    dim: t.problem.dim,
                    algorithm: a.label.clone(),
                    run: t.run,
                    seed,
                    best_error: record.best_error,
                    evals: record.evals,
                    generations: record.generations,
                    wall_ms: started.elapsed().as_millis() as u64,
                })
            })
            .collect()
    });

    let mut fresh = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => fresh.push(row),
            Err(e) => failures.push(format!("{e:#}")),
        }
    }
    if !failures.is_empty() {
        bail!(
            "{} of {} runs failed:\n  {}",
            failures.len(),
            fresh.len() + failures.len(),
            failures.join("\n  ")
        );
    }

    // Merge and order canonically; campaign-foreign rows (from an older
    // config sharing the file) are preserved after the campaign block.
    let mut by_key: std::collections::HashMap<_, RunRow> = existing
        .into_iter()
        .chain(fresh.iter().cloned())
        .map(|r| (r.key(), r))
        .collect();
    let mut ordered = Vec::with_capacity(campaign.total_runs());
    for p in &campaign.problems {
        for a in &campaign.algorithms {
            for run in 0..campaign.runs {
                let key = (p.name.clone(), p.dim, a.label.clone(), run);
                if let Some(row) = by_key.remove(&key) {
                    ordered.push(row);
                }
            }
        }
    }
    let mut foreign: Vec<RunRow> = by_key.into_values().collect();
    foreign.sort_by_key(|r| r.key());
    ordered.extend(foreign);

    write_runs_csv(&runs_path, &ordered)?;
    let table = ErrorTable::build(campaign, &ordered);
    write_wilcoxon_csv(&out_dir.join("wilcoxon.csv"), &table, 0.05)?;
    write_summaries(out_dir, &table, 0.05)?;

    Ok(CampaignOutcome {
        executed: fresh.len(),
        skipped,
        rows: ordered,
    })
}

/// Cross-file comparison: group each file's rows by algorithm and
/// compare every algorithm in `a` against every algorithm in `b` on the
/// (problem, dim) instances they share. Returns the aligned-text report.
pub fn compare_runs(rows_a: &[RunRow], rows_b: &[RunRow], alpha: f64) -> Result<String> {
    let algos = |rows: &[RunRow]| -> Vec<String> {
        let mut seen = Vec::new();
        for r in rows {
            if !seen.contains(&r.algorithm) {
                seen.push(r.algorithm.clone());
            }
        }
        seen
    };
    let problems = |rows: &[RunRow], algo: &str| -> Vec<(String, usize)> {
        let mut seen = Vec::new();
        for r in rows {
            if r.algorithm == algo && !seen.contains(&(r.problem.clone(), r.dim)) {
                seen.push((r.problem.clone(), r.dim));
            }
        }
        seen
    };
    let errors = |rows: &[RunRow], algo: &str, problem: &(String, usize)| -> Vec<f64> {
        let mut per_run: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.algorithm == algo && r.problem == problem.0 && r.dim == problem.1)
            .map(|r| (r.run, r.best_error))
            .collect();
        per_run.sort_by_key(|(run, _)| *run);
        per_run.into_iter().map(|(_, e)| e).collect()
    };

    let mut out = String::new();
    let mut tally_rows = Vec::new();
    for a in algos(rows_a) {
        for b in algos(rows_b) {
            let shared: Vec<(String, usize)> = problems(rows_a, &a)
                .into_iter()
                .filter(|p| problems(rows_b, &b).contains(p))
                .collect();
            if shared.is_empty() {
                continue;
            }
            writeln!(out, "{a}  vs  {b}").unwrap();
            let name_w = shared
                .iter()
                .map(|(n, d)| n.len() + 1 + d.to_string().len())
                .max()
                .unwrap()
                .max("problem".len());
            writeln!(
                out,
                "{:name_w$}  {:>3}  {:>12}  {:>12}  {:>12}",
                "problem", "vs", "p-value", "median-a", "median-b"
            )
            .unwrap();
            let mut cells = Vec::new();
            for p in &shared {
                let cell =
                    wilcoxon_rank_sum(&errors(rows_a, &a, p), &errors(rows_b, &b, p), alpha)?;
                writeln!(
                    out,
                    "{:name_w$}  {:>3}  {:>12.4e}  {:>12.4e}  {:>12.4e}",
                    format!("{}:{}", p.0, p.1),
                    cell.outcome.symbol(),
                    cell.p_value,
                    cell.median_a,
                    cell.median_b
                )
                .unwrap();
                cells.push(cell);
            }
            let counts = tally(cells.iter().map(|c| c.outcome));
            tally_rows.push(TallyRow {
                label: format!("{a} vs {b}"),
                wins: counts.0,
                losses: counts.1,
                draws: counts.2,
            });
            out.push('\n');
        }
    }
    if tally_rows.is_empty() {
        bail!("the two files share no (problem, dimension) instances");
    }
    writeln!(out, "rank-sum verdicts at {:.0}% confidence", (1.0 - alpha) * 100.0).unwrap();
    out.push_str(&render_tally_text(&tally_rows));
    Ok(out)
}
