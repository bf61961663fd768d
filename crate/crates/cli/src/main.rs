use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use cpa_cli::{compare_runs, parse_variant, read_runs_csv, resolve_output_dir, run_campaign, Campaign};

/// Benchmark harness for cluster-adaptive differential evolution.
#[derive(Parser)]
#[command(name = "cpa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a campaign config: every (problem, algorithm, run) triple,
    /// in parallel, with per-run CSV rows and summary tables.
    Run {
        /// Campaign TOML file (schema documented in the README).
        config: PathBuf,
        /// Worker threads (default: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Skip runs already present in the output's runs.csv.
        #[arg(long)]
        resume: bool,
        /// Output directory (overrides CPA_OUT_DIR and the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in benchmark problems.
    ListProblems,
    /// Parse an algorithm variant string and echo the resolved config.
    Parse {
        /// e.g. "CPA_8_0.2_50_200-DE_R^60" or "DE_R^60 F=0.5 CR=0.9".
        variant: String,
    },
    /// Rank-sum comparison between two stored runs.csv files.
    Compare {
        csv_a: PathBuf,
        csv_b: PathBuf,
        /// Significance level for the two-sided test.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            jobs,
            resume,
            out,
        } => {
            let campaign = Campaign::load(&config)?;
            let out_dir = resolve_output_dir(out.as_deref(), &campaign);
            eprintln!(
                "campaign: {} problems x {} algorithms x {} runs -> {}",
                campaign.problems.len(),
                campaign.algorithms.len(),
                campaign.runs,
                out_dir.display()
            );
            let outcome = run_campaign(&campaign, &out_dir, jobs, resume)?;
            eprintln!(
                "done: {} runs executed, {} resumed from disk",
                outcome.executed, outcome.skipped
            );
        }
        Command::ListProblems => {
            for id in cpa_core::benchmarks::ALL_BENCHMARKS {
                let half = id.box_half_width();
                println!(
                    "{:>4}  [{:>7}, {:>6}]^d  {}",
                    id.name(),
                    -half,
                    half,
                    id.description()
                );
            }
        }
        Command::Parse { variant } => {
            println!("{}", parse_variant(&variant)?.explain());
        }
        Command::Compare { csv_a, csv_b, alpha } => {
            let rows_a = read_runs_csv(&csv_a)?;
            let rows_b = read_runs_csv(&csv_b)?;
            print!("{}", compare_runs(&rows_a, &rows_b, alpha)?);
        }
    }
    Ok(())
}
