//! Campaign configuration: a TOML file describing which algorithms run
//! on which problems, how often, and under what budget.
//!
//! ```toml
//! runs = 25                 # independent repetitions (default 25)
//! budget = "soco"           # "soco" = 5000 x dim, "cec" = 10000 x dim,
//!                           # or an explicit integer evaluation count
//! master_seed = 20240915
//! shift_seed = 1            # optional; fixes the benchmark shift vectors
//! output_dir = "results"    # optional; see output-directory precedence
//! algorithms = [
//!     "CPA_8_0.2_50_200-DE_R^60",
//!     "DE_R^60 F=0.5 CR=0.9",
//!     "SHADE_C^100",
//! ]
//! problems = [
//!     { name = "f1", dim = 50 },
//!     { name = "f4", dim = 50 },
//! ]
//! ```
//!
//! `shift_seed` is deliberately separate from `master_seed`: changing the
//! master seed re-randomizes the runs but keeps the problem instances
//! (shift vectors) fixed, so result sets stay comparable.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use crate::variant::{parse_variant, Algorithm};
use cpa_core::benchmarks::make_problem;
use cpa_core::BenchmarkProblem64;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    problems: Vec<ProblemSpec>,
    algorithms: Vec<String>,
    #[serde(default = "default_runs")]
    runs: usize,
    budget: BudgetRule,
    master_seed: u64,
    #[serde(default = "default_shift_seed")]
    shift_seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn default_runs() -> usize {
    25
}

fn default_shift_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
}

/// Evaluation budget per run, possibly dimension-dependent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetRule {
    /// 5000 evaluations per dimension.
    Soco,
    /// 10000 evaluations per dimension.
    Cec,
    Explicit(u64),
}

impl BudgetRule {
    pub fn evals_for(&self, dim: usize) -> u64 {
        match self {
            BudgetRule::Soco => 5000 * dim as u64,
            BudgetRule::Cec => 10_000 * dim as u64,
            BudgetRule::Explicit(e) => *e,
        }
    }
}

impl<'de> Deserialize<'de> for BudgetRule {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Named(String),
            Explicit(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Named(s) => match s.as_str() {
                "soco" => Ok(BudgetRule::Soco),
                "cec" => Ok(BudgetRule::Cec),
                other => Err(serde::de::Error::custom(format!(
                    "budget must be \"soco\", \"cec\", or an integer, not {other:?}"
                ))),
            },
            Raw::Explicit(e) if e > 0 => Ok(BudgetRule::Explicit(e as u64)),
            Raw::Explicit(e) => Err(serde::de::Error::custom(format!(
                "budget must be positive, not {e}"
            ))),
        }
    }
}

/// A validated campaign: every variant parsed, every problem resolvable.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub problems: Vec<ProblemSpec>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub budget: BudgetRule,
    pub master_seed: u64,
    pub shift_seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Campaign {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: CampaignFile = toml::from_str(text).context("parsing campaign TOML")?;
        Self::resolve(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading campaign config {}", path.display()))?;
        Self::from_toml(&text)
    }

    fn resolve(file: CampaignFile) -> Result<Self> {
        if file.runs < 1 {
            bail!("runs must be at least 1");
        }
        if file.problems.is_empty() {
            bail!("campaign lists no problems");
        }
        if file.algorithms.is_empty() {
            bail!("campaign lists no algorithms");
        }

        let mut seen = std::collections::HashSet::new();
        for p in &file.problems {
            // Surface bad names/dimensions now rather than mid-campaign.
            make_problem::<f64>(&p.name, p.dim, file.shift_seed)
                .with_context(|| format!("problem {}:{}", p.name, p.dim))?;
            if !seen.insert((p.name.clone(), p.dim)) {
                bail!("duplicate problem entry {}:{}", p.name, p.dim);
            }
        }

        let mut algorithms = Vec::with_capacity(file.algorithms.len());
        let mut labels = std::collections::HashSet::new();
        for spec in &file.algorithms {
            let algo = parse_variant(spec)?;
            if algo.label.contains(',') || algo.label.contains('\n') {
                bail!("algorithm spec {:?} may not contain ',' or newlines", algo.label);
            }
            if !labels.insert(algo.label.clone()) {
                bail!("duplicate algorithm spec {:?}", algo.label);
            }
            algorithms.push(algo);
        }

        Ok(Campaign {
            problems: file.problems,
            algorithms,
            runs: file.runs,
            budget: file.budget,
            master_seed: file.master_seed,
            shift_seed: file.shift_seed,
            output_dir: file.output_dir,
        })
    }

    /// Build the shared problem instance for one campaign entry.
    pub fn problem(&self, spec: &ProblemSpec) -> Result<BenchmarkProblem64> {
        Ok(make_problem(&spec.name, spec.dim, self.shift_seed)?)
    }

    /// Total number of runs the campaign describes.
    pub fn total_runs(&self) -> usize {
        self.problems.len() * self.algorithms.len() * self.runs
    }
}

/// Resolve the output directory: explicit flag, then the `CPA_OUT_DIR`
/// environment variable, then the config field, then `./results`.
pub fn resolve_output_dir(flag: Option<&Path>, campaign: &Campaign) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os("CPA_OUT_DIR") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    campaign
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"))
}
