//! Experiment harness for the cluster-adaptive DE library: campaign
//! configs, algorithm variant strings, parallel run execution, and CSV
//! reporting. The binary in this crate (`cpa`) is a thin wrapper over
//! these modules.

pub mod config;
pub mod runner;
pub mod variant;

pub use config::{resolve_output_dir, BudgetRule, Campaign, ProblemSpec};
pub use runner::{compare_runs, read_runs_csv, run_campaign, run_seed, CampaignOutcome, RunRow};
pub use variant::{parse_variant, Algorithm, AlgorithmKind, VariantError};
