//! Cluster-based parameter adaptation for differential evolution.
//!
//! This crate implements an online controller that learns good (F, CR)
//! control parameters for differential evolution while the optimization is
//! running: successful parameter pairs are archived, periodically clustered
//! with k-means, and fresh parameter candidates are sampled around the
//! cluster centroids with a decaying random-direction law. Alongside the
//! controller it ships a plain fixed-parameter DE, a success-history
//! baseline with per-slot parameter memories, a suite of eleven shifted
//! benchmark functions, and the rank-sum statistics used to compare them.
//!
//! Everything numeric is generic over the scalar type via [`Real`]
//! (`f32` or `f64`); the `*64` aliases at the crate root pin the
//! double-precision instantiation the command-line harness uses.
//!
//! Reproducibility: all randomness flows through [`rng::RngStream`]
//! (ChaCha8, documented in that module); a run is a pure function of its
//! configuration and seed.

pub mod benchmarks;
pub mod budget;
pub mod clustering;
pub mod cpa;
pub mod de;
pub mod error;
pub mod objective;
pub mod population;
pub mod record;
pub mod rng;
pub mod scalar;
pub mod shade;
pub mod space;
pub mod stats;

pub use budget::EvalBudget;
pub use error::{BudgetExhausted, Error};
pub use objective::Objective;
pub use rng::RngStream;
pub use scalar::Real;

pub type SearchSpace64 = space::SearchSpace<f64>;
pub type Population64 = population::Population<f64>;
pub type BenchmarkProblem64 = benchmarks::BenchmarkProblem<f64>;
pub type DeParams64 = de::DeParams<f64>;
pub type CpaConfig64 = cpa::CpaConfig<f64>;
pub type PlainDeConfig64 = de::PlainDeConfig<f64>;
pub type RunRecord64 = record::RunRecord<f64>;
pub type ClusterModel64 = clustering::ClusterModel<f64>;
