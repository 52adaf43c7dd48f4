//! Sybil-resilient influence ranking for directed interaction graphs.
//!
//! The crate turns time-stamped interaction logs (retweets, replies, mentions)
//! into a weighted directed graph, ranks users by seeded iterative credit
//! distribution with early termination on top-K stability, and ships the
//! machinery to attack and evaluate that ranking:
//!
//! - [`ingest`]: log and attribute parsing, synthetic power-law logs.
//! - [`graph`]: edge weights, GSCC extraction, row-stochastic normalization.
//! - [`rank`]: seed selection, credit distribution, early termination and
//!   the baseline rankers (full power iteration, PageRank, in-count).
//! - [`attack`]: sybil regions, attack strategies and the closed-form
//!   credit-leak analysis.
//! - [`eval`]: ground truth, accuracy metrics, spectral estimates and the
//!   baseline comparison harness.
//! - [`cli`]: the `truetop` command-line front end.

pub mod attack;
pub mod cli;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod rank;
pub mod rng;

pub use attack::{AttackScenario, AttackStrategy, AugmentedGraph, SybilRegion, SybilTopology};
pub use eval::{EvalReport, GroundTruth};
pub use graph::{InteractionGraph, NormalizedMatrix, WeightModel};
pub use ingest::{InteractionKind, InteractionRecord, TargetPeriod, UserAttributes};
pub use rank::{CreditState, RankedList, SeedConfig, SeedMethod, TerminationConfig};
