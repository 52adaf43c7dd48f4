//! Seeded credit distribution with early termination, plus baselines.

mod baselines;
mod credit;
mod ranking;
mod seeds;
mod truetop;

use thiserror::Error;

pub use self::baselines::{
    kred_baseline, kred_scores, pagerank_baseline, wec_power_iteration, PowerIteration,
};
pub use self::credit::{distribute_step, CreditState};
pub use self::ranking::{ranking_distance, RankedList};
pub use self::seeds::{reverse_credits, select_seeds, SeedConfig, SeedMethod, Seeds};
pub use self::truetop::{truetop_rank, TraceRow, TrueTopOutcome};

/// Default L1 threshold for credit convergence and power iteration.
pub const DEFAULT_THRESHOLD: f64 = 1e-9;
/// Threshold used when computing ground truth.
pub const GROUND_TRUTH_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum RankError {
    #[error("need {requested} seeds but the graph has only {available} verified users")]
    NotEnoughVerified { requested: usize, available: usize },
    #[error("seed count must be at least 1")]
    ZeroSeeds,
    #[error("rankings cover different user sets ({left} vs {right} users)")]
    MismatchedUsers { left: usize, right: usize },
    #[error("credit vector has {got} entries, graph has {expected} users")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid termination config: {0}")]
    InvalidTermination(String),
}

/// Inputs of the early-terminating ranker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TerminationConfig {
    /// Size of the monitored top list.
    pub k: usize,
    /// Largest ranking distance accepted as "stable".
    pub epsilon: f64,
    /// Iteration budget; the loop runs while `t < max_iterations`.
    pub max_iterations: usize,
    /// L1 convergence threshold for full credit distribution.
    pub eta: f64,
    /// L1 convergence threshold for power iteration.
    pub nu: f64,
}

impl Default for TerminationConfig {
    fn default() -> Self {
        Self { k: 100, epsilon: 0.0, max_iterations: 1000, eta: DEFAULT_THRESHOLD, nu: DEFAULT_THRESHOLD }
    }
}

impl TerminationConfig {
    pub fn new(k: usize, epsilon: f64, max_iterations: usize) -> Self {
        Self { k, epsilon, max_iterations, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), RankError> {
        if self.k == 0 {
            return Err(RankError::InvalidTermination("K must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(RankError::InvalidTermination(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(RankError::InvalidTermination("T must be at least 1".into()));
        }
        if !(self.eta > 0.0 && self.nu > 0.0) {
            return Err(RankError::InvalidTermination("eta and nu must be positive".into()));
        }
        if self.epsilon >= self.k as f64 {
            log::debug!("epsilon {} >= K {}: the top list may stop almost immediately", self.epsilon, self.k);
        }
        Ok(())
    }

    /// Cap for the full-convergence baselines: ten times the budget.
    pub fn hard_cap(&self) -> usize {
        self.max_iterations.saturating_mul(10)
    }
}
