//! Ground truth, accuracy and resilience metrics, theory checks and the
//! attack experiment driver.

mod experiment;
mod metrics;
mod spectral;

use thiserror::Error;

use crate::graph::NormalizedMatrix;
use crate::rank::{wec_power_iteration, RankedList, GROUND_TRUTH_THRESHOLD};

pub use self::experiment::{
    aggregate, AggregateReport, EvalReport, Experiment, ExperimentConfig, Method,
};
pub use self::metrics::{type1_error, type2_error, Member, Placement};
pub use self::spectral::{
    estimate_lambda, fit_power_law, lemma1_check, relative_gap_curve, theorem1_check, LambdaEstimate,
    Lemma1Report, PowerLawFit, RelativeGaps, Theorem1Report,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ground truth did not converge within {0} iterations")]
    NotConverged(usize),
    #[error(transparent)]
    Rank(#[from] crate::rank::RankError),
    #[error(transparent)]
    Attack(#[from] crate::attack::AttackError),
}

/// Converged influence over the honest region and its top list.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub pi: Vec<f64>,
    pub ranking: RankedList,
    /// Effective list size, clipped to the user count.
    pub k: usize,
    pub nu: f64,
    pub iterations: usize,
    /// `false` when the hard cap was hit first (periodic graph).
    pub converged: bool,
}

impl GroundTruth {
    pub fn top(&self) -> &[usize] {
        self.ranking.top(self.k)
    }
}

/// Power iteration from the uniform vector until the L1 step is below `nu`.
pub fn ground_truth(w: &NormalizedMatrix, k: usize, nu: f64, cap: usize) -> GroundTruth {
    let n = w.dim();
    if k > n {
        log::warn!("K = {k} exceeds the {n} honest users; clipping");
    }
    let start = vec![1.0 / n as f64; n];
    let run = wec_power_iteration(w, &start, nu, cap);
    if !run.converged {
        log::warn!("ground truth stopped at the cap of {cap} iterations (step {})", run.last_step);
    }
    GroundTruth {
        ranking: RankedList::from_credits(&run.credits),
        pi: run.credits,
        k: k.min(n),
        nu,
        iterations: run.iterations,
        converged: run.converged,
    }
}

/// [`ground_truth`] at the default threshold.
pub fn default_ground_truth(w: &NormalizedMatrix, k: usize, cap: usize) -> GroundTruth {
    ground_truth(w, k, GROUND_TRUTH_THRESHOLD, cap)
}
