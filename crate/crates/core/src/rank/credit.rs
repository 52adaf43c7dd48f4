use crate::graph::NormalizedMatrix;

use super::RankError;

/// Credits held by every user after `iteration` distribution steps.
#[derive(Clone, Debug, PartialEq)]
pub struct CreditState {
    pub credits: Vec<f64>,
    pub iteration: usize,
}

impl CreditState {
    pub fn new(credits: Vec<f64>) -> Self {
        Self { credits, iteration: 0 }
    }

    /// `1/n` credits at every user.
    pub fn uniform(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// `1/s` credits at each of the `s` listed users.
    pub fn seeded(n: usize, seeds: &[usize]) -> Self {
        let mut credits = vec![0.0; n];
        for &s in seeds {
            credits[s] += 1.0 / seeds.len() as f64;
        }
        Self::new(credits)
    }

    pub fn total(&self) -> f64 {
        self.credits.iter().sum()
    }

    /// Credits held by the users flagged in `mask`.
    pub fn total_in(&self, mask: &[bool]) -> f64 {
        self.credits.iter().zip(mask).filter(|(_, &m)| m).map(|(c, _)| c).sum()
    }

    pub fn l1_distance(&self, other: &[f64]) -> f64 {
        self.credits.iter().zip(other).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// One round of credit distribution: every user forwards all of its
/// credits to its successors in proportion to edge weight.
pub fn distribute_step(state: &CreditState, w: &NormalizedMatrix) -> Result<CreditState, RankError> {
    let mut next = vec![0.0; state.credits.len()];
    distribute_into(state, w, &mut next)?;
    Ok(CreditState { credits: next, iteration: state.iteration + 1 })
}

/// Allocation-free variant writing into `out`.
pub(crate) fn distribute_into(state: &CreditState, w: &NormalizedMatrix, out: &mut [f64]) -> Result<(), RankError> {
    if state.credits.len() != w.dim() {
        return Err(RankError::DimensionMismatch { expected: w.dim(), got: state.credits.len() });
    }
    w.apply(&state.credits, out);
    Ok(())
}
