use std::borrow::Borrow;

use crate::graph::{InteractionGraph, NormalizedMatrix};
use crate::ingest::InteractionRecord;

use super::RankedList;

/// Result of an iterate-until-small-step loop.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerIteration {
    pub credits: Vec<f64>,
    pub iterations: usize,
    /// L1 norm of the last step.
    pub last_step: f64,
    pub converged: bool,
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `x <- x W` from `v0` until the L1 step drops below `nu` or `cap` steps.
pub fn wec_power_iteration(w: &NormalizedMatrix, v0: &[f64], nu: f64, cap: usize) -> PowerIteration {
    assert_eq!(v0.len(), w.dim(), "start vector does not match the matrix");
    let mut x = v0.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut last_step = f64::INFINITY;
    for t in 1..=cap {
        w.apply(&x, &mut next);
        last_step = l1(&x, &next);
        std::mem::swap(&mut x, &mut next);
        if last_step < nu {
            return PowerIteration { credits: x, iterations: t, last_step, converged: true };
        }
    }
    PowerIteration { credits: x, iterations: cap, last_step, converged: false }
}

/// Teleporting iteration `x <- (1 - reset) x W + reset / n`, from uniform.
pub fn pagerank_baseline(w: &NormalizedMatrix, reset: f64, nu: f64, cap: usize) -> PowerIteration {
    let n = w.dim();
    let teleport = reset / n as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut last_step = f64::INFINITY;
    for t in 1..=cap {
        w.apply(&x, &mut next);
        for v in next.iter_mut() {
            *v = (1.0 - reset) * *v + teleport;
        }
        last_step = l1(&x, &next);
        std::mem::swap(&mut x, &mut next);
        if last_step < nu {
            return PowerIteration { credits: x, iterations: t, last_step, converged: true };
        }
    }
    PowerIteration { credits: x, iterations: cap, last_step, converged: false }
}

/// Incoming-interaction counts per user of `g`, tallied from records.
/// Records naming users outside the graph are ignored.
pub fn kred_scores<I>(g: &InteractionGraph, records: I) -> Vec<u64>
where
    I: IntoIterator,
    I::Item: Borrow<InteractionRecord>,
{
    let mut scores = vec![0u64; g.user_count()];
    for r in records {
        let r = r.borrow();
        if r.source == r.target {
            continue;
        }
        if let Some(t) = g.index_of(&r.target) {
            scores[t] += 1;
        }
    }
    scores
}

/// Ranking by incoming-interaction count.
pub fn kred_baseline(scores: &[u64]) -> RankedList {
    let as_f64: Vec<f64> = scores.iter().map(|&c| c as f64).collect();
    RankedList::from_credits(&as_f64)
}
