use crate::graph::NormalizedMatrix;

use super::credit::distribute_into;
use super::{ranking_distance, CreditState, RankError, RankedList, TerminationConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub d_k: usize,
    /// Credits held by the labelled region, when one is given.
    pub region_credits: Option<f64>,
    pub l1_step: f64,
}

#[derive(Clone, Debug)]
pub struct TrueTopOutcome {
    pub ranking: RankedList,
    pub k: usize,
    /// Distribution steps performed.
    pub iterations: usize,
    /// The budget ran out before the top list settled.
    pub not_stabilized: bool,
    pub state: CreditState,
    pub trace: Vec<TraceRow>,
}

impl TrueTopOutcome {
    pub fn top(&self) -> &[usize] {
        self.ranking.top(self.k)
    }
}

/// Distributes credits from `initial` until two consecutive top-K lists
/// are within `epsilon` of each other, or the budget is spent.
pub fn truetop_rank(
    w: &NormalizedMatrix,
    initial: &[f64],
    term: &TerminationConfig,
    region: Option<&[bool]>,
) -> Result<TrueTopOutcome, RankError> {
    term.validate()?;
    if initial.len() != w.dim() {
        return Err(RankError::DimensionMismatch { expected: w.dim(), got: initial.len() });
    }
    let mut state = CreditState::new(initial.to_vec());
    let mut ranking = RankedList::from_credits(&state.credits);
    let mut next = vec![0.0; w.dim()];
    let mut trace = Vec::new();
    let mut not_stabilized = true;
    let mut t = 1;
    while t < term.max_iterations {
        distribute_into(&state, w, &mut next)?;
        let l1_step = state.l1_distance(&next);
        std::mem::swap(&mut state.credits, &mut next);
        state.iteration = t;
        let current = ranking.rerank(&state.credits);
        let d_k = ranking_distance(&ranking, &current, term.k)?;
        ranking = current;
        trace.push(TraceRow { t, d_k, region_credits: region.map(|m| state.total_in(m)), l1_step });
        if d_k as f64 <= term.epsilon {
            not_stabilized = false;
            break;
        }
        t += 1;
    }
    Ok(TrueTopOutcome { ranking, k: term.k, iterations: state.iteration, not_stabilized, state, trace })
}
