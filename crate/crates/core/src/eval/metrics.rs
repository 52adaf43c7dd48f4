use crate::attack::{sybil_count_metric, AugmentedGraph};
use crate::rank::RankedList;

use super::GroundTruth;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Member {
    Honest(usize),
    /// Sybil by its order among the sybils of the output.
    Sybil(usize),
}

/// An output ranking seen from the honest region: the top list plus the
/// output rank of every honest user and every listed sybil.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    top: Vec<Member>,
    honest_rank: Vec<usize>,
    sybil_rank: Vec<usize>,
}

impl Placement {
    /// Output ranking of honest users only.
    pub fn honest_only(ranking: &RankedList, k: usize) -> Self {
        let top = ranking.top(k).iter().map(|&u| Member::Honest(u)).collect();
        let honest_rank = (0..ranking.len()).map(|u| ranking.rank(u)).collect();
        Self { top, honest_rank, sybil_rank: Vec::new() }
    }

    /// The adversary's best use of `sybil_credits`: the largest number of
    /// sybils that can each hold an equal share and still enter the top
    /// `k`, placed ahead of every honest user they tie with.
    pub fn attacker_optimal(honest_credits: &[f64], sybil_credits: f64, k: usize) -> Self {
        let honest = RankedList::from_credits(honest_credits);
        let k = k.min(honest.len());
        let top_credits: Vec<f64> = honest.top(k).iter().map(|&u| honest.credit(u)).collect();
        let x = sybil_count_metric(sybil_credits, &top_credits);
        let share = if x > 0 { sybil_credits / x as f64 } else { 0.0 };
        let ahead = if x > 0 { honest.order().iter().take_while(|&&u| honest.credit(u) > share).count() } else { 0 };
        let shift = |r: usize| if r <= ahead { r } else { r + x };
        let honest_rank = (0..honest.len()).map(|u| shift(honest.rank(u))).collect();
        let sybil_rank = (1..=x).map(|i| ahead + i).collect();
        let mut top: Vec<Member> = honest.order()[..ahead].iter().map(|&u| Member::Honest(u)).collect();
        top.extend((0..x).map(Member::Sybil));
        top.extend(honest.order()[ahead..].iter().take(k - ahead - x).map(|&u| Member::Honest(u)));
        Self { top, honest_rank, sybil_rank }
    }

    /// A ranking over an augmented graph taken at face value.
    pub fn literal(ranking: &RankedList, aug: &AugmentedGraph, k: usize) -> Self {
        let honest_of = aug.honest_of();
        let mut honest_rank = vec![0; aug.honest_count()];
        let mut sybil_rank = Vec::new();
        let mut top = Vec::new();
        for (pos, &u) in ranking.order().iter().enumerate() {
            let member = match honest_of[u] {
                Some(h) => {
                    honest_rank[h] = pos + 1;
                    Member::Honest(h)
                }
                None => {
                    sybil_rank.push(pos + 1);
                    Member::Sybil(sybil_rank.len() - 1)
                }
            };
            if pos < k {
                top.push(member);
            }
        }
        Self { top, honest_rank, sybil_rank }
    }

    pub fn top(&self) -> &[Member] {
        &self.top
    }

    pub fn sybil_count(&self) -> usize {
        self.top.iter().filter(|m| matches!(m, Member::Sybil(_))).count()
    }

    pub fn honest_rank(&self, u: usize) -> usize {
        self.honest_rank[u]
    }
}

/// Mean rank offset between the true and the output top lists. A sybil's
/// true rank is taken as following every honest user, in sybil order.
pub fn type1_error(truth: &GroundTruth, output: &Placement) -> f64 {
    let k = truth.k;
    let n_honest = truth.ranking.len();
    let mut in_union = vec![false; n_honest];
    let mut distance = 0usize;
    for &u in truth.top() {
        in_union[u] = true;
        distance += output.honest_rank[u].abs_diff(truth.ranking.rank(u));
    }
    for m in output.top.iter().take(k) {
        match *m {
            Member::Honest(u) if !in_union[u] => {
                in_union[u] = true;
                distance += output.honest_rank[u].abs_diff(truth.ranking.rank(u));
            }
            Member::Honest(_) => {}
            Member::Sybil(i) => distance += output.sybil_rank[i].abs_diff(n_honest + i + 1),
        }
    }
    distance as f64 / k as f64
}

/// True top users missing from the output top list.
pub fn type2_error(truth: &GroundTruth, output: &Placement) -> usize {
    let mut listed = vec![false; truth.ranking.len()];
    for m in output.top.iter().take(truth.k) {
        if let Member::Honest(u) = *m {
            listed[u] = true;
        }
    }
    truth.k - truth.top().iter().filter(|&&u| listed[u]).count()
}
