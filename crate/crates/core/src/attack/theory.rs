use crate::graph::{GraphBuilder, GraphError, InteractionGraph, WeightModel};

use super::AttackError;

/// Leak estimate `io_sybil * (n2 / n1) / (1 + io_honest)` where
/// `honest_per_sybil = n1 / n2`.
pub fn estimate_alpha_star(honest_per_sybil: f64, io_ratio_honest: f64, io_ratio_sybil: f64) -> f64 {
    io_ratio_sybil / honest_per_sybil / (1.0 + io_ratio_honest)
}

/// Credits in the sybil region after `t >= 1` steps when all credits start
/// in the honest region, honest users leak `alpha` and sybils return `beta`.
pub fn prop1_closed_form(alpha: f64, beta: f64, t: u32) -> Result<f64, AttackError> {
    let sum = alpha + beta;
    if !(sum > 0.0 && sum < 1.0) || alpha < 0.0 || beta < 0.0 {
        return Err(AttackError::UndefinedParameter(format!("need 0 < alpha + beta < 1, got {alpha} + {beta}")));
    }
    if t == 0 {
        return Ok(0.0);
    }
    let limit = alpha / sum;
    Ok((1.0 - 1.0 / sum) * alpha * (1.0 - sum).powi(t as i32 - 1) + limit)
}

/// Aggregate two-region credit recurrence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoRegionModel {
    pub alpha: f64,
    pub beta: f64,
    pub honest: f64,
    pub sybil: f64,
}

impl TwoRegionModel {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, honest: 1.0, sybil: 0.0 }
    }

    pub fn step(&mut self) {
        let (h, s) = (self.honest, self.sybil);
        self.honest = (1.0 - self.alpha) * h + self.beta * s;
        self.sybil = self.alpha * h + (1.0 - self.beta) * s;
    }
}

/// Two complete regions in which every honest user sends exactly `alpha`
/// of its out-weight to the sybils and every sybil sends `beta` back.
/// Honest users are `h0000..`, sybils `s0000..`; `h0000` is verified.
pub fn two_region_graph(n_honest: usize, n_sybil: usize, alpha: f64, beta: f64) -> Result<InteractionGraph, GraphError> {
    if n_honest < 2 || n_sybil < 2 || !(0.0..1.0).contains(&alpha) || !(0.0..1.0).contains(&beta) {
        return Err(GraphError::InvalidModel(format!(
            "two-region graph needs >= 2 users per side and leaks in [0, 1), got {n_honest}, {n_sybil}, {alpha}, {beta}"
        )));
    }
    let mut b = GraphBuilder::new(WeightModel::Sum, 1);
    b.add_user("h0000", true);
    wire_side(&mut b, ('h', n_honest), ('s', n_sybil), alpha);
    wire_side(&mut b, ('s', n_sybil), ('h', n_honest), beta);
    b.build()
}

fn wire_side(b: &mut GraphBuilder, (own, n_own): (char, usize), (other, n_other): (char, usize), leak: f64) {
    for i in 0..n_own {
        let source = format!("{own}{i:04}");
        for j in (0..n_own).filter(|&j| j != i) {
            b.add_edge(&source, &format!("{own}{j:04}"), (1.0 - leak) / (n_own - 1) as f64, vec![0]);
        }
        if leak > 0.0 {
            for j in 0..n_other {
                b.add_edge(&source, &format!("{other}{j:04}"), leak / n_other as f64, vec![0]);
            }
        }
    }
}

/// Largest `x` such that `x` sybils sharing `sybil_credits` evenly each beat
/// the honest user ranked `K + 1 - x`; `honest_top` holds `C_1 >= .. >= C_K`.
pub fn sybil_count_metric(sybil_credits: f64, honest_top: &[f64]) -> usize {
    let k = honest_top.len();
    if k == 0 || sybil_credits < honest_top[k - 1] {
        return 0;
    }
    (1..=k).rev().find(|&x| sybil_credits >= x as f64 * honest_top[k - x]).unwrap_or(0)
}

/// Upper bound on sybils in the top `k` after `t` steps with leak `alpha`.
pub fn theorem2_bound(alpha: f64, t: usize, k: usize) -> f64 {
    let kept = (1.0 - alpha).powf(t as f64);
    k as f64 * (1.0 - kept) / kept
}
