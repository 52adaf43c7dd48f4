use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;

use crate::graph::{inverse_unit_graph, InteractionGraph, NormalizedMatrix};
use crate::rng;

use super::baselines::wec_power_iteration;
use super::{RankError, DEFAULT_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMethod {
    /// Even split over `s` uniformly drawn verified users.
    Basic,
    /// Top-`s` verified users by credit on the reversed unit-weight graph,
    /// seeded in proportion to that credit.
    ReverseWec,
}

impl fmt::Display for SeedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedMethod::Basic => "basic",
            SeedMethod::ReverseWec => "reverse_wec",
        })
    }
}

impl FromStr for SeedMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(SeedMethod::Basic),
            "reverse_wec" | "reverse-wec" | "rwec" => Ok(SeedMethod::ReverseWec),
            other => Err(format!("unknown seed method `{other}` (expected basic or reverse_wec)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedConfig {
    pub count: usize,
    pub method: SeedMethod,
    pub rng_seed: u64,
    /// Convergence threshold of the reverse distribution.
    pub eta: f64,
    /// Iteration cap of the reverse distribution.
    pub max_iterations: usize,
}

impl SeedConfig {
    pub fn new(count: usize, method: SeedMethod, rng_seed: u64) -> Self {
        Self { count, method, rng_seed, eta: DEFAULT_THRESHOLD, max_iterations: 10_000 }
    }
}

/// Chosen seeds and the initial credit vector over all users.
#[derive(Clone, Debug, PartialEq)]
pub struct Seeds {
    /// Seed indices, ascending.
    pub users: Vec<usize>,
    pub initial: Vec<f64>,
}

impl Seeds {
    /// Even split over the given users.
    pub fn uniform(n: usize, users: &[usize]) -> Self {
        let mut users = users.to_vec();
        users.sort_unstable();
        users.dedup();
        let mut initial = vec![0.0; n];
        for &u in &users {
            initial[u] = 1.0 / users.len() as f64;
        }
        Self { users, initial }
    }

    /// Credits over `users` in proportion to `weight`, even when all of
    /// them weigh zero.
    pub fn proportional(n: usize, users: &[usize], weight: &[f64]) -> Self {
        let mut users = users.to_vec();
        users.sort_unstable();
        users.dedup();
        let total: f64 = users.iter().map(|&u| weight[u]).sum();
        if !(total > 0.0) {
            return Self::uniform(n, &users);
        }
        let mut initial = vec![0.0; n];
        for &u in &users {
            initial[u] = weight[u] / total;
        }
        Self { users, initial }
    }
}

/// Credits after distributing from all verified users over the reversed
/// unit-weight graph until the L1 step is below `eta`.
pub fn reverse_credits(g: &InteractionGraph, eta: f64, cap: usize) -> Vec<f64> {
    let inverse = NormalizedMatrix::from_graph(&inverse_unit_graph(g));
    let start = Seeds::uniform(g.user_count(), &g.verified_users()).initial;
    let reverse = wec_power_iteration(&inverse, &start, eta, cap);
    if !reverse.converged {
        log::warn!("reverse distribution stopped after {} iterations above {}", reverse.iterations, eta);
    }
    reverse.credits
}

pub fn select_seeds(g: &InteractionGraph, cfg: &SeedConfig) -> Result<Seeds, RankError> {
    if cfg.count == 0 {
        return Err(RankError::ZeroSeeds);
    }
    let verified = g.verified_users();
    if verified.len() < cfg.count {
        return Err(RankError::NotEnoughVerified { requested: cfg.count, available: verified.len() });
    }
    let n = g.user_count();
    match cfg.method {
        SeedMethod::Basic => {
            let mut rng = rng::stream(cfg.rng_seed, "rank.seeds", 0);
            let picked: Vec<usize> =
                sample(&mut rng, verified.len(), cfg.count).into_iter().map(|i| verified[i]).collect();
            Ok(Seeds::uniform(n, &picked))
        }
        SeedMethod::ReverseWec => {
            let reverse = reverse_credits(g, cfg.eta, cfg.max_iterations);
            let mut by_credit = verified;
            by_credit.sort_by(|&a, &b| reverse[b].total_cmp(&reverse[a]).then(a.cmp(&b)));
            by_credit.truncate(cfg.count);
            Ok(Seeds::proportional(n, &by_credit, &reverse))
        }
    }
}
