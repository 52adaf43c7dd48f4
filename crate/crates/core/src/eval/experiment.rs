use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{attach_sybil_region, sybil_retweet_records, theorem2_bound, AttackScenario, AugmentedGraph};
use crate::graph::{InteractionGraph, NormalizedMatrix};
use crate::ingest::TargetPeriod;
use crate::rank::{
    kred_baseline, kred_scores, pagerank_baseline, reverse_credits, truetop_rank, wec_power_iteration, SeedMethod,
    Seeds, TerminationConfig,
};
use crate::rng;

use super::{ground_truth, type1_error, type2_error, EvalError, GroundTruth, Placement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Seeded distribution with early termination.
    Truetop,
    /// Seeded distribution run to convergence.
    Wec,
    Pagerank,
    /// Incoming-interaction count.
    Kred,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Truetop, Method::Wec, Method::Pagerank, Method::Kred];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Truetop => "truetop",
            Method::Wec => "wec",
            Method::Pagerank => "pagerank",
            Method::Kred => "kred",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected truetop, wec, pagerank or kred)"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub term: TerminationConfig,
    pub seed_count: usize,
    pub seed_method: SeedMethod,
    pub pagerank_reset: f64,
    pub methods: Vec<Method>,
    /// Window of the sybils' daily mutual retweets counted by Kred; `None`
    /// leaves sybils with their attack edges only.
    pub kred_period: Option<TargetPeriod>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            term: TerminationConfig::default(),
            seed_count: 100,
            seed_method: SeedMethod::Basic,
            pagerank_reset: 0.15,
            methods: Method::ALL.to_vec(),
            kred_period: None,
        }
    }
}

/// Outcome of one method on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub type1: f64,
    pub type2: usize,
    pub sybil_count: usize,
    pub iterations: usize,
    /// Sybil bound for the realized leak and iteration count; absent for
    /// methods without iterations.
    pub bound: Option<f64>,
    pub method: Method,
    /// Scenario descriptor as given.
    pub scenario: String,
    pub trial: usize,
    pub rng_seed: u64,
    #[serde(skip)]
    pub alpha: f64,
    #[serde(skip)]
    pub sybil_credits: f64,
    #[serde(skip)]
    pub stabilized: bool,
}

/// Shared state for running many trials against one honest graph.
pub struct Experiment<'a> {
    honest: &'a InteractionGraph,
    truth: GroundTruth,
    config: ExperimentConfig,
    honest_in: Vec<u64>,
    reverse: OnceLock<Vec<f64>>,
    sybil_tally: Mutex<HashMap<usize, Vec<u64>>>,
}

impl<'a> Experiment<'a> {
    /// Computes the ground truth on `honest` (assumed strongly connected).
    pub fn new(honest: &'a InteractionGraph, config: ExperimentConfig) -> Self {
        let w = NormalizedMatrix::from_graph(honest);
        let truth = ground_truth(&w, config.term.k, crate::rank::GROUND_TRUTH_THRESHOLD, config.term.hard_cap());
        Self::with_truth(honest, truth, config)
    }

    pub fn with_truth(honest: &'a InteractionGraph, truth: GroundTruth, config: ExperimentConfig) -> Self {
        Self {
            honest,
            truth,
            honest_in: honest.in_interactions(),
            config,
            reverse: OnceLock::new(),
            sybil_tally: Mutex::new(HashMap::new()),
        }
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Seeds for one trial: the scenario's known seeds first, topped up to
    /// the configured count from the other verified users.
    pub fn seeds_for(&self, scen: &AttackScenario, trial: usize) -> Result<Seeds, EvalError> {
        let g = self.honest;
        let s = self.config.seed_count;
        let mut chosen = Vec::with_capacity(s);
        let mut taken = vec![false; g.user_count()];
        for id in &scen.known_seeds {
            let u = g.index_of(id).ok_or_else(|| crate::attack::AttackError::UnknownSeed(id.clone()))?;
            if !taken[u] && chosen.len() < s {
                taken[u] = true;
                chosen.push(u);
            }
        }
        let candidates: Vec<usize> = g.verified_users().into_iter().filter(|&u| !taken[u]).collect();
        let extra = s - chosen.len();
        if candidates.len() < extra {
            return Err(crate::rank::RankError::NotEnoughVerified {
                requested: s,
                available: candidates.len() + chosen.len(),
            }
            .into());
        }
        let n = g.user_count();
        match self.config.seed_method {
            SeedMethod::Basic => {
                let mut rng = rng::stream(scen.rng_seed, "eval.seeds", trial as u64);
                chosen.extend(sample(&mut rng, candidates.len(), extra).into_iter().map(|i| candidates[i]));
                Ok(Seeds::uniform(n, &chosen))
            }
            SeedMethod::ReverseWec => {
                let reverse = self
                    .reverse
                    .get_or_init(|| reverse_credits(g, self.config.term.eta, self.config.term.hard_cap()));
                let mut ranked = candidates;
                ranked.sort_by(|&a, &b| reverse[b].total_cmp(&reverse[a]).then(a.cmp(&b)));
                chosen.extend_from_slice(&ranked[..extra]);
                Ok(Seeds::proportional(n, &chosen, reverse))
            }
        }
    }

    fn sybil_scores(&self, aug: &AugmentedGraph, period: &TargetPeriod) -> Vec<u64> {
        let mut cache = self.sybil_tally.lock().expect("tally cache poisoned");
        cache
            .entry(aug.sybil_count())
            .or_insert_with(|| {
                let tally = kred_scores(&aug.graph, sybil_retweet_records(aug.sybil_count(), period));
                aug.sybil_index.iter().map(|&a| tally[a]).collect()
            })
            .clone()
    }

    fn kred(&self, aug: &AugmentedGraph) -> Vec<u64> {
        let mut scores = vec![0u64; aug.graph.user_count()];
        for (h, &a) in aug.honest_index.iter().enumerate() {
            scores[a] = self.honest_in[h];
        }
        for &h in &aug.attacked {
            for e in aug.graph.out_edges(aug.honest_index[h]).filter(|e| aug.is_sybil[e.target]) {
                scores[e.target] += 1;
            }
        }
        if let Some(period) = &self.config.kred_period {
            for (s, extra) in self.sybil_scores(aug, period).into_iter().enumerate() {
                scores[aug.sybil_index[s]] += extra;
            }
        }
        scores
    }

    /// Runs every configured method on trial `trial` of `scen`.
    pub fn run_trial(&self, scen: &AttackScenario, scenario_text: &str, trial: usize) -> Result<Vec<EvalReport>, EvalError> {
        let seeds = self.seeds_for(scen, trial)?;
        let aug = attach_sybil_region(self.honest, &scen.region(), scen, trial as u64)?;
        let w = NormalizedMatrix::from_graph(&aug.graph);
        let mut initial = vec![0.0; aug.graph.user_count()];
        for &u in &seeds.users {
            initial[aug.honest_index[u]] = seeds.initial[u];
        }
        let k = self.truth.k;
        let term = self.config.term;
        let report = |method, placement: Placement, iterations, bound, sybil_credits, stabilized| EvalReport {
            type1: type1_error(&self.truth, &placement),
            type2: type2_error(&self.truth, &placement),
            sybil_count: placement.sybil_count(),
            iterations,
            bound,
            method,
            scenario: scenario_text.to_owned(),
            trial,
            rng_seed: scen.rng_seed,
            alpha: aug.alpha,
            sybil_credits,
            stabilized,
        };
        let credit_based = |method, credits: &[f64], iterations, stabilized| {
            let honest: Vec<f64> = aug.honest_index.iter().map(|&a| credits[a]).collect();
            let sybil: f64 = aug.sybil_index.iter().map(|&a| credits[a]).sum();
            let placement = Placement::attacker_optimal(&honest, sybil, k);
            report(method, placement, iterations, Some(theorem2_bound(aug.alpha, iterations, k)), sybil, stabilized)
        };
        let mut out = Vec::with_capacity(self.config.methods.len());
        for &method in &self.config.methods {
            out.push(match method {
                Method::Truetop => {
                    let run = truetop_rank(&w, &initial, &term, None)?;
                    credit_based(method, &run.state.credits, run.iterations, !run.not_stabilized)
                }
                Method::Wec => {
                    let run = wec_power_iteration(&w, &initial, term.nu, term.hard_cap());
                    credit_based(method, &run.credits, run.iterations, run.converged)
                }
                Method::Pagerank => {
                    let run = pagerank_baseline(&w, self.config.pagerank_reset, term.nu, term.hard_cap());
                    credit_based(method, &run.credits, run.iterations, run.converged)
                }
                Method::Kred => {
                    let scores = self.kred(&aug);
                    let sybil = aug.sybil_index.iter().map(|&a| scores[a] as f64).sum();
                    let placement = Placement::literal(&kred_baseline(&scores), &aug, k);
                    report(method, placement, 0, None, sybil, true)
                }
            });
        }
        Ok(out)
    }

    /// Every trial's outcome, in trial order.
    pub fn run_results(&self, scen: &AttackScenario, scenario_text: &str) -> Vec<Result<Vec<EvalReport>, EvalError>> {
        (0..scen.trials).into_par_iter().map(|trial| self.run_trial(scen, scenario_text, trial)).collect()
    }

    /// All `scen.trials` trials, in trial order; failed trials are logged
    /// and left out.
    pub fn run(&self, scen: &AttackScenario, scenario_text: &str) -> Vec<EvalReport> {
        let mut reports = Vec::new();
        for (trial, result) in self.run_results(scen, scenario_text).into_iter().enumerate() {
            match result {
                Ok(r) => reports.extend(r),
                Err(e) => log::error!("trial {trial} failed: {e}"),
            }
        }
        reports
    }
}

/// Per-method means over trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub method: Method,
    pub trials: usize,
    pub mean_type1: f64,
    pub mean_type2: f64,
    pub mean_sybil_count: f64,
    pub max_sybil_count: usize,
    pub mean_iterations: f64,
    /// Trials whose sybil count exceeded the bound.
    pub bound_violations: usize,
}

pub fn aggregate(reports: &[EvalReport]) -> Vec<AggregateReport> {
    let mut by_method: Vec<(Method, Vec<&EvalReport>)> = Vec::new();
    for r in reports {
        match by_method.iter_mut().find(|(m, _)| *m == r.method) {
            Some((_, v)) => v.push(r),
            None => by_method.push((r.method, vec![r])),
        }
    }
    by_method.sort_by_key(|(m, _)| *m);
    by_method
        .into_iter()
        .map(|(method, rs)| {
            let n = rs.len() as f64;
            let mean = |f: &dyn Fn(&EvalReport) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            AggregateReport {
                method,
                trials: rs.len(),
                mean_type1: mean(&|r| r.type1),
                mean_type2: mean(&|r| r.type2 as f64),
                mean_sybil_count: mean(&|r| r.sybil_count as f64),
                max_sybil_count: rs.iter().map(|r| r.sybil_count).max().unwrap_or(0),
                mean_iterations: mean(&|r| r.iterations as f64),
                bound_violations: rs.iter().filter(|r| r.bound.is_some_and(|b| r.sybil_count as f64 > b)).count(),
            }
        })
        .collect()
}
