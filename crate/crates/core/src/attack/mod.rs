//! Sybil regions, attack edges and the worst-case credit model.

mod attach;
mod theory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

pub use self::attach::{attach_sybil_region, sybil_retweet_records, AugmentedGraph};
pub use self::theory::{
    estimate_alpha_star, prop1_closed_form, sybil_count_metric, theorem2_bound, two_region_graph, TwoRegionModel,
};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("need {requested} attack targets but only {available} are eligible")]
    NotEnoughTargets { requested: usize, available: usize },
    #[error("known seed `{0}` is not an honest user")]
    UnknownSeed(String),
    #[error("sybil id `{0}` collides with an honest user")]
    IdCollision(String),
    #[error("undefined parameters: {0}")]
    UndefinedParameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStrategy {
    /// `w_g` uniformly drawn honest users.
    Random,
    /// `w_g` users around a random honest user, in breadth-first order over
    /// edges of either direction.
    Community,
    /// `w_g` users drawn from the first `d` users reached from the known
    /// seeds along out-edges.
    SeedAttack,
}

impl fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackStrategy::Random => "random",
            AttackStrategy::Community => "community",
            AttackStrategy::SeedAttack => "seed_attack",
        })
    }
}

impl FromStr for AttackStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(AttackStrategy::Random),
            "community" => Ok(AttackStrategy::Community),
            "seed_attack" | "seed" => Ok(AttackStrategy::SeedAttack),
            other => Err(format!("unknown attack strategy `{other}`")),
        }
    }
}

/// Internal wiring of the sybil region; sybils are numbered `0..n2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SybilTopology {
    /// Every ordered pair of distinct sybils, weight one.
    CompleteDigraph,
    /// Explicit `(source, target, weight)` triples.
    Custom(Vec<(usize, usize, f64)>),
}

impl Default for SybilTopology {
    fn default() -> Self {
        SybilTopology::CompleteDigraph
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SybilRegion {
    pub size: usize,
    pub topology: SybilTopology,
    /// Share of each sybil's out-weight sent back to honest users; zero is
    /// the worst case where the region keeps every credit it receives.
    pub outgoing_to_honest: f64,
}

impl SybilRegion {
    pub fn complete(size: usize) -> Self {
        Self { size, topology: SybilTopology::CompleteDigraph, outgoing_to_honest: 0.0 }
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if self.size == 0 {
            return Err(AttackError::InvalidScenario("n2 must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.outgoing_to_honest) {
            return Err(AttackError::InvalidScenario(format!(
                "beta must lie in [0, 1), got {}",
                self.outgoing_to_honest
            )));
        }
        if let SybilTopology::Custom(edges) = &self.topology {
            for &(s, t, w) in edges {
                if s >= self.size || t >= self.size || s == t || !(w > 0.0 && w.is_finite()) {
                    return Err(AttackError::InvalidScenario(format!("bad sybil edge ({s}, {t}, {w})")));
                }
            }
        }
        Ok(())
    }

    /// `(source, target, weight)` of the internal edges.
    pub fn internal_edges(&self) -> Vec<(usize, usize, f64)> {
        match &self.topology {
            SybilTopology::CompleteDigraph => (0..self.size)
                .flat_map(|s| (0..self.size).filter(move |&t| t != s).map(move |t| (s, t, 1.0)))
                .collect(),
            SybilTopology::Custom(edges) => edges.clone(),
        }
    }
}

fn default_n2() -> usize {
    500
}

fn default_d() -> usize {
    3000
}

fn default_trials() -> usize {
    50
}

/// One attack setting, readable from a TOML descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackScenario {
    pub strategy: AttackStrategy,
    /// Number of unit-weight honest-to-sybil edges.
    pub w_g: usize,
    #[serde(default = "default_n2")]
    pub n2: usize,
    /// Size of the target pool around the known seeds.
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub topology: SybilTopology,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub known_seeds: Vec<String>,
}

impl AttackScenario {
    pub fn new(strategy: AttackStrategy, w_g: usize, rng_seed: u64) -> Self {
        Self {
            strategy,
            w_g,
            n2: default_n2(),
            d: default_d(),
            topology: SybilTopology::CompleteDigraph,
            beta: 0.0,
            rng_seed,
            trials: default_trials(),
            known_seeds: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, AttackError> {
        let scenario: Self = toml::from_str(text).map_err(|e| AttackError::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn region(&self) -> SybilRegion {
        SybilRegion { size: self.n2, topology: self.topology.clone(), outgoing_to_honest: self.beta }
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if self.w_g == 0 {
            return Err(AttackError::InvalidScenario("w_g must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(AttackError::InvalidScenario("d must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(AttackError::InvalidScenario("trials must be at least 1".into()));
        }
        if self.strategy == AttackStrategy::SeedAttack && self.known_seeds.is_empty() {
            return Err(AttackError::InvalidScenario("seed_attack requires known_seeds".into()));
        }
        self.region().validate()
    }
}
