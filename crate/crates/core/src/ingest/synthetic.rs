//! Synthetic interaction logs with a power-law in-degree distribution.
//!
//! Nodes arrive one at a time. Every arrival adds about `mean_out_degree`
//! edges: the first one leaves the new node, the rest leave a uniformly
//! chosen existing node so that old nodes keep interacting with newcomers and
//! the graph grows a giant strongly connected component. Targets are picked
//! with probability proportional to `in_degree + a` where
//! `a = mean_out_degree * (gamma - 2)`, which yields an in-degree tail
//! `P(k) ~ k^-gamma`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::{IngestError, InteractionKind, InteractionRecord, TargetPeriod, UserAttributes};
use crate::rng;

/// Distribution of the number of interactions carried by one edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InteractionsPerEdge {
    Fixed(u32),
    /// Geometric on `{1, 2, ...}` with the given mean (>= 1).
    Geometric { mean: f64 },
}

impl InteractionsPerEdge {
    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        match *self {
            Self::Fixed(n) => n,
            Self::Geometric { mean } => {
                if mean <= 1.0 {
                    return 1;
                }
                let failures = Geometric::new(1.0 / mean).expect("mean above one").sample(rng);
                1 + failures.min(u64::from(u32::MAX - 1)) as u32
            }
        }
    }

    fn validate(&self) -> Result<(), IngestError> {
        match *self {
            Self::Fixed(0) => Err(IngestError::InvalidSpec("interactions per edge must be >= 1".into())),
            Self::Geometric { mean } if !(mean >= 1.0 && mean.is_finite()) => {
                Err(IngestError::InvalidSpec(format!("geometric mean {mean} must be >= 1")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub node_count: usize,
    /// In-degree exponent; must exceed 2.
    pub degree_exponent: f64,
    pub mean_out_degree: f64,
    pub interactions_per_edge: InteractionsPerEdge,
    /// Fraction of users, highest in-degree first, flagged verified.
    pub verified_fraction: f64,
    pub period: TargetPeriod,
    pub rng_seed: u64,
}

impl SyntheticSpec {
    pub fn new(node_count: usize, period: TargetPeriod, rng_seed: u64) -> Self {
        Self {
            node_count,
            degree_exponent: 2.5,
            mean_out_degree: 8.0,
            interactions_per_edge: InteractionsPerEdge::Fixed(1),
            verified_fraction: 0.02,
            period,
            rng_seed,
        }
    }

    fn validate(&self) -> Result<(), IngestError> {
        if self.node_count < 2 {
            return Err(IngestError::InvalidSpec(format!(
                "node_count must be at least 2, got {}",
                self.node_count
            )));
        }
        if !(self.degree_exponent > 2.0 && self.degree_exponent.is_finite()) {
            return Err(IngestError::InvalidSpec(format!(
                "degree_exponent must be a finite value above 2, got {}",
                self.degree_exponent
            )));
        }
        if !(self.mean_out_degree >= 1.0 && self.mean_out_degree.is_finite()) {
            return Err(IngestError::InvalidSpec(format!(
                "mean_out_degree must be at least 1, got {}",
                self.mean_out_degree
            )));
        }
        if !(0.0..=1.0).contains(&self.verified_fraction) {
            return Err(IngestError::InvalidSpec(format!(
                "verified_fraction must lie in [0, 1], got {}",
                self.verified_fraction
            )));
        }
        self.interactions_per_edge.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticLog {
    pub records: Vec<InteractionRecord>,
    pub attributes: Vec<UserAttributes>,
}

fn user_ids(n: usize) -> Vec<String> {
    let width = (n - 1).to_string().len();
    (0..n).map(|i| format!("u{i:0width$}")).collect()
}

/// Generates a reproducible heavy-tailed interaction log.
pub fn generate_powerlaw_graph(spec: &SyntheticSpec) -> Result<SyntheticLog, IngestError> {
    spec.validate()?;
    let n = spec.node_count;
    let mut topo = rng::stream(spec.rng_seed, "synthetic.topology", 0);
    let mut events = rng::stream(spec.rng_seed, "synthetic.events", 0);

    let attractiveness = spec.mean_out_degree * (spec.degree_exponent - 2.0);
    let base = spec.mean_out_degree.floor() as usize;
    let frac = spec.mean_out_degree - base as f64;

    let mut in_degree = vec![0u32; n];
    // one entry per edge, holding its target
    let mut pool: Vec<u32> = Vec::with_capacity((n as f64 * spec.mean_out_degree * 1.1) as usize);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(pool.capacity());
    let mut push = |edges: &mut Vec<(u32, u32)>, pool: &mut Vec<u32>, s: usize, t: usize| {
        edges.push((s as u32, t as u32));
        pool.push(t as u32);
        in_degree[t] += 1;
    };
    push(&mut edges, &mut pool, 0, 1);
    push(&mut edges, &mut pool, 1, 0);

    for v in 2..n {
        let mut k = base + usize::from(topo.random::<f64>() < frac);
        k = k.max(1);
        for e in 0..k {
            let source = if e == 0 { v } else { topo.random_range(0..=v) };
            let mut target = None;
            for _ in 0..16 {
                let total = pool.len() as f64 + attractiveness * v as f64;
                let u = topo.random::<f64>() * total;
                let cand = if u < pool.len() as f64 {
                    pool[(u as usize).min(pool.len() - 1)] as usize
                } else {
                    topo.random_range(0..v)
                };
                if cand != source {
                    target = Some(cand);
                    break;
                }
            }
            if let Some(t) = target {
                push(&mut edges, &mut pool, source, t);
            }
        }
    }

    let ids = user_ids(n);
    let (start, end) = (spec.period.start(), spec.period.end());
    let mut records = Vec::new();
    for &(s, t) in &edges {
        let count = spec.interactions_per_edge.sample(&mut events);
        for _ in 0..count {
            let kind = InteractionKind::ALL[events.random_range(0..3)];
            let timestamp = events.random_range(start..end);
            records.push(InteractionRecord::new(ids[s as usize].clone(), ids[t as usize].clone(), kind, timestamp));
        }
    }

    let verified_count = if spec.verified_fraction > 0.0 {
        ((spec.verified_fraction * n as f64).ceil() as usize).clamp(1, n)
    } else {
        0
    };
    let mut by_in_degree: Vec<usize> = (0..n).collect();
    by_in_degree.sort_by(|&a, &b| in_degree[b].cmp(&in_degree[a]).then(a.cmp(&b)));
    let mut verified = vec![false; n];
    for &u in &by_in_degree[..verified_count] {
        verified[u] = true;
    }
    let attributes = ids
        .into_iter()
        .zip(verified)
        .map(|(user_id, verified)| UserAttributes { user_id, verified })
        .collect();
    Ok(SyntheticLog { records, attributes })
}
