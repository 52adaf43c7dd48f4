//! Weighted directed interaction graphs.
//!
//! Users are densely indexed in ascending user-id order. Every component that
//! breaks ties "by ascending user id" relies on this, so all constructors keep
//! it.

mod balanced;
mod matrix;
mod scc;
mod snapshot;
mod weights;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ingest::{InteractionRecord, TargetPeriod, UserAttributes};

pub use self::balanced::balanced_power_law;
pub use self::matrix::NormalizedMatrix;
pub use self::scc::{extract_gscc, strongly_connected_components, GsccReport};
pub use self::snapshot::{read_snapshot, write_snapshot};
pub use self::weights::{edge_weight_entropy, edge_weight_sum};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("no interactions to build a graph from")]
    EmptyGraph,
    #[error("record {source_id} -> {target_id} at {timestamp} lies outside the target period")]
    OutOfPeriod { source_id: String, target_id: String, timestamp: i64 },
    #[error("self-interaction by `{0}`")]
    SelfInteraction(String),
    #[error("invalid edge {source_id} -> {target_id}: {reason}")]
    InvalidEdge { source_id: String, target_id: String, reason: String },
    #[error("duplicate user `{0}`")]
    DuplicateUser(String),
    #[error("invalid weight model: {0}")]
    InvalidModel(String),
    #[error("snapshot line {line}: {reason}")]
    Snapshot { line: usize, reason: String },
    #[error("cannot generate graph: {0}")]
    Generator(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// How interaction counts turn into edge weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightModel {
    Sum,
    /// Entropy-scaled counts over `epochs` equal slices of the period.
    Entropy { epochs: u32 },
}

impl WeightModel {
    /// Weight for the given per-epoch counts, `None` when there is no
    /// interaction at all.
    pub fn weight(&self, counts: &[u32]) -> Option<f64> {
        match self {
            Self::Sum => Some(edge_weight_sum(counts)).filter(|&w| w > 0.0),
            Self::Entropy { .. } => edge_weight_entropy(counts),
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sum => f.write_str("sum"),
            Self::Entropy { epochs } => write!(f, "entropy:{epochs}"),
        }
    }
}

impl FromStr for WeightModel {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "sum" {
            return Ok(Self::Sum);
        }
        let epochs = s
            .strip_prefix("entropy:")
            .ok_or_else(|| GraphError::InvalidModel(format!("unknown model `{s}`")))?;
        let epochs: u32 = epochs
            .parse()
            .map_err(|_| GraphError::InvalidModel(format!("bad epoch count in `{s}`")))?;
        if epochs == 0 {
            return Err(GraphError::InvalidModel("entropy model needs at least one epoch".into()));
        }
        Ok(Self::Entropy { epochs })
    }
}

/// An outgoing edge as seen from its source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<'a> {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    /// Interactions per epoch; all zero for synthetic edges not backed by
    /// records.
    pub counts: &'a [u32],
}

/// Weighted directed graph stored as compressed rows, sorted by target.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionGraph {
    users: Vec<String>,
    verified: Vec<bool>,
    model: WeightModel,
    epochs: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    counts: Vec<u32>,
}

/// An edge under construction, endpoints already indexed.
#[derive(Clone, Debug)]
pub(crate) struct RawEdge {
    pub source: u32,
    pub target: u32,
    pub weight: f64,
    pub counts: Vec<u32>,
}

impl InteractionGraph {
    /// Assembles a graph from sorted unique `users` and indexed edges.
    pub(crate) fn assemble(
        users: Vec<String>,
        verified: Vec<bool>,
        model: WeightModel,
        epochs: usize,
        mut edges: Vec<RawEdge>,
    ) -> Result<Self, GraphError> {
        debug_assert_eq!(users.len(), verified.len());
        if let Some(w) = users.windows(2).find(|w| w[0] >= w[1]) {
            return Err(GraphError::DuplicateUser(w[1].clone()));
        }
        let n = users.len();
        edges.sort_by_key(|e| (e.source, e.target));
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        let mut counts = Vec::with_capacity(edges.len() * epochs);
        let mut prev: Option<(u32, u32)> = None;
        for e in &edges {
            let invalid = |reason: &str| GraphError::InvalidEdge {
                source_id: users.get(e.source as usize).cloned().unwrap_or_default(),
                target_id: users.get(e.target as usize).cloned().unwrap_or_default(),
                reason: reason.into(),
            };
            if e.source as usize >= n || e.target as usize >= n {
                return Err(invalid("endpoint out of range"));
            }
            if e.source == e.target {
                return Err(GraphError::SelfInteraction(users[e.source as usize].clone()));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(invalid("weight must be positive and finite"));
            }
            if e.counts.len() != epochs {
                return Err(invalid("epoch count mismatch"));
            }
            if prev == Some((e.source, e.target)) {
                return Err(invalid("duplicate edge"));
            }
            prev = Some((e.source, e.target));
            offsets[e.source as usize + 1] += 1;
            targets.push(e.target);
            weights.push(e.weight);
            counts.extend_from_slice(&e.counts);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self { users, verified, model, epochs, offsets, targets, weights, counts })
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn user_id(&self, idx: usize) -> &str {
        &self.users[idx]
    }

    /// Dense index of `id`.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.users.binary_search_by(|u| u.as_str().cmp(id)).ok()
    }

    pub fn is_verified(&self, idx: usize) -> bool {
        self.verified[idx]
    }

    pub fn verified_flags(&self) -> &[bool] {
        &self.verified
    }

    pub fn verified_users(&self) -> Vec<usize> {
        (0..self.user_count()).filter(|&i| self.verified[i]).collect()
    }

    pub fn model(&self) -> WeightModel {
        self.model
    }

    /// Length of every per-edge count vector.
    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn out_degree(&self, idx: usize) -> usize {
        self.offsets[idx + 1] - self.offsets[idx]
    }

    pub fn out_edges(&self, idx: usize) -> impl Iterator<Item = Edge<'_>> + '_ {
        (self.offsets[idx]..self.offsets[idx + 1]).map(move |e| self.edge_at(idx, e))
    }

    /// All edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = Edge<'_>> + '_ {
        (0..self.user_count()).flat_map(move |i| self.out_edges(i))
    }

    fn edge_at(&self, source: usize, e: usize) -> Edge<'_> {
        Edge {
            source,
            target: self.targets[e] as usize,
            weight: self.weights[e],
            counts: &self.counts[e * self.epochs..(e + 1) * self.epochs],
        }
    }

    pub fn edge(&self, source: usize, target: usize) -> Option<Edge<'_>> {
        let row = &self.targets[self.offsets[source]..self.offsets[source + 1]];
        row.binary_search(&(target as u32))
            .ok()
            .map(|pos| self.edge_at(source, self.offsets[source] + pos))
    }

    pub fn out_weight(&self, idx: usize) -> f64 {
        self.weights[self.offsets[idx]..self.offsets[idx + 1]].iter().sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Interactions received by each user, summed over all epochs.
    pub fn in_interactions(&self) -> Vec<u64> {
        let mut received = vec![0u64; self.user_count()];
        for e in self.edges() {
            received[e.target] += e.counts.iter().map(|&d| u64::from(d)).sum::<u64>();
        }
        received
    }

    /// Subgraph induced by the users with `keep[i] == true`.
    pub fn induced_subgraph(&self, keep: &[bool]) -> InteractionGraph {
        assert_eq!(keep.len(), self.user_count());
        let mut remap = vec![u32::MAX; self.user_count()];
        let mut users = Vec::new();
        let mut verified = Vec::new();
        for i in (0..self.user_count()).filter(|&i| keep[i]) {
            remap[i] = users.len() as u32;
            users.push(self.users[i].clone());
            verified.push(self.verified[i]);
        }
        let edges = self
            .edges()
            .filter(|e| keep[e.source] && keep[e.target])
            .map(|e| RawEdge {
                source: remap[e.source],
                target: remap[e.target],
                weight: e.weight,
                counts: e.counts.to_vec(),
            })
            .collect();
        Self::assemble(users, verified, self.model, self.epochs, edges)
            .expect("induced subgraph of a valid graph is valid")
    }
}

/// Builds a graph from string-keyed users and edges.
#[derive(Debug)]
pub struct GraphBuilder {
    model: WeightModel,
    epochs: usize,
    users: HashMap<String, bool>,
    edges: Vec<(String, String, f64, Vec<u32>)>,
}

impl GraphBuilder {
    pub fn new(model: WeightModel, epochs: usize) -> Self {
        Self { model, epochs, users: HashMap::new(), edges: Vec::new() }
    }

    /// Registers a user; a later `true` wins over an earlier `false`.
    pub fn add_user(&mut self, id: &str, verified: bool) -> &mut Self {
        *self.users.entry(id.to_owned()).or_insert(false) |= verified;
        self
    }

    pub fn add_edge(&mut self, source: &str, target: &str, weight: f64, counts: Vec<u32>) -> &mut Self {
        self.add_user(source, false).add_user(target, false);
        self.edges.push((source.to_owned(), target.to_owned(), weight, counts));
        self
    }

    pub fn build(self) -> Result<InteractionGraph, GraphError> {
        let mut users: Vec<(String, bool)> = self.users.into_iter().collect();
        users.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let index: HashMap<&str, u32> =
            users.iter().enumerate().map(|(i, (id, _))| (id.as_str(), i as u32)).collect();
        let edges = self
            .edges
            .iter()
            .map(|(s, t, w, c)| RawEdge { source: index[s.as_str()], target: index[t.as_str()], weight: *w, counts: c.clone() })
            .collect();
        let (ids, verified): (Vec<String>, Vec<bool>) = users.into_iter().unzip();
        InteractionGraph::assemble(ids, verified, self.model, self.epochs, edges)
    }
}

/// Aggregates records into one weighted edge per ordered user pair.
///
/// Per-epoch counts are binned over the model's epochs (entropy) or the
/// period's epochs (sum). Users without interactions are left out even when
/// they appear in `attrs`.
pub fn build_graph(
    records: &[InteractionRecord],
    attrs: &[UserAttributes],
    model: WeightModel,
    period: &TargetPeriod,
) -> Result<InteractionGraph, GraphError> {
    if records.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let bins = match model {
        WeightModel::Sum => period.epochs(),
        WeightModel::Entropy { epochs } => epochs,
    };
    let binning = period
        .with_epochs(bins)
        .map_err(|e| GraphError::InvalidModel(e.to_string()))?;
    let epochs = bins as usize;

    let mut pair_index: HashMap<(&str, &str), usize> = HashMap::new();
    let mut pairs: Vec<(&str, &str, Vec<u32>)> = Vec::new();
    for r in records {
        if r.source == r.target {
            return Err(GraphError::SelfInteraction(r.source.clone()));
        }
        let epoch = binning.epoch_of(r.timestamp).ok_or_else(|| GraphError::OutOfPeriod {
            source_id: r.source.clone(),
            target_id: r.target.clone(),
            timestamp: r.timestamp,
        })?;
        let slot = *pair_index.entry((r.source.as_str(), r.target.as_str())).or_insert_with(|| {
            pairs.push((r.source.as_str(), r.target.as_str(), vec![0; epochs]));
            pairs.len() - 1
        });
        pairs[slot].2[epoch] += 1;
    }

    let mut ids: Vec<&str> = pairs.iter().flat_map(|(s, t, _)| [*s, *t]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<&str, u32> = ids.iter().enumerate().map(|(i, id)| (*id, i as u32)).collect();
    let verified_ids: HashMap<&str, bool> =
        attrs.iter().map(|a| (a.user_id.as_str(), a.verified)).collect();
    let verified = ids.iter().map(|id| verified_ids.get(id).copied().unwrap_or(false)).collect();

    let edges = pairs
        .into_iter()
        .map(|(s, t, counts)| RawEdge {
            source: index[s],
            target: index[t],
            weight: model.weight(&counts).expect("every stored pair has an interaction"),
            counts,
        })
        .collect();
    InteractionGraph::assemble(ids.into_iter().map(str::to_owned).collect(), verified, model, epochs, edges)
}

/// Same users, every edge reversed and given weight one.
pub fn inverse_unit_graph(g: &InteractionGraph) -> InteractionGraph {
    let edges = g
        .edges()
        .map(|e| RawEdge { source: e.target as u32, target: e.source as u32, weight: 1.0, counts: e.counts.to_vec() })
        .collect();
    InteractionGraph::assemble(g.users.clone(), g.verified.clone(), g.model, g.epochs, edges)
        .expect("reversal of a valid graph is valid")
}
