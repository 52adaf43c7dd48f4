use std::collections::VecDeque;
use std::rc::Rc;

use rand::seq::index::sample;
use rand::Rng;

use crate::graph::{InteractionGraph, RawEdge};
use crate::ingest::{InteractionKind, InteractionRecord, TargetPeriod};
use crate::rng;

use super::{AttackError, AttackScenario, AttackStrategy, SybilRegion};

/// An honest graph with a sybil region and attack edges added.
#[derive(Clone, Debug)]
pub struct AugmentedGraph {
    pub graph: InteractionGraph,
    /// `true` for sybil users, by augmented index.
    pub is_sybil: Vec<bool>,
    /// Augmented index of each honest user.
    pub honest_index: Vec<usize>,
    /// Augmented index of each sybil, by sybil number.
    pub sybil_index: Vec<usize>,
    /// Honest indices that received an attack edge, in selection order.
    pub attacked: Vec<usize>,
    /// Attack-edge weight over the honest graph's total weight.
    pub alpha: f64,
}

impl AugmentedGraph {
    pub fn honest_count(&self) -> usize {
        self.honest_index.len()
    }

    pub fn sybil_count(&self) -> usize {
        self.sybil_index.len()
    }

    /// Honest-graph index of every augmented user (`None` for sybils).
    pub fn honest_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.graph.user_count()];
        for (h, &a) in self.honest_index.iter().enumerate() {
            out[a] = Some(h);
        }
        out
    }
}

/// Id of sybil `i` out of `n`.
pub(crate) fn sybil_id(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("sybil{i:0width$}")
}

/// Undirected neighbour lists: out- and in-neighbours merged, ascending.
fn undirected_adjacency(g: &InteractionGraph) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); g.user_count()];
    for e in g.edges() {
        adj[e.source].push(e.target as u32);
        adj[e.target].push(e.source as u32);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Successor lists, ascending.
fn successor_adjacency(g: &InteractionGraph) -> Vec<Vec<u32>> {
    (0..g.user_count()).map(|u| g.out_edges(u).map(|e| e.target as u32).collect()).collect()
}

/// Breadth-first order from `sources` over `adj`, stopping after
/// `limit` users (sources included).
fn bfs_order(adj: &[Vec<u32>], sources: &[usize], limit: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::new();
    let mut order = Vec::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        order.push(u);
        if order.len() == limit {
            break;
        }
        for &v in &adj[u] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                queue.push_back(v as usize);
            }
        }
    }
    order
}

fn select_targets(
    honest: &InteractionGraph,
    scen: &AttackScenario,
    rng: &mut impl Rng,
) -> Result<Vec<usize>, AttackError> {
    let n = honest.user_count();
    let short = |available| AttackError::NotEnoughTargets { requested: scen.w_g, available };
    match scen.strategy {
        AttackStrategy::Random => {
            if n < scen.w_g {
                return Err(short(n));
            }
            Ok(sample(rng, n, scen.w_g).into_vec())
        }
        AttackStrategy::Community => {
            if n < scen.w_g {
                return Err(short(n));
            }
            let start = rng.random_range(0..n);
            let order = bfs_order(&undirected_adjacency(honest), &[start], scen.w_g);
            if order.len() < scen.w_g {
                return Err(short(order.len()));
            }
            Ok(order)
        }
        AttackStrategy::SeedAttack => {
            let seeds = scen
                .known_seeds
                .iter()
                .map(|id| honest.index_of(id).ok_or_else(|| AttackError::UnknownSeed(id.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let mut is_seed = vec![false; n];
            for &s in &seeds {
                is_seed[s] = true;
            }
            let distinct = is_seed.iter().filter(|&&s| s).count();
            let reach = bfs_order(&successor_adjacency(honest), &seeds, distinct + scen.d);
            let pool: Vec<usize> = reach.into_iter().filter(|&u| !is_seed[u]).collect();
            if pool.len() < scen.d {
                log::warn!("only {} users reachable from the known seeds (d = {})", pool.len(), scen.d);
            }
            if pool.len() < scen.w_g {
                return Err(short(pool.len()));
            }
            Ok(sample(rng, pool.len(), scen.w_g).into_iter().map(|i| pool[i]).collect())
        }
    }
}

/// Adds `region` to `honest` and links the scenario's targets to uniformly
/// drawn sybils with unit-weight edges. `trial` selects the random stream.
pub fn attach_sybil_region(
    honest: &InteractionGraph,
    region: &SybilRegion,
    scen: &AttackScenario,
    trial: u64,
) -> Result<AugmentedGraph, AttackError> {
    scen.validate()?;
    region.validate()?;
    let mut rng = rng::stream(scen.rng_seed, "attack.targets", trial);
    let attacked = select_targets(honest, scen, &mut rng)?;

    let n1 = honest.user_count();
    let n2 = region.size;
    // Merge honest and sybil ids into one sorted order.
    let sybil_ids: Vec<String> = (0..n2).map(|i| sybil_id(i, n2)).collect();
    let mut all: Vec<(&str, Option<usize>, usize)> = honest
        .users()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), Some(i), 0))
        .chain(sybil_ids.iter().enumerate().map(|(i, id)| (id.as_str(), None, i)))
        .collect();
    all.sort_unstable_by(|a, b| a.0.cmp(b.0));
    if let Some(w) = all.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(AttackError::IdCollision(w[0].0.to_owned()));
    }
    let mut honest_index = vec![0; n1];
    let mut sybil_index = vec![0; n2];
    let mut users = Vec::with_capacity(n1 + n2);
    let mut verified = Vec::with_capacity(n1 + n2);
    let mut is_sybil = Vec::with_capacity(n1 + n2);
    for (pos, &(id, h, s)) in all.iter().enumerate() {
        users.push(id.to_owned());
        match h {
            Some(h) => {
                honest_index[h] = pos;
                verified.push(honest.is_verified(h));
                is_sybil.push(false);
            }
            None => {
                sybil_index[s] = pos;
                verified.push(false);
                is_sybil.push(true);
            }
        }
    }

    let epochs = honest.epochs();
    let zero = vec![0u32; epochs];
    let mut edges: Vec<RawEdge> = honest
        .edges()
        .map(|e| RawEdge {
            source: honest_index[e.source] as u32,
            target: honest_index[e.target] as u32,
            weight: e.weight,
            counts: e.counts.to_vec(),
        })
        .collect();
    let internal = region.internal_edges();
    let mut internal_out = vec![0.0; n2];
    for &(s, t, w) in &internal {
        internal_out[s] += w;
        edges.push(RawEdge { source: sybil_index[s] as u32, target: sybil_index[t] as u32, weight: w, counts: zero.clone() });
    }
    for &h in &attacked {
        let s = rng.random_range(0..n2);
        edges.push(RawEdge { source: honest_index[h] as u32, target: sybil_index[s] as u32, weight: 1.0, counts: zero.clone() });
    }
    if region.outgoing_to_honest > 0.0 {
        let beta = region.outgoing_to_honest;
        let mut back = rng::stream(scen.rng_seed, "attack.backlinks", trial);
        for s in 0..n2 {
            let h = back.random_range(0..n1);
            let w = if internal_out[s] > 0.0 { internal_out[s] * beta / (1.0 - beta) } else { 1.0 };
            edges.push(RawEdge { source: sybil_index[s] as u32, target: honest_index[h] as u32, weight: w, counts: zero.clone() });
        }
    }
    let alpha = attacked.len() as f64 / honest.total_weight();
    let graph = InteractionGraph::assemble(users, verified, honest.model(), epochs, edges)?;
    Ok(AugmentedGraph { graph, is_sybil, honest_index, sybil_index, attacked, alpha })
}

/// Every sybil retweeting every other sybil once a day over `period`.
/// Yields `n(n-1)` records per whole day.
pub fn sybil_retweet_records(n2: usize, period: &TargetPeriod) -> impl Iterator<Item = InteractionRecord> + '_ {
    const DAY: i64 = 86_400;
    let days = (period.end() - period.start()) / DAY;
    let ids: Rc<Vec<String>> = Rc::new((0..n2).map(|i| sybil_id(i, n2)).collect());
    (0..days).flat_map(move |day| {
        let ids = Rc::clone(&ids);
        let ts = period.start() + day * DAY;
        (0..n2).flat_map(move |s| {
            let ids = Rc::clone(&ids);
            (0..n2).filter(move |&t| t != s).map(move |t| {
                InteractionRecord::new(ids[s].clone(), ids[t].clone(), InteractionKind::Retweet, ts)
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::AttackStrategy;
    use crate::graph::{GraphBuilder, WeightModel};

    fn triangle() -> InteractionGraph {
        let mut b = GraphBuilder::new(WeightModel::Sum, 1);
        b.add_user("a", true).add_user("b", false).add_user("c", false);
        b.add_edge("a", "b", 1.0, vec![1]).add_edge("b", "c", 1.0, vec![1]).add_edge("c", "a", 2.0, vec![2]);
        b.build().unwrap()
    }

    #[test]
    fn sybil_ids_are_zero_padded() {
        assert_eq!(sybil_id(7, 500), "sybil007");
        assert_eq!(sybil_id(0, 1), "sybil0");
    }

    #[test]
    fn backlinks_carry_beta_of_the_out_weight() {
        let mut scen = AttackScenario::new(AttackStrategy::Random, 2, 1);
        scen.n2 = 3;
        scen.beta = 0.25;
        let aug = attach_sybil_region(&triangle(), &scen.region(), &scen, 0).unwrap();
        for &s in &aug.sybil_index {
            let out: f64 = aug.graph.out_weight(s);
            let back: f64 = aug.graph.out_edges(s).filter(|e| !aug.is_sybil[e.target]).map(|e| e.weight).sum();
            assert!((back / out - 0.25).abs() < 1e-12);
        }
        assert!((aug.alpha - 0.5).abs() < 1e-15);
    }

    #[test]
    fn colliding_ids_are_rejected() {
        let mut b = GraphBuilder::new(WeightModel::Sum, 1);
        b.add_user("sybil0", false).add_user("x", true);
        b.add_edge("sybil0", "x", 1.0, vec![1]).add_edge("x", "sybil0", 1.0, vec![1]);
        let scen = AttackScenario { n2: 2, ..AttackScenario::new(AttackStrategy::Random, 1, 0) };
        assert!(matches!(
            attach_sybil_region(&b.build().unwrap(), &scen.region(), &scen, 0),
            Err(AttackError::IdCollision(_))
        ));
    }

    #[test]
    fn retweet_records_cover_whole_days() {
        let period = TargetPeriod::new(0, 3 * 86_400 + 100, 1).unwrap();
        let recs: Vec<_> = sybil_retweet_records(4, &period).collect();
        assert_eq!(recs.len(), 3 * 12);
        assert!(recs.iter().all(|r| r.source != r.target && period.contains(r.timestamp)));
    }
}
