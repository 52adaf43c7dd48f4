//! Dense reference implementations and graph fixtures shared by the
//! integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use truetop::graph::{GraphBuilder, InteractionGraph, NormalizedMatrix, WeightModel};

pub fn id(i: usize) -> String {
    format!("n{i:03}")
}

/// Graph from `(source, target, weight)` over users `n000..`; the users in
/// `verified` are flagged.
pub fn graph(n: usize, edges: &[(usize, usize, f64)], verified: &[usize]) -> InteractionGraph {
    let mut b = GraphBuilder::new(WeightModel::Sum, 1);
    for i in 0..n {
        b.add_user(&id(i), verified.contains(&i));
    }
    for &(s, t, w) in edges {
        b.add_edge(&id(s), &id(t), w, vec![0]);
    }
    b.build().unwrap()
}

/// Ring `0 -> 1 -> .. -> 0` plus the chord `0 -> 2` (so it is aperiodic) and
/// random extra edges, all with random weights in `[0.5, 5)`.
pub fn random_strong(n: usize, extra: usize, seed: u64) -> InteractionGraph {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut push = |s: usize, t: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<_>| {
        if s != t && seen.insert((s, t)) {
            edges.push((s, t, rng.random_range(0.5..5.0)));
        }
    };
    for i in 0..n {
        push(i, (i + 1) % n, &mut rng, &mut edges);
    }
    push(0, 2, &mut rng, &mut edges);
    for _ in 0..extra {
        let (s, t) = (rng.random_range(0..n), rng.random_range(0..n));
        push(s, t, &mut rng, &mut edges);
    }
    let verified: Vec<usize> = (0..n).step_by(3).collect();
    graph(n, &edges, &verified)
}

pub fn complete(n: usize) -> InteractionGraph {
    let edges: Vec<_> = (0..n).flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t, 1.0))).collect();
    graph(n, &edges, &[0])
}

/// Row-stochastic transition matrix, rebuilt straight from the edge list.
pub fn dense_from_graph(g: &InteractionGraph) -> DMatrix<f64> {
    let n = g.user_count();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let out: f64 = g.out_edges(i).map(|e| e.weight).sum();
        if out == 0.0 {
            m[(i, i)] = 1.0;
        }
        for e in g.out_edges(i) {
            m[(i, e.target)] += e.weight / out;
        }
    }
    m
}

pub fn dense(w: &NormalizedMatrix) -> DMatrix<f64> {
    let n = w.dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, v) in w.row(i) {
            m[(i, j)] += v;
        }
    }
    m
}

/// `v0 W^t` by repeated dense products.
pub fn dense_power(w: &DMatrix<f64>, v0: &[f64], t: usize) -> Vec<f64> {
    let mut x = DVector::from_column_slice(v0).transpose();
    for _ in 0..t {
        x = &x * w;
    }
    x.iter().copied().collect()
}

/// Stationary row vector from `pi (I - W) = 0`, `sum pi = 1`.
pub fn dense_stationary(w: &DMatrix<f64>) -> Vec<f64> {
    let n = w.nrows();
    let mut a = (DMatrix::identity(n, n) - w).transpose();
    let mut b = DVector::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("irreducible chain").iter().copied().collect()
}

/// PageRank from `pi = (1 - r) pi W + r / n`.
pub fn dense_pagerank(w: &DMatrix<f64>, reset: f64) -> Vec<f64> {
    let n = w.nrows();
    let a = (DMatrix::identity(n, n) - w * (1.0 - reset)).transpose();
    let b = DVector::from_element(n, reset / n as f64);
    a.lu().solve(&b).expect("nonsingular").iter().copied().collect()
}

/// Second-largest eigenvalue modulus.
pub fn dense_lambda2(w: &DMatrix<f64>) -> f64 {
    let mut moduli: Vec<f64> = w.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli[1]
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
