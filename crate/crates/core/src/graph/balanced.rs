use rand::Rng;

use super::{GraphBuilder, GraphError, InteractionGraph, WeightModel};
use crate::rng;

/// Symmetric test graph whose stationary credits are known in advance.
///
/// Support is a ring plus Chung-Lu edges with expected degree proportional to
/// `k^-exponent`, then weights `w_ij = x_i x_j` are balanced so user `k` has
/// strength `k^-exponent`. A symmetric chain is reversible, so the stationary
/// vector is the normalized strength and its relative gaps fall strictly. The
/// ring keeps it connected and Chung-Lu triangles make it aperiodic. All
/// users are verified; ids are `v000`, `v001`, ... in strength order.
pub fn balanced_power_law(n: usize, avg_degree: f64, exponent: f64, seed: u64) -> Result<InteractionGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::Generator(format!("balanced graph needs at least 3 users, got {n}")));
    }
    let mut rng = rng::stream(seed, "graph.balanced", 0);
    let strength: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-exponent)).collect();
    let total: f64 = strength.iter().sum();
    let scale = avg_degree * n as f64 / (total * total);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let ring = j == i + 1 || (i == 0 && j == n - 1);
            if ring || rng.random::<f64>() < (scale * strength[i] * strength[j]).min(1.0) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }

    // symmetric Sinkhorn: x_i (A x)_i -> strength_i
    let mut x = vec![1.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..100_000 {
        let ax: Vec<f64> = adj.iter().map(|nb| nb.iter().map(|&j| x[j]).sum()).collect();
        residual = (0..n).map(|i| (x[i] * ax[i] / strength[i] - 1.0).abs()).fold(0.0, f64::max);
        if residual < 1e-14 {
            break;
        }
        for i in 0..n {
            x[i] = (x[i] * strength[i] / ax[i]).sqrt();
        }
    }
    if residual > 1e-10 {
        return Err(GraphError::Generator(format!("weight balancing stalled at residual {residual:e}")));
    }

    let width = (n - 1).to_string().len().max(3);
    let ids: Vec<String> = (0..n).map(|i| format!("v{i:0width$}")).collect();
    let mut b = GraphBuilder::new(WeightModel::Sum, 1);
    for (i, nb) in adj.iter().enumerate() {
        b.add_user(&ids[i], true);
        for &j in nb {
            b.add_edge(&ids[i], &ids[j], x[i] * x[j], vec![0]);
        }
    }
    b.build()
}
