//! Fit the tail of converged influence on a 20k-user synthetic graph and
//! measure how fast the relative gaps shrink with rank.

use truetop::eval::{fit_power_law, ground_truth, relative_gap_curve};
use truetop::graph::{build_graph, extract_gscc, NormalizedMatrix, WeightModel};
use truetop::ingest::{generate_powerlaw_graph, SyntheticSpec, TargetPeriod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(0, 86_400, 1)?;
    let mut spec = SyntheticSpec::new(20_000, period, 3);
    spec.mean_out_degree = 10.0;
    let log = generate_powerlaw_graph(&spec)?;
    let g = extract_gscc(&build_graph(&log.records, &log.attributes, WeightModel::Sum, &period)?).graph;
    let truth = ground_truth(&NormalizedMatrix::from_graph(&g), 100, 1e-10, 100_000);

    let fit = fit_power_law(&truth.pi, 1e-6);
    println!("{} users, {} above 1e-6, gamma = {:.3}, ccdf slope {:.3} (r^2 {:.3})", g.user_count(), fit.tail, fit.gamma, fit.slope, fit.r_squared);
    for &(x, p) in fit.ccdf.iter().step_by(10) {
        println!("  P(X >= {x:.2e}) = {p:.2e}");
    }

    let gaps = relative_gap_curve(&truth.pi);
    println!("relative gap slope over k in [10, 1000]: {:.3}", gaps.slope(10, 1000).unwrap_or(f64::NAN));
    for k in [1, 10, 100, 1000] {
        println!("  gap at k = {k:>4}: {:.5}", gaps.gap(k));
    }
    Ok(())
}
