//! Rank a synthetic graph with early termination and compare the result
//! against the fully converged influence ranking.

use truetop::eval::{default_ground_truth, type1_error, type2_error, Placement};
use truetop::graph::{build_graph, extract_gscc, NormalizedMatrix, WeightModel};
use truetop::ingest::{generate_powerlaw_graph, InteractionsPerEdge, SyntheticSpec, TargetPeriod};
use truetop::rank::{select_seeds, truetop_rank, SeedConfig, SeedMethod, TerminationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(0, 90 * 86_400, 90)?;
    let mut spec = SyntheticSpec::new(5_000, period, 7);
    spec.mean_out_degree = 10.0;
    spec.verified_fraction = 0.05;
    spec.interactions_per_edge = InteractionsPerEdge::Geometric { mean: 10.0 };
    let log = generate_powerlaw_graph(&spec)?;
    let full = build_graph(&log.records, &log.attributes, WeightModel::Entropy { epochs: 9 }, &period)?;
    let g = extract_gscc(&full).graph;
    let w = NormalizedMatrix::from_graph(&g);

    let seeds = select_seeds(&g, &SeedConfig::new(50, SeedMethod::Basic, 1))?;
    let truth = default_ground_truth(&w, 20, 10_000);
    println!("{} users, ground truth after {} iterations", g.user_count(), truth.iterations);

    for epsilon in [0.0, 5.0, 20.0] {
        let term = TerminationConfig::new(20, epsilon, 1000);
        let out = truetop_rank(&w, &seeds.initial, &term, None)?;
        let placement = Placement::honest_only(&out.ranking, 20);
        println!(
            "epsilon {epsilon:>4}: stopped after {:>2} iterations, type-I {:.3}, type-II {}",
            out.iterations,
            type1_error(&truth, &placement),
            type2_error(&truth, &placement)
        );
    }

    let out = truetop_rank(&w, &seeds.initial, &TerminationConfig::new(20, 0.0, 1000), None)?;
    println!("top 10:");
    for (pos, &u) in out.top().iter().take(10).enumerate() {
        println!("  {:>2} {:<6} {:.5}", pos + 1, g.user_id(u), out.state.credits[u]);
    }
    Ok(())
}
