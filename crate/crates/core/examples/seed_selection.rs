//! Basic versus reverse-credit seed selection on a synthetic graph.

use truetop::graph::{build_graph, extract_gscc, WeightModel};
use truetop::ingest::{generate_powerlaw_graph, SyntheticSpec, TargetPeriod};
use truetop::rank::{select_seeds, SeedConfig, SeedMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(0, 86_400, 1)?;
    let mut spec = SyntheticSpec::new(3_000, period, 21);
    spec.verified_fraction = 0.1;
    let log = generate_powerlaw_graph(&spec)?;
    let g = extract_gscc(&build_graph(&log.records, &log.attributes, WeightModel::Sum, &period)?).graph;
    println!("{} users, {} verified", g.user_count(), g.verified_users().len());

    for method in [SeedMethod::Basic, SeedMethod::ReverseWec] {
        let seeds = select_seeds(&g, &SeedConfig::new(8, method, 4))?;
        println!("{method}:");
        for &u in &seeds.users {
            println!("  {:<6} initial {:.4}  out-degree {}", g.user_id(u), seeds.initial[u], g.out_degree(u));
        }
    }
    Ok(())
}
