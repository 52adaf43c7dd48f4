//! Generate a small synthetic interaction log and print what it contains.

use std::collections::HashMap;

use truetop::ingest::{generate_powerlaw_graph, InteractionsPerEdge, SyntheticSpec, TargetPeriod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(1_377_820_800, 1_377_820_800 + 30 * 86_400, 30)?;
    let mut spec = SyntheticSpec::new(2_000, period, 42);
    spec.interactions_per_edge = InteractionsPerEdge::Geometric { mean: 4.0 };
    let log = generate_powerlaw_graph(&spec)?;

    let mut in_count: HashMap<&str, usize> = HashMap::new();
    for r in &log.records {
        *in_count.entry(r.target.as_str()).or_default() += 1;
    }
    let mut top: Vec<_> = in_count.into_iter().collect();
    top.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let verified = log.attributes.iter().filter(|a| a.verified).count();
    println!("{} records, {} users, {verified} verified", log.records.len(), log.attributes.len());
    println!("most interacted-with users:");
    for (user, n) in top.iter().take(5) {
        println!("  {user:>6} {n}");
    }
    println!("first records:");
    for r in log.records.iter().take(3) {
        println!("  {} -> {} {} at {}", r.source, r.target, r.kind, r.timestamp);
    }
    Ok(())
}
