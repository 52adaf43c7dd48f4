//! Attach a 200-user sybil region to a synthetic honest graph and see how
//! many sybils early termination lets into the top 50.

use truetop::attack::{attach_sybil_region, AttackScenario, AttackStrategy};
use truetop::eval::{aggregate, Experiment, ExperimentConfig, Method};
use truetop::graph::{build_graph, extract_gscc, WeightModel};
use truetop::ingest::{generate_powerlaw_graph, SyntheticSpec, TargetPeriod};
use truetop::rank::TerminationConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(0, 90 * 86_400, 90)?;
    let mut spec = SyntheticSpec::new(4_000, period, 11);
    spec.mean_out_degree = 10.0;
    spec.verified_fraction = 0.05;
    let log = generate_powerlaw_graph(&spec)?;
    let honest = extract_gscc(&build_graph(&log.records, &log.attributes, WeightModel::Sum, &period)?).graph;

    let mut scen = AttackScenario::new(AttackStrategy::Community, 100, 5);
    scen.n2 = 200;
    scen.d = 500;
    scen.trials = 5;

    let aug = attach_sybil_region(&honest, &scen.region(), &scen, 0)?;
    println!(
        "{} honest + {} sybils, {} attack edges, leak alpha = {:.2e}",
        aug.honest_count(),
        aug.sybil_count(),
        aug.attacked.len(),
        aug.alpha
    );

    let config = ExperimentConfig {
        term: TerminationConfig::new(50, 0.0, 1000),
        seed_count: 50,
        methods: vec![Method::Truetop, Method::Wec],
        ..ExperimentConfig::default()
    };
    let exp = Experiment::new(&honest, config);
    let reports = exp.run(&scen, "community w_g=100");
    for r in reports.iter().filter(|r| r.method == Method::Truetop) {
        println!(
            "trial {}: {} sybils after {} iterations (bound {:.3}), type-I {:.3}",
            r.trial,
            r.sybil_count,
            r.iterations,
            r.bound.unwrap_or(f64::NAN),
            r.type1
        );
    }
    for a in aggregate(&reports) {
        println!("{:<8} mean #sybil {:.2}, mean iterations {:.1}", a.method.to_string(), a.mean_sybil_count, a.mean_iterations);
    }
    Ok(())
}
