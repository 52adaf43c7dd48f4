//! Compare the baseline rankers against early-terminated distribution
//! under the same random attack, including the in-count ranker whose
//! sybils retweet each other every day.

use truetop::attack::{AttackScenario, AttackStrategy};
use truetop::eval::{Experiment, ExperimentConfig, Method};
use truetop::graph::{build_graph, extract_gscc, WeightModel};
use truetop::ingest::{generate_powerlaw_graph, SyntheticSpec, TargetPeriod};
use truetop::rank::TerminationConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(0, 90 * 86_400, 90)?;
    let mut spec = SyntheticSpec::new(3_000, period, 3);
    spec.mean_out_degree = 10.0;
    spec.verified_fraction = 0.05;
    let log = generate_powerlaw_graph(&spec)?;
    let honest = extract_gscc(&build_graph(&log.records, &log.attributes, WeightModel::Sum, &period)?).graph;

    let mut scen = AttackScenario::new(AttackStrategy::Random, 200, 1);
    scen.n2 = 100;
    let config = ExperimentConfig {
        term: TerminationConfig::new(50, 0.0, 1000),
        seed_count: 50,
        kred_period: Some(TargetPeriod::new(0, 30 * 86_400, 30)?),
        ..ExperimentConfig::default()
    };
    let exp = Experiment::new(&honest, config);
    println!("method     #sybil/50  type-I  type-II  iterations");
    for r in exp.run_trial(&scen, "random w_g=200", 0)? {
        let name = match r.method {
            Method::Kred => "in-count".to_string(),
            m => m.to_string(),
        };
        println!("{name:<10} {:>9} {:>7.3} {:>8} {:>11}", r.sybil_count, r.type1, r.type2, r.iterations);
    }
    Ok(())
}
