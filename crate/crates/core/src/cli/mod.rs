//! The `truetop` command line: argument parsing, configuration files and
//! the artifact writers behind each subcommand.
//!
//! Precedence is flag, then `--config` file, then built-in default. Every
//! command writes its outputs in a fixed order with fixed float formatting,
//! so identical inputs give byte-identical files.

mod config;
mod theory;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::attack::AttackScenario;
use crate::eval::{aggregate, AggregateReport, EvalReport, Experiment, ExperimentConfig, Method};
use crate::graph::{build_graph, extract_gscc, read_snapshot, write_snapshot, InteractionGraph, NormalizedMatrix, WeightModel};
use crate::ingest::{
    generate_powerlaw_graph, parse_interaction_log, parse_user_attributes, write_interaction_log,
    write_user_attributes, InteractionsPerEdge, SyntheticSpec, TargetPeriod,
};
use crate::rank::{select_seeds, truetop_rank, SeedConfig, SeedMethod, TerminationConfig};

pub use self::config::{CliError, Config};
pub use self::theory::TheoryArgs;

const DAY: i64 = 86_400;

#[derive(Debug, Parser)]
#[command(name = "truetop", version, about = "Sybil-resilient top-K influence ranking")]
pub struct Cli {
    /// TOML file of flag values; keys mirror the long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph snapshot from an interaction log and user attributes.
    Build(BuildArgs),
    /// Rank the top-K users of a snapshot's giant component.
    Rank(RankArgs),
    /// Inject a sybil region and score every method over many trials.
    AttackEval(AttackEvalArgs),
    /// Run the convergence and resilience checks.
    Theory(TheoryArgs),
    /// Write a synthetic power-law interaction log.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    /// `sum` or `entropy` [default: sum]
    #[arg(long)]
    pub model: Option<String>,
    /// Epochs of the target period (mu) [default: 1]
    #[arg(long)]
    pub epochs: Option<u32>,
    /// Period start in seconds [default: earliest timestamp]
    #[arg(long)]
    pub start: Option<i64>,
    /// Period end in seconds, exclusive [default: latest timestamp + 1]
    #[arg(long)]
    pub end: Option<i64>,
    /// Snapshot output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stats JSON path [default: stdout]
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Graph snapshot.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// [default: 100]
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    /// Ranking-distance tolerance [default: 0]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Iteration budget T [default: 1000]
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Number of seed users s [default: 100]
    #[arg(long)]
    pub seeds: Option<usize>,
    /// `basic` or `reverse_wec` [default: basic]
    #[arg(long)]
    pub seed_method: Option<SeedMethod>,
    /// Convergence threshold of the reverse distribution [default: 1e-9]
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// Users whose id starts with this prefix form the traced region.
    #[arg(long)]
    pub region_prefix: Option<String>,
    /// Ranked CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration trace CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write every user, not just the top K.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args)]
pub struct AttackEvalArgs {
    /// Honest graph snapshot; its giant component is used.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Attack scenario TOML.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Directory for the per-trial and aggregate JSON files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// [default: 100]
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// [default: 1000]
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// [default: 100]
    #[arg(long)]
    pub seeds: Option<usize>,
    /// [default: basic]
    #[arg(long)]
    pub seed_method: Option<SeedMethod>,
    /// Power-iteration threshold for WEC and PageRank [default: 1e-9]
    #[arg(long)]
    pub nu: Option<f64>,
    /// [default: 1e-9]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Comma-separated subset of truetop,wec,pagerank,kred [default: all]
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Overrides the scenario's trial count.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Overrides the scenario's rng_seed.
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// Days of mutual sybil retweets counted by Kred, 0 for none [default: 90]
    #[arg(long)]
    pub kred_days: Option<u32>,
    /// [default: 0.15]
    #[arg(long)]
    pub pagerank_reset: Option<f64>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// [default: 10000]
    #[arg(long)]
    pub nodes: Option<usize>,
    /// In-degree exponent, above 2 [default: 2.5]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// [default: 10]
    #[arg(long)]
    pub out_degree: Option<f64>,
    /// Mean interactions per edge; 1 means exactly one [default: 1]
    #[arg(long)]
    pub interactions: Option<f64>,
    /// [default: 0.05]
    #[arg(long)]
    pub verified_fraction: Option<f64>,
    /// Period start in seconds [default: 1377820800]
    #[arg(long)]
    pub start: Option<i64>,
    /// Period length in days [default: 90]
    #[arg(long)]
    pub days: Option<u32>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// Interaction log output path.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// User attribute output path.
    #[arg(long)]
    pub attrs: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Validation(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Build(a) => cmd_build(a, &cfg),
        Command::Rank(a) => cmd_rank(a, &cfg),
        Command::AttackEval(a) => cmd_attack_eval(a, &cfg),
        Command::Theory(a) => theory::cmd_theory(a, &cfg),
        Command::Generate(a) => cmd_generate(a, &cfg),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path.display(), e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path.display(), e))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::io(path.display(), e.into()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| CliError::io(path.display(), e))
}

pub(crate) fn load_snapshot(path: &Path) -> Result<InteractionGraph, CliError> {
    Ok(read_snapshot(open(path)?)?)
}

fn termination(cfg: &Config, k: Option<usize>, epsilon: Option<f64>, t: Option<usize>, eta: Option<f64>, nu: Option<f64>) -> Result<TerminationConfig, CliError> {
    let d = TerminationConfig::default();
    let term = TerminationConfig {
        k: cfg.pick(k, "k", d.k)?,
        epsilon: cfg.pick(epsilon, "epsilon", d.epsilon)?,
        max_iterations: cfg.pick(t, "max-iterations", d.max_iterations)?,
        eta: cfg.pick(eta, "eta", d.eta)?,
        nu: cfg.pick(nu, "nu", d.nu)?,
    };
    term.validate()?;
    Ok(term)
}

#[derive(Debug, Serialize)]
struct BuildStats {
    users: usize,
    edges: usize,
    verified: usize,
    gscc_users: usize,
    gscc_edges: usize,
    gscc_share: f64,
    second_component: usize,
    components: usize,
    total_weight: f64,
    model: String,
    dropped_malformed: usize,
    dropped_out_of_period: usize,
    dropped_self_interactions: usize,
}

/// Smallest and one-past-largest timestamp of well-formed log lines.
fn log_span(path: &Path) -> Result<(i64, i64), CliError> {
    let everything = TargetPeriod::new(i64::MIN / 2, i64::MAX / 2, 1)?;
    let parsed = parse_interaction_log(open(path)?, &everything)?;
    let lo = parsed.records.iter().map(|r| r.timestamp).min();
    let hi = parsed.records.iter().map(|r| r.timestamp).max();
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi + 1)),
        _ => Err(CliError::Validation(format!("{}: no interactions", path.display()))),
    }
}

fn cmd_build(a: BuildArgs, cfg: &Config) -> Result<(), CliError> {
    let log_path = cfg.required_path(a.log, "log")?;
    let attrs_path = cfg.required_path(a.attrs, "attrs")?;
    let out = cfg.required_path(a.out, "out")?;
    let stats_path = cfg.path(a.stats, "stats")?;
    let model_name: String = cfg.pick(a.model, "model", "sum".into())?;
    let epochs: u32 = cfg.pick(a.epochs, "epochs", 1)?;
    let model = match model_name.as_str() {
        "sum" => WeightModel::Sum,
        "entropy" => format!("entropy:{epochs}").parse()?,
        other => other.parse()?,
    };
    if epochs == 0 {
        return Err(CliError::Validation("--epochs must be at least 1".into()));
    }
    let (start, end) = match (cfg.opt(a.start, "start")?, cfg.opt(a.end, "end")?) {
        (Some(start), Some(end)) => (start, end),
        (start, end) => {
            let (lo, hi) = log_span(&log_path)?;
            (start.unwrap_or(lo), end.unwrap_or(hi))
        }
    };
    let period = TargetPeriod::new(start, end, epochs)?;
    let parsed = parse_interaction_log(open(&log_path)?, &period)?;
    let attrs = parse_user_attributes(open(&attrs_path)?)?;
    let graph = build_graph(&parsed.records, &attrs, model, &period)?;
    let gscc = extract_gscc(&graph);

    let mut snap = create(&out)?;
    write_snapshot(&graph, &mut snap).map_err(|e| CliError::io(out.display(), e))?;
    let stats = BuildStats {
        users: graph.user_count(),
        edges: graph.edge_count(),
        verified: graph.verified_users().len(),
        gscc_users: gscc.largest,
        gscc_edges: gscc.graph.edge_count(),
        gscc_share: gscc.largest as f64 / graph.user_count() as f64,
        second_component: gscc.second,
        components: gscc.component_count,
        total_weight: graph.total_weight(),
        model: model.to_string(),
        dropped_malformed: parsed.malformed,
        dropped_out_of_period: parsed.out_of_period,
        dropped_self_interactions: parsed.self_interactions,
    };
    match stats_path {
        Some(p) => write_json(&p, &stats),
        None => {
            let text = serde_json::to_string_pretty(&stats).expect("stats serialize");
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_rank(a: RankArgs, cfg: &Config) -> Result<(), CliError> {
    let graph_path = cfg.required_path(a.graph, "graph")?;
    let out = cfg.required_path(a.out, "out")?;
    let trace_path = cfg.path(a.trace, "trace")?;
    let term = termination(cfg, a.k, a.epsilon, a.max_iterations, a.eta, None)?;
    let seed_count = cfg.pick(a.seeds, "seeds", 100)?;
    let method = cfg.pick_parsed(a.seed_method, "seed-method", SeedMethod::Basic)?;
    let rng_seed = cfg.pick(a.rng_seed, "rng-seed", 0)?;
    let prefix: Option<String> = cfg.opt(a.region_prefix, "region-prefix")?;
    let full = a.full || cfg.get::<bool>("full")?.unwrap_or(false);

    let snapshot = load_snapshot(&graph_path)?;
    let gscc = extract_gscc(&snapshot);
    log::info!("giant component holds {} of {} users", gscc.largest, snapshot.user_count());
    let g = gscc.graph;
    if g.verified_users().is_empty() {
        return Err(CliError::Seeding("no verified users in the giant component to seed from".into()));
    }
    let seeds = select_seeds(
        &g,
        &SeedConfig { count: seed_count, method, rng_seed, eta: term.eta, max_iterations: term.hard_cap() },
    )?;
    let region: Option<Vec<bool>> = prefix.map(|p| g.users().iter().map(|u| u.starts_with(&p)).collect());
    let w = NormalizedMatrix::from_graph(&g);
    let outcome = truetop_rank(&w, &seeds.initial, &term, region.as_deref())?;

    let mut csv = create(&out)?;
    let rows = if full { outcome.ranking.len() } else { outcome.k };
    let write_ranked = |csv: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(csv, "rank,user_id,credit")?;
        for (pos, &u) in outcome.ranking.order()[..rows].iter().enumerate() {
            writeln!(csv, "{},{},{}", pos + 1, g.user_id(u), outcome.state.credits[u])?;
        }
        csv.flush()
    };
    write_ranked(&mut csv).map_err(|e| CliError::io(out.display(), e))?;

    if let Some(path) = trace_path {
        let mut f = create(&path)?;
        let write_trace = |f: &mut BufWriter<File>| -> std::io::Result<()> {
            writeln!(f, "t,d_K,credits_in_sybil_region,l1_step")?;
            for row in &outcome.trace {
                let region = row.region_credits.map(|c| c.to_string()).unwrap_or_default();
                writeln!(f, "{},{},{},{}", row.t, row.d_k, region, row.l1_step)?;
            }
            f.flush()
        };
        write_trace(&mut f).map_err(|e| CliError::io(path.display(), e))?;
    }
    let flag = if outcome.not_stabilized { "not_stabilized" } else { "stabilized" };
    eprintln!(
        "{flag}: {} iterations, K = {}, {} seeds, {} users ranked",
        outcome.iterations,
        outcome.k,
        seeds.users.len(),
        g.user_count()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct AggregateFile<'a> {
    scenario: String,
    rng_seed: u64,
    trials: usize,
    failed_trials: usize,
    k: usize,
    epsilon: f64,
    seeds: usize,
    seed_method: SeedMethod,
    methods: &'a [AggregateReport],
}

fn cmd_attack_eval(a: AttackEvalArgs, cfg: &Config) -> Result<(), CliError> {
    let graph_path = cfg.required_path(a.graph, "graph")?;
    let scenario_path = cfg.required_path(a.scenario, "scenario")?;
    let out_dir = cfg.required_path(a.out_dir, "out-dir")?;
    let term = termination(cfg, a.k, a.epsilon, a.max_iterations, a.eta, a.nu)?;
    let methods: Vec<Method> = match a.methods {
        Some(m) => m,
        None => match cfg.get::<Vec<String>>("methods")? {
            Some(names) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<_, _>>()
                .map_err(CliError::Validation)?,
            None => Method::ALL.to_vec(),
        },
    };
    let kred_days: u32 = cfg.pick(a.kred_days, "kred-days", 90)?;
    let config = ExperimentConfig {
        term,
        seed_count: cfg.pick(a.seeds, "seeds", 100)?,
        seed_method: cfg.pick_parsed(a.seed_method, "seed-method", SeedMethod::Basic)?,
        pagerank_reset: cfg.pick(a.pagerank_reset, "pagerank-reset", 0.15)?,
        methods,
        kred_period: match kred_days {
            0 => None,
            days => Some(TargetPeriod::new(0, i64::from(days) * DAY, days)?),
        },
    };
    if !(config.pagerank_reset > 0.0 && config.pagerank_reset < 1.0) {
        return Err(CliError::Validation(format!("--pagerank-reset must lie in (0, 1), got {}", config.pagerank_reset)));
    }
    let jobs: usize = cfg.pick(a.jobs, "jobs", 0)?;

    let text = std::fs::read_to_string(&scenario_path).map_err(|e| CliError::io(scenario_path.display(), e))?;
    let mut scen = AttackScenario::from_toml(&text)?;
    if let Some(t) = cfg.opt(a.trials, "trials")? {
        scen.trials = t;
    }
    if let Some(s) = cfg.opt(a.rng_seed, "rng-seed")? {
        scen.rng_seed = s;
    }
    scen.validate()?;

    let snapshot = load_snapshot(&graph_path)?;
    let honest = extract_gscc(&snapshot).graph;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {jobs} workers: {e}")))?;
    let results = pool.install(|| {
        let exp = Experiment::new(&honest, config.clone());
        exp.run_results(&scen, &text)
    });

    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(out_dir.display(), e))?;
    let mut reports: Vec<EvalReport> = Vec::new();
    let mut first_error = None;
    let mut failed = 0;
    for (trial, result) in results.into_iter().enumerate() {
        match result {
            Ok(r) => reports.extend(r),
            Err(e) => {
                log::error!("trial {trial} failed: {e}");
                failed += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    if reports.is_empty() {
        if let Some(e) = first_error {
            return Err(e.into());
        }
    }
    for r in &reports {
        write_json(&out_dir.join(format!("{}_trial{:03}.json", r.method, r.trial)), r)?;
    }
    let summary = aggregate(&reports);
    write_json(
        &out_dir.join("aggregate.json"),
        &AggregateFile {
            scenario: text.clone(),
            rng_seed: scen.rng_seed,
            trials: scen.trials,
            failed_trials: failed,
            k: config.term.k,
            epsilon: config.term.epsilon,
            seeds: config.seed_count,
            seed_method: config.seed_method,
            methods: &summary,
        },
    )?;
    println!("method      trials  mean#sybil  max#sybil  type1   type2   iters");
    for s in &summary {
        println!(
            "{:<10} {:>7} {:>11.2} {:>10} {:>6.3} {:>7.2} {:>7.1}",
            s.method.to_string(),
            s.trials,
            s.mean_sybil_count,
            s.max_sybil_count,
            s.mean_type1,
            s.mean_type2,
            s.mean_iterations
        );
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs, cfg: &Config) -> Result<(), CliError> {
    let log_path = cfg.required_path(a.log, "log")?;
    let attrs_path = cfg.required_path(a.attrs, "attrs")?;
    let start = cfg.pick(a.start, "start", 1_377_820_800)?;
    let days: u32 = cfg.pick(a.days, "days", 90)?;
    let period = TargetPeriod::new(start, start + i64::from(days) * DAY, days)?;
    let mut spec = SyntheticSpec::new(cfg.pick(a.nodes, "nodes", 10_000)?, period, cfg.pick(a.rng_seed, "rng-seed", 0)?);
    spec.degree_exponent = cfg.pick(a.gamma, "gamma", 2.5)?;
    spec.mean_out_degree = cfg.pick(a.out_degree, "out-degree", 10.0)?;
    spec.verified_fraction = cfg.pick(a.verified_fraction, "verified-fraction", 0.05)?;
    let mean = cfg.pick(a.interactions, "interactions", 1.0)?;
    spec.interactions_per_edge =
        if mean == 1.0 { InteractionsPerEdge::Fixed(1) } else { InteractionsPerEdge::Geometric { mean } };
    let log = generate_powerlaw_graph(&spec)?;
    write_interaction_log(create(&log_path)?, &log.records).map_err(|e| CliError::io(log_path.display(), e))?;
    write_user_attributes(create(&attrs_path)?, &log.attributes).map_err(|e| CliError::io(attrs_path.display(), e))?;
    eprintln!("{} interactions among {} users", log.records.len(), log.attributes.len());
    Ok(())
}
