//! Command-line surface: ingestion, chain runs, and plot-ready outputs.
//!
//! Every data-producing subcommand writes its output atomically and drops a
//! `<out>.manifest.json` sidecar echoing the command, configuration, RNG
//! seeds, and input file digests, so any artifact can be traced back to the
//! run that made it. With fixed inputs and seeds, outputs are byte-identical
//! across invocations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nestchain::diagnostics::{
    autocorrelation_curve, histogram_distance, partial_ensemble_rank_stats, seat_histogram,
    seats_series,
};
use nestchain::enumeration::{
    count_balanced_partitions, count_nestings, enumerate_balanced_partitions,
    enumerate_nestings_with_limit, DEFAULT_NESTING_LIMIT, DEFAULT_PARTITION_LIMIT,
};
use nestchain::io::{
    load_graph, load_plan, manifest_path, read_ensemble, save_graph, save_plan, write_ensemble,
    RunManifest,
};
use nestchain::{
    is_contiguous_plan, is_k_nested, population_deviation, quotient_graph, random_nested_seed,
    run_recom, run_short_bursts, run_swap, BurstConfig, DualGraph, ElectionObserver, Error,
    NestingSpec, Observer, Party, Plan, RecomConfig, Result, SwapConfig,
};

#[derive(Parser)]
#[command(
    name = "nestchain",
    version,
    about = "Sample and analyze districting plans on dual graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph file, and optionally a plan against it
    Validate(ValidateArgs),
    /// Exhaustively count or list partitions (guarded small instances)
    Enumerate(EnumerateArgs),
    /// Run the swap chain over nested plans
    RunSwap(RunSwapArgs),
    /// Run the recombination chain
    RunRecom(RunRecomArgs),
    /// Short-burst seat optimization over the recombination chain
    ShortBurst(ShortBurstArgs),
    /// Collapse a plan into its district-level dual graph
    Quotient(QuotientArgs),
    /// Ensemble statistics: autocorrelation, histograms, comparisons
    #[command(subcommand)]
    Diagnose(DiagnoseCommand),
    /// Generate a random nested seed plan
    Seed(SeedArgs),
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Also check the plan against a k:1 nesting rule
    #[arg(long)]
    arity: Option<u32>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Enumerate connected districts of exactly this many vertices
    #[arg(long, conflicts_with_all = ["districts", "size"])]
    arity: Option<u32>,
    /// Number of districts (with --size)
    #[arg(long, requires = "size")]
    districts: Option<u32>,
    /// Exact district size in vertices (with --districts)
    #[arg(long, requires = "districts")]
    size: Option<u32>,
    /// Also write every plan (JSONL, one unit->district object per line)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunSwapArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    seed_plan: PathBuf,
    #[arg(long, default_value_t = SwapConfig::DEFAULT_STEPS)]
    steps: u64,
    #[arg(long)]
    rng: u64,
    #[arg(long, default_value_t = 3)]
    arity: u32,
    /// Election to observe; defaults to the graph's only election
    #[arg(long)]
    election: Option<String>,
    #[arg(long, default_value_t = SwapConfig::DEFAULT_MAX_REJECTIONS)]
    max_rejections: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunRecomArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    seed_plan: PathBuf,
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    rng: u64,
    #[arg(long, default_value_t = RecomConfig::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Expected district count (defaults to the seed plan's)
    #[arg(long)]
    districts: Option<u32>,
    #[arg(long)]
    election: Option<String>,
    #[arg(long, default_value_t = RecomConfig::DEFAULT_TREE_ATTEMPTS)]
    tree_attempts: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShortBurstArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    seed_plan: PathBuf,
    #[arg(long)]
    bursts: u64,
    #[arg(long, default_value_t = BurstConfig::DEFAULT_BURST_LENGTH)]
    burst_length: u64,
    #[arg(long)]
    election: String,
    #[arg(long)]
    party: Party,
    #[arg(long)]
    rng: u64,
    #[arg(long, default_value_t = RecomConfig::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = RecomConfig::DEFAULT_TREE_ATTEMPTS)]
    tree_attempts: u64,
    /// Best plan CSV
    #[arg(long)]
    out: PathBuf,
    /// Optional per-burst best-score trace CSV
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct QuotientArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum DiagnoseCommand {
    /// Lag autocorrelation curve of a record statistic
    Autocorr(AutocorrArgs),
    /// Seat frequency table
    Hist(HistArgs),
    /// Ranked-share five-number summaries over ensemble prefixes
    Partial(PartialArgs),
    /// Total variation distance between two runs' seat histograms
    Compare(CompareArgs),
}

#[derive(Args)]
struct AutocorrArgs {
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long, default_value = "seats_a")]
    stat: String,
    #[arg(long)]
    max_lag: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistArgs {
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartialArgs {
    #[arg(long)]
    ensemble: PathBuf,
    /// Comma-separated prefix fractions in (0, 1]
    #[arg(long, default_value = "0.1,0.5,1.0")]
    fractions: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    other: PathBuf,
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    arity: u32,
    #[arg(long)]
    rng: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::RunSwap(args) => cmd_run_swap(args),
        Command::RunRecom(args) => cmd_run_recom(args),
        Command::ShortBurst(args) => cmd_short_burst(args),
        Command::Quotient(args) => cmd_quotient(args),
        Command::Diagnose(args) => cmd_diagnose(args),
        Command::Seed(args) => cmd_seed(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}

/// Loads a plan and surfaces any relabeling warnings on stderr.
fn load_plan_warned(path: &Path, graph: &DualGraph) -> Result<Plan> {
    let (plan, warnings) = load_plan(path, graph)?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(plan)
}

type Observers = Vec<Box<dyn Observer>>;

/// Resolves the election to observe: an explicit name, else the graph's only
/// election, else none (records carry digests only).
fn resolve_observers(
    graph: &DualGraph,
    election: Option<&str>,
) -> Result<(Observers, Option<String>)> {
    let name = match election {
        Some(name) => {
            graph.election(name)?;
            Some(name.to_string())
        }
        None => {
            let names = graph.election_names();
            match names.len() {
                0 => None,
                1 => Some(names[0].clone()),
                _ => {
                    return Err(Error::InvalidConfig {
                        reason: format!(
                            "graph has several elections ({}); pass --election",
                            names.join(", ")
                        ),
                    })
                }
            }
        }
    };
    let observers: Observers = match &name {
        Some(n) => vec![Box::new(ElectionObserver::new(n.clone()))],
        None => vec![],
    };
    Ok((observers, name))
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, body).map_err(|e| Error::Io {
        path: tmp.display().to_string(),
        source: e,
    })?;
    std::fs::rename(&tmp, path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Writes a CSV either to a file (atomically) or stdout.
fn emit_csv(out: Option<&Path>, body: String) -> Result<()> {
    match out {
        Some(path) => write_text(path, &body),
        None => {
            print!("{body}");
            std::io::stdout().flush().map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    println!(
        "graph: {} vertices, {} edges, total population {}",
        graph.num_vertices(),
        graph.num_edges(),
        graph.total_population()
    );
    let elections = graph.election_names();
    if !elections.is_empty() {
        println!("elections: {}", elections.join(", "));
    }
    if let Some(plan_path) = &args.plan {
        let plan = load_plan_warned(plan_path, &graph)?;
        if !is_contiguous_plan(&graph, &plan)? {
            let broken = plan
                .districts()
                .iter()
                .position(|d| !nestchain::is_connected(&graph, d).unwrap_or(true))
                .unwrap_or(0);
            return Err(Error::NotContiguous {
                district: broken as u32 + 1,
            });
        }
        println!(
            "plan: {} districts, contiguous, population deviation {:.4}",
            plan.num_districts(),
            population_deviation(&graph, &plan)?
        );
        if let Some(arity) = args.arity {
            let spec = NestingSpec::new(arity)?;
            if !is_k_nested(&graph, &plan, spec)? {
                return Err(Error::InvalidSeed {
                    reason: format!("plan is not a valid {arity}:1 nesting"),
                });
            }
            println!("nesting (k={arity}): valid");
        }
    }
    Ok(())
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let mut manifest = RunManifest::new(
        "enumerate",
        serde_json::json!({
            "arity": args.arity,
            "districts": args.districts,
            "size": args.size,
        }),
    );
    manifest.record_input(&args.graph)?;

    enum Mode {
        Nesting(NestingSpec),
        Exact(u32, u32),
    }
    let mode = match (args.arity, args.districts, args.size) {
        (Some(arity), None, None) => Mode::Nesting(NestingSpec::new(arity)?),
        (None, Some(d), Some(s)) => Mode::Exact(d, s),
        _ => {
            return Err(Error::InvalidConfig {
                reason: "pass either --arity or both --districts and --size".into(),
            })
        }
    };

    let count = if let Some(out) = &args.out {
        let plans = match &mode {
            Mode::Nesting(spec) => {
                enumerate_nestings_with_limit(&graph, *spec, DEFAULT_NESTING_LIMIT)?
            }
            Mode::Exact(d, s) => enumerate_balanced_partitions(&graph, *d, *s)?,
        };
        let mut body = String::new();
        for plan in &plans {
            let entry: BTreeMap<&str, u32> = plan
                .assignments()
                .map(|(v, d)| (graph.vertex_name(v), d.label()))
                .collect();
            body.push_str(&serde_json::to_string(&entry).expect("plans serialize"));
            body.push('\n');
        }
        write_text(out, &body)?;
        manifest.record_output(out);
        manifest.write(manifest_path(out))?;
        plans.len() as u64
    } else {
        match &mode {
            Mode::Nesting(spec) => count_nestings(&graph, *spec, DEFAULT_NESTING_LIMIT)?,
            Mode::Exact(d, s) => {
                count_balanced_partitions(&graph, *d, *s, DEFAULT_PARTITION_LIMIT)?
            }
        }
    };
    println!("{count}");
    Ok(())
}

fn cmd_run_swap(args: RunSwapArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let seed = load_plan_warned(&args.seed_plan, &graph)?;
    let spec = NestingSpec::new(args.arity)?;
    let config =
        SwapConfig::new(args.steps, args.rng, spec)?.with_max_rejections(args.max_rejections)?;
    let (observers, election) = resolve_observers(&graph, args.election.as_deref())?;

    let run = run_swap(&graph, &seed, &config, observers)?;
    let written = write_ensemble(&args.out, run)?;

    let mut manifest = RunManifest::new(
        "run-swap",
        serde_json::json!({
            "steps": args.steps,
            "arity": args.arity,
            "max_rejections": args.max_rejections,
            "election": election,
        }),
    )
    .with_rng_seed(args.rng);
    manifest.record_input(&args.graph)?;
    manifest.record_input(&args.seed_plan)?;
    manifest.record_output(&args.out);
    manifest.write(manifest_path(&args.out))?;
    println!("wrote {written} records to {}", args.out.display());
    Ok(())
}

fn cmd_run_recom(args: RunRecomArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let seed = load_plan_warned(&args.seed_plan, &graph)?;
    let num_districts = match args.districts {
        Some(d) if d != seed.num_districts() => {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "--districts {d} does not match the seed plan's {}",
                    seed.num_districts()
                ),
            })
        }
        Some(d) => d,
        None => seed.num_districts(),
    };
    let config = RecomConfig::new(args.steps, args.rng, num_districts)?
        .with_epsilon(args.epsilon)?
        .with_tree_attempts(args.tree_attempts)?;
    let (observers, election) = resolve_observers(&graph, args.election.as_deref())?;

    let run = run_recom(&graph, &seed, &config, observers)?;
    let written = write_ensemble(&args.out, run)?;

    let mut manifest = RunManifest::new(
        "run-recom",
        serde_json::json!({
            "steps": args.steps,
            "epsilon": args.epsilon,
            "districts": num_districts,
            "tree_attempts": args.tree_attempts,
            "election": election,
        }),
    )
    .with_rng_seed(args.rng);
    manifest.record_input(&args.graph)?;
    manifest.record_input(&args.seed_plan)?;
    manifest.record_output(&args.out);
    manifest.write(manifest_path(&args.out))?;
    println!("wrote {written} records to {}", args.out.display());
    Ok(())
}

fn cmd_short_burst(args: ShortBurstArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let seed = load_plan_warned(&args.seed_plan, &graph)?;
    let inner = RecomConfig::new(1, args.rng, seed.num_districts())?
        .with_epsilon(args.epsilon)?
        .with_tree_attempts(args.tree_attempts)?;
    let config = BurstConfig::new(args.bursts, args.party, args.election.clone(), inner)
        .with_burst_length(args.burst_length)?;

    let result = run_short_bursts(&graph, &seed, &config)?;
    save_plan(&result.best_plan, &graph, &args.out)?;

    let mut manifest = RunManifest::new(
        "short-burst",
        serde_json::json!({
            "bursts": args.bursts,
            "burst_length": args.burst_length,
            "election": args.election,
            "party": args.party.to_string(),
            "epsilon": args.epsilon,
            "tree_attempts": args.tree_attempts,
        }),
    )
    .with_rng_seed(args.rng);
    manifest.record_input(&args.graph)?;
    manifest.record_input(&args.seed_plan)?;
    manifest.record_output(&args.out);

    if let Some(trace_path) = &args.trace {
        let mut body = String::from("burst,best_score\n");
        for (i, score) in result.trace.iter().enumerate() {
            body.push_str(&format!("{},{}\n", i + 1, score));
        }
        write_text(trace_path, &body)?;
        manifest.record_output(trace_path);
    }
    manifest.write(manifest_path(&args.out))?;
    println!(
        "best: {} seats for party {}; plan written to {}",
        result.best_score,
        args.party,
        args.out.display()
    );
    Ok(())
}

fn cmd_quotient(args: QuotientArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let plan = load_plan_warned(&args.plan, &graph)?;
    let quotient = quotient_graph(&graph, &plan)?;
    save_graph(&quotient, &args.out)?;

    let mut manifest = RunManifest::new("quotient", serde_json::json!({}));
    manifest.record_input(&args.graph)?;
    manifest.record_input(&args.plan)?;
    manifest.record_output(&args.out);
    manifest.write(manifest_path(&args.out))?;
    println!(
        "wrote district graph ({} vertices, {} edges) to {}",
        quotient.num_vertices(),
        quotient.num_edges(),
        args.out.display()
    );
    Ok(())
}

fn cmd_diagnose(command: DiagnoseCommand) -> Result<()> {
    match command {
        DiagnoseCommand::Autocorr(args) => {
            if args.stat != "seats_a" {
                return Err(Error::InvalidConfig {
                    reason: format!("unsupported statistic {:?}; only seats_a", args.stat),
                });
            }
            let records = read_ensemble(&args.ensemble)?;
            let series = seats_series(&records)?;
            let curve = autocorrelation_curve(&series, args.max_lag)?;
            let mut body = String::from("lag,autocorrelation\n");
            for (lag, value) in curve.iter().enumerate() {
                body.push_str(&format!("{lag},{value}\n"));
            }
            emit_csv(args.out.as_deref(), body)
        }
        DiagnoseCommand::Hist(args) => {
            let records = read_ensemble(&args.ensemble)?;
            let hist = seat_histogram(&records)?;
            let mut body = String::from("seats,count\n");
            for (seats, count) in &hist {
                body.push_str(&format!("{seats},{count}\n"));
            }
            emit_csv(args.out.as_deref(), body)
        }
        DiagnoseCommand::Partial(args) => {
            let fractions: Vec<f64> = args
                .fractions
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| Error::InvalidConfig {
                        reason: format!("bad fraction {s:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            let records = read_ensemble(&args.ensemble)?;
            let stats = partial_ensemble_rank_stats(&records, &fractions)?;
            let mut body = String::from("fraction,records_used,rank,min,q1,median,q3,max\n");
            for s in &stats {
                for (rank, r) in s.ranks.iter().enumerate() {
                    body.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        s.fraction,
                        s.records_used,
                        rank + 1,
                        r.min,
                        r.q1,
                        r.median,
                        r.q3,
                        r.max
                    ));
                }
            }
            emit_csv(args.out.as_deref(), body)
        }
        DiagnoseCommand::Compare(args) => {
            let a = seat_histogram(&read_ensemble(&args.ensemble)?)?;
            let b = seat_histogram(&read_ensemble(&args.other)?)?;
            println!("{}", histogram_distance(&a, &b)?);
            Ok(())
        }
    }
}

fn cmd_seed(args: SeedArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let spec = NestingSpec::new(args.arity)?;
    let plan = random_nested_seed(&graph, spec, args.rng)?;
    save_plan(&plan, &graph, &args.out)?;

    let mut manifest =
        RunManifest::new("seed", serde_json::json!({"arity": args.arity})).with_rng_seed(args.rng);
    manifest.record_input(&args.graph)?;
    manifest.record_output(&args.out);
    manifest.write(manifest_path(&args.out))?;
    println!(
        "wrote {}-district nested plan to {}",
        plan.num_districts(),
        args.out.display()
    );
    Ok(())
}
