use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};

use percolate_core::criticality::{
    binom_tail_bound, block_critical, block_seed_bounds, default_predictor, predictors, rate_constants,
    TailSide,
};
use percolate_core::engine::{parse_threshold_rule, CascadeOutcome, Dynamics, RunOptions, SeedSpec};
use percolate_core::graph::{
    graph_models, ingest_edge_list, matched_config_model, write_degree_file, write_edge_list, write_id_map,
    GraphModel, ModelLaw,
};
use percolate_core::harness::{
    log_grid, mean_std, run_sweep, seed_placement_experiment, simulate, write_csv, SweepPlan, DEFAULT_BUDGET,
};
use percolate_core::influence::{q_infinity, InfluenceSpec, DEFAULT_RHO_MAX};
use percolate_core::numeric::{binom_cdf, binom_sf};
use percolate_core::registry::parse_count;
use percolate_core::{Error, Params, Result, SimRng};

/// Outputs above this many rows must go to a file.
const STDOUT_ROW_LIMIT: usize = 10_000;

#[derive(Parser)]
#[command(name = "percolate", version, about = "Generalized bootstrap percolation on random graphs")]
struct Cli {
    /// Worker threads for Monte Carlo runs. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the predicted critical seed size and related constants.
    Predict(PredictArgs),
    /// Run cascades at one seed placement and print one CSV row per run.
    Simulate(SimulateArgs),
    /// Sweep the seed count and write the mean final fraction as CSV.
    Sweep(SweepArgs),
    /// Read an edge list and write derived files.
    Ingest(IngestArgs),
    /// Compare seed allocations across the communities of a block model.
    PlaceSeeds(PlaceArgs),
    /// Compare binomial tail bounds with exact tails, and print rate constants.
    BoundsCheck(BoundsArgs),
}

#[derive(Args, Clone, Default)]
struct GraphArgs {
    /// Graph model: gnp-implicit, gnp, gnm, config, powerlaw, block, edgelist.
    #[arg(long)]
    model: Option<String>,
    /// Node count; scientific notation accepted (1e6).
    #[arg(long)]
    n: Option<String>,
    /// Target mean degree.
    #[arg(long)]
    dbar: Option<String>,
    /// Edge probability.
    #[arg(long)]
    p: Option<String>,
    /// Edge count.
    #[arg(long)]
    m: Option<String>,
    /// Degree sequence file, one degree per line.
    #[arg(long)]
    degfile: Option<PathBuf>,
    /// Comma-separated degree sequence.
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    dmin: Option<String>,
    #[arg(long)]
    dmax: Option<String>,
    /// Community sizes, comma-separated.
    #[arg(long)]
    sizes: Option<String>,
    /// Block probability matrix, rows separated by `;`.
    #[arg(long)]
    probs: Option<String>,
    #[arg(long)]
    p_in: Option<String>,
    #[arg(long)]
    p_out: Option<String>,
    /// Edge-list file.
    #[arg(long)]
    path: Option<PathBuf>,
    /// Any other model parameter.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl GraphArgs {
    fn params(&self) -> Result<Params> {
        let mut params = Params::new();
        let flags = [
            ("n", &self.n),
            ("d_bar", &self.dbar),
            ("p", &self.p),
            ("m", &self.m),
            ("degrees", &self.degrees),
            ("beta", &self.beta),
            ("d_min", &self.dmin),
            ("d_max", &self.dmax),
            ("sizes", &self.sizes),
            ("p", &self.probs),
            ("p_in", &self.p_in),
            ("p_out", &self.p_out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                params.insert(key, v);
            }
        }
        if let Some(f) = &self.degfile {
            params.insert("degree_file", f.display());
        }
        if let Some(f) = &self.path {
            params.insert("path", f.display());
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse {
                what: "--set",
                input: kv.clone(),
                reason: "expected KEY=VALUE".into(),
            })?;
            params.insert(k.trim(), v.trim());
        }
        Ok(params)
    }

    fn build(&self) -> Result<Arc<dyn GraphModel>> {
        let name = self.model.as_deref().ok_or_else(|| Error::Invalid {
            what: "arguments",
            reason: "--model is required".into(),
        })?;
        Ok(Arc::from(graph_models().create(name, &self.params()?)?))
    }
}

#[derive(Args, Clone, Default)]
struct DynamicsArgs {
    /// Threshold law, e.g. `const:2`, `uniformset:2-5`, `2:0.25,10:0.75`.
    #[arg(long = "R", conflicts_with = "rule")]
    r: Option<String>,
    /// Weight law; defaults to `const:1`.
    #[arg(long = "W", conflicts_with = "rule")]
    w: Option<String>,
    /// Degree-dependent threshold with unit weights: `const:r`, `log2`, `sqrt`.
    #[arg(long)]
    rule: Option<String>,
}

impl DynamicsArgs {
    fn build(&self) -> Result<Dynamics> {
        match (&self.rule, &self.r) {
            (Some(rule), _) => Ok(Dynamics::DegreeRule(parse_threshold_rule(rule)?.into())),
            (None, Some(r)) => Ok(Dynamics::Influence(InfluenceSpec::parse(
                r,
                self.w.as_deref().unwrap_or("const:1"),
            )?)),
            (None, None) => Err(Error::Invalid {
                what: "arguments",
                reason: "give --R (and optionally --W) or --rule".into(),
            }),
        }
    }
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// Predictor name; chosen from the model when omitted.
    #[arg(long)]
    predictor: Option<String>,
    #[arg(long, default_value_t = DEFAULT_RHO_MAX)]
    rho_max: usize,
    /// Slack for the block-model seed bounds.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Also print rate constants at a = alpha * a_c.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Cascade process: node, edge, generations, block-paired, block-global.
    #[arg(long, default_value = "node")]
    process: String,
    /// Keep one graph for every run instead of drawing a new one.
    #[arg(long)]
    fixed_graph: bool,
    /// Output file; required above 10000 rows.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Seeds: a count (`120`), per-community counts (`60,60`) or `nodes:1,2,3`.
    #[arg(long)]
    seeds: SeedSpec,
    #[arg(long, default_value_t = 1)]
    runs: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Plan file with [graph], [dynamics] and [sweep] sections.
    #[arg(long, conflicts_with_all = ["model", "grid", "grid_from"])]
    plan: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// Explicit seed counts, comma-separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "grid_from")]
    grid: Option<Vec<String>>,
    #[arg(long, requires_all = ["grid_to", "grid_points"])]
    grid_from: Option<String>,
    #[arg(long)]
    grid_to: Option<String>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Runs per grid point; overrides the plan.
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed; overrides the plan.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    fixed_graph: bool,
    /// Extra bisection points around the transition.
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    predictor: Option<String>,
    /// Work budget in node-plus-edge visits; exit code 3 when exceeded.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Whitespace-separated edge list; `#` comments allowed.
    path: PathBuf,
    /// Write the degree sequence, one per line.
    #[arg(long)]
    emit_degrees: Option<PathBuf>,
    /// Write a configuration-model graph with the same degrees as an edge list.
    #[arg(long)]
    matched_config: Option<PathBuf>,
    /// Drop loops and parallel edges from the matched configuration model.
    #[arg(long, requires = "matched_config")]
    simplify: bool,
    /// Write the dense-to-original id mapping.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct PlaceArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// Per-community seed counts, e.g. `--alloc 15,0 --alloc 8,7`.
    #[arg(long = "alloc", required = true)]
    allocations: Vec<String>,
    #[arg(long, default_value_t = 500)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Required margin, in pooled standard errors, for dominance.
    #[arg(long, default_value_t = 3.0)]
    sigmas: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Lower,
    Upper,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, requires_all = ["p", "k"])]
    n: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<String>,
    /// Tail side; inferred from k against np when omitted.
    #[arg(long, value_enum)]
    side: Option<Side>,
    /// Check this many random (n, p, k) points.
    #[arg(long, conflicts_with = "n")]
    random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print rate constants for this rho*.
    #[arg(long, requires = "alpha")]
    rho: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = match cli.command {
        Command::Predict(args) => predict(args),
        Command::Simulate(args) => simulate_cmd(args, cli.workers),
        Command::Sweep(args) => sweep(args, cli.workers),
        Command::Ingest(args) => ingest(args),
        Command::PlaceSeeds(args) => place_seeds(args, cli.workers),
        Command::BoundsCheck(args) => bounds_check(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget { .. } => ExitCode::from(3),
                e if e.is_validation() => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

/// The resolved configuration, on stderr so stdout stays machine-readable.
fn print_config(command: &str, model: &dyn GraphModel, dynamics: &Dynamics, seed: Option<u64>) {
    eprintln!("# command: {command}");
    eprintln!("# model: {} ({})", model.name(), model.params());
    eprintln!("# dynamics: {}", dynamics.describe());
    if let Some(seed) = seed {
        eprintln!("# seed: {seed}");
    }
}

fn output(out: Option<&Path>, rows: usize) -> Result<Box<dyn Write>> {
    match out {
        Some(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
        None if rows > STDOUT_ROW_LIMIT => Err(Error::Invalid {
            what: "arguments",
            reason: format!("{rows} rows exceed {STDOUT_ROW_LIMIT}; pass --out"),
        }),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn predict(args: PredictArgs) -> Result<ExitCode> {
    let model = args.graph.build()?;
    let dynamics = args.dynamics.build()?;
    print_config("predict", model.as_ref(), &dynamics, None);
    let law = model.law();
    let name = args.predictor.as_deref().unwrap_or_else(|| default_predictor(&law, &dynamics));
    let params = Params::new().with("rho_max", args.rho_max).with("epsilon", args.epsilon);
    let pred = predictors().create(name, &params)?.predict(&law, &dynamics)?;
    println!("predictor: {name}");
    println!("variant: {}", pred.variant);
    println!("a_c: {}", pred.a_c);
    println!("t_c: {}", pred.t_c);
    println!("rho_star: {}", pred.rho_star);
    println!("q_rho_star: {}", pred.q_rho_star);
    if let Some(d) = pred.mean_degree {
        println!("mean_degree: {d}");
    }
    if let Some(d) = pred.d_star {
        println!("d_star: {d}");
    }
    if let Dynamics::Influence(spec) = &dynamics {
        let profile = spec.profile(args.rho_max)?;
        let (q_inf, exact) = q_infinity(spec, &profile.q);
        println!("q_inf: {q_inf}{}", if exact { "" } else { " (lower bound)" });
    }
    if let (ModelLaw::Block { sizes, probs }, Some(r)) = (&law, pred.rho_star.try_into().ok()) {
        for c in block_critical(sizes, probs, r)? {
            println!(
                "community {}: n={} p_hat={} a_c_bar={} a_c_reduced={}",
                c.community, c.size, c.p_hat, c.a_c_bar, c.a_c_reduced
            );
        }
        let b = block_seed_bounds(sizes, probs, r, args.epsilon)?;
        println!("uniform_bound: {}", b.uniform_bound);
        println!("optimal_community: {}", b.optimal_community);
        println!("optimal_bound: {}", b.optimal_bound);
        println!("uniform_via_optimal: {}", b.uniform_via_optimal);
    }
    if let Some(alpha) = args.alpha {
        let rc = rate_constants(pred.rho_star, alpha, 0.1)?;
        println!("alpha: {alpha}");
        for (key, v) in [("C1", rc.c1), ("C2(eps=0.1)", rc.c2), ("phi", rc.phi), ("subcritical_ratio", rc.subcritical_ratio)] {
            if let Some(v) = v {
                println!("{key}: {v}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate_cmd(args: SimulateArgs, workers: usize) -> Result<ExitCode> {
    let model = args.graph.build()?;
    let dynamics = args.dynamics.build()?;
    print_config("simulate", model.as_ref(), &dynamics, Some(args.run.seed));
    eprintln!("# process: {}; seeds: {}; runs: {}", args.run.process, args.seeds, args.runs);
    let out = output(args.run.out.as_deref(), args.runs)?;
    let outcomes = simulate(
        model.as_ref(),
        &dynamics,
        &args.run.process,
        &args.seeds,
        args.runs,
        args.run.seed,
        !args.run.fixed_graph,
        workers,
        RunOptions::default(),
    )?;
    let mut csv = csv_writer(out);
    csv.write_record(CascadeOutcome::CSV_HEADER).map_err(Error::from)?;
    let seeds = args.seeds.to_string();
    for o in &outcomes {
        csv.write_record(o.csv_record(model.name(), &seeds)).map_err(Error::from)?;
    }
    csv.flush()?;
    let n = model.node_count();
    let fractions: Vec<f64> = outcomes.iter().map(|o| o.fraction(n)).collect();
    let (mean, sd) = mean_std(&fractions);
    eprintln!("# mean final fraction: {mean:.6} (sd {sd:.6})");
    Ok(ExitCode::SUCCESS)
}

fn csv_writer(out: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::Writer::from_writer(out)
}

fn parse_grid(args: &SweepArgs) -> Result<Vec<usize>> {
    if let Some(items) = &args.grid {
        return items.iter().map(|s| parse_count("grid", s)).collect();
    }
    match (&args.grid_from, &args.grid_to, args.grid_points) {
        (Some(from), Some(to), Some(points)) => {
            log_grid(parse_count("grid_from", from)?, parse_count("grid_to", to)?, points)
        }
        _ => Err(Error::Invalid {
            what: "arguments",
            reason: "give --plan, --grid, or --grid-from/--grid-to/--grid-points".into(),
        }),
    }
}

fn sweep(args: SweepArgs, workers: usize) -> Result<ExitCode> {
    let mut plan = match &args.plan {
        Some(path) => SweepPlan::from_file(path)?,
        None => SweepPlan::new(args.graph.build()?, args.dynamics.build()?, parse_grid(&args)?),
    };
    if let Some(runs) = args.runs {
        plan.runs = runs;
    }
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    if let Some(process) = &args.process {
        plan.process = process.clone();
    }
    if args.fixed_graph {
        plan.fresh_graph = false;
    }
    if let Some(rounds) = args.refine {
        plan.refine_rounds = rounds;
    }
    if args.predictor.is_some() {
        plan.predictor = args.predictor.clone();
    }
    plan.workers = workers;
    plan.budget = args.budget;
    print_config("sweep", plan.model.as_ref(), &plan.dynamics, Some(plan.seed));
    eprintln!(
        "# process: {}; runs: {}; grid: {:?}; fresh graph: {}; refine: {}",
        plan.process, plan.runs, plan.grid, plan.fresh_graph, plan.refine_rounds
    );
    plan.validate()?;
    let out = output(args.out.as_deref(), plan.grid.len() + plan.refine_rounds)?;
    let result = run_sweep(&plan)?;
    write_csv(out, &result)?;
    if let Some(pred) = &result.prediction {
        eprintln!("# predicted a_c: {} ({})", pred.a_c, pred.variant);
    }
    match result.transition {
        Some(t) => eprintln!("# empirical transition: {t:.3}"),
        None => eprintln!("# empirical transition: none in range"),
    }
    Ok(ExitCode::SUCCESS)
}

fn ingest(args: IngestArgs) -> Result<ExitCode> {
    let (graph, report) = ingest_edge_list(&args.path)?;
    eprintln!("# command: ingest {}", args.path.display());
    eprintln!("# seed: {}", args.seed);
    println!("nodes: {}", report.nodes);
    println!("edges: {}", report.edges);
    println!("duplicates_collapsed: {}", report.duplicates);
    println!("self_loops_dropped: {}", report.self_loops);
    println!("mean_degree: {}", graph.mean_degree());
    if let Some(path) = &args.emit_degrees {
        write_degree_file(path, &graph.degrees())?;
    }
    if let Some(path) = &args.map {
        write_id_map(path, &report)?;
    }
    if let Some(path) = &args.matched_config {
        let mut rng = SimRng::seed_from_u64(args.seed);
        let mut matched = matched_config_model(&graph, &mut rng);
        let (loops, parallel) = matched.multiplicity_defects();
        println!("matched_self_loops: {loops}");
        println!("matched_parallel_edges: {parallel}");
        if args.simplify {
            matched = matched.simplify();
        }
        write_edge_list(path, &matched)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn place_seeds(args: PlaceArgs, workers: usize) -> Result<ExitCode> {
    let model = args.graph.build()?;
    let dynamics = args.dynamics.build()?;
    print_config("place-seeds", model.as_ref(), &dynamics, Some(args.seed));
    let allocations = args
        .allocations
        .iter()
        .map(|s| s.split(',').map(|x| parse_count("alloc", x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let table = seed_placement_experiment(model.as_ref(), &dynamics, &allocations, args.runs, args.seed, workers)?;
    println!("allocation,runs,mean_fraction,stddev,community_fraction,margin_to_best");
    for (row, margin) in table.rows.iter().zip(&table.margins) {
        let alloc: Vec<String> = row.allocation.iter().map(|a| a.to_string()).collect();
        let comm: Vec<String> = row.stats.community_fraction.iter().map(|f| f.to_string()).collect();
        println!(
            "\"{}\",{},{},{},\"{}\",{}",
            alloc.join(","),
            row.stats.runs,
            row.stats.mean_fraction,
            row.stats.stddev,
            comm.join(","),
            margin
        );
    }
    eprintln!("# best allocation: {:?}", table.rows[table.best].allocation);
    if let Some(k) = table.argmax_community {
        eprintln!("# argmax n_k p_kk^r community: {k}");
    }
    eprintln!("# dominates at {} sigma: {}", args.sigmas, table.dominates(args.sigmas));
    Ok(ExitCode::SUCCESS)
}

fn check_point(n: u64, p: f64, k: u64, side: Option<Side>) -> Result<bool> {
    let mu = n as f64 * p;
    let side = match side {
        Some(Side::Lower) => TailSide::Lower,
        Some(Side::Upper) => TailSide::Upper,
        None if k as f64 <= mu => TailSide::Lower,
        None => TailSide::Upper,
    };
    let bound = binom_tail_bound(n, p, k, side)?;
    let exact = match side {
        TailSide::Lower => binom_cdf(n, k, p),
        TailSide::Upper => binom_sf(n, k, p),
    };
    let ok = bound >= exact * (1.0 - 1e-9);
    println!(
        "n={n} p={p} k={k} side={} bound={bound:e} exact={exact:e} {}",
        if side == TailSide::Lower { "lower" } else { "upper" },
        if ok { "ok" } else { "VIOLATED" }
    );
    Ok(ok)
}

fn bounds_check(args: BoundsArgs) -> Result<ExitCode> {
    let mut all_ok = true;
    if let (Some(n), Some(p), Some(k)) = (&args.n, args.p, &args.k) {
        all_ok &= check_point(parse_count("n", n)? as u64, p, parse_count("k", k)? as u64, args.side)?;
    }
    if let Some(count) = args.random {
        eprintln!("# seed: {}", args.seed);
        let mut rng = SimRng::seed_from_u64(args.seed);
        for _ in 0..count {
            let n: u64 = rng.random_range(5..3000);
            let p: f64 = rng.random_range(0.001..0.999);
            let k: u64 = rng.random_range(0..=n);
            all_ok &= check_point(n, p, k, None)?;
        }
    }
    if let (Some(rho), Some(alpha)) = (args.rho, args.alpha) {
        let rc = rate_constants(rho, alpha, args.eps)?;
        println!("rho: {rho}");
        println!("alpha: {alpha}");
        for (key, v) in [("C1", rc.c1), ("C2", rc.c2), ("phi", rc.phi), ("subcritical_ratio", rc.subcritical_ratio)] {
            if let Some(v) = v {
                println!("{key}: {v}");
            }
        }
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
