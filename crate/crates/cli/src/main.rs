//! Command-line pipeline: generate ground-truth networks, simulate cascades,
//! infer the network back, and evaluate the recovery.
//!
//! Every command is a pure function of its flags, input files, and RNG seed;
//! outputs are byte-identical across re-runs and each one gets a `.manifest`
//! recording the resolved parameters.

use diffnet_cli::{error, formats, manifest};

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use diffnet::eval::{
    auc_gain_experiment, auc_gain_csv, accuracy, fmt_sig6, precision_recall, sweep_csv, sweep_k,
};
use diffnet::{
    assign_rates, greedy_infer, kronecker_network, scale_free_network, simulate_set, validate,
    Hyper, InferenceConfig, KroneckerParams, ModelKind, Objective, SimConfig, TransmissionModel,
};

use error::CliError;
use manifest::Manifest;

#[derive(Parser)]
#[command(name = "diffnet", version, about = "Diffusion network inference from cascades")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ground-truth network with per-edge transmission rates
    Generate(GenerateArgs),
    /// Simulate infection-time cascades over a network
    Simulate(SimulateArgs),
    /// Infer a network from recorded cascades
    Infer(InferArgs),
    /// Compare an inferred network against the truth
    Evaluate(EvaluateArgs),
    /// Sweep the edge budget and report metrics per selection round
    Sweep(SweepArgs),
    /// Relative AUC gain of all-trees over best-tree vs cascade count
    Aucgain(AucGainArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Likelihood {
    Exp,
    Pow,
    Ray,
}

impl From<Likelihood> for ModelKind {
    fn from(l: Likelihood) -> ModelKind {
        match l {
            Likelihood::Exp => ModelKind::Exp,
            Likelihood::Pow => ModelKind::Pow,
            Likelihood::Ray => ModelKind::Ray,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    AllTrees,
    BestTree,
}

impl From<Mode> for Objective {
    fn from(m: Mode) -> Objective {
        match m {
            Mode::AllTrees => Objective::AllTrees,
            Mode::BestTree => Objective::BestTree,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Kronecker,
    Scalefree,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: GenModel,
    /// 2x2 seed matrix as a,b,c,d (kronecker only)
    #[arg(long)]
    seed_matrix: Option<String>,
    /// Kronecker power; the network has 2^power nodes
    #[arg(long)]
    power: Option<u32>,
    /// Node count (scalefree only)
    #[arg(long)]
    nodes: Option<usize>,
    /// Out-edges attached per arriving node (scalefree only)
    #[arg(long)]
    out_degree: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    rate_low: f64,
    #[arg(long, default_value_t = 1.5)]
    rate_high: f64,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum)]
    likelihood: Likelihood,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long)]
    cascades: usize,
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    #[arg(long, default_value_t = 1.0)]
    pow_min_delay: f64,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    cascades: PathBuf,
    /// Maximum number of edges to select
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = Hyper::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, value_enum)]
    likelihood: Likelihood,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pow_min_delay: f64,
    #[arg(long, value_enum, default_value = "all-trees")]
    mode: Mode,
    /// Rescore every candidate each round instead of lazy evaluation
    #[arg(long)]
    no_lazy: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    inferred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    cascades: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Stop the sweep after this many edges (default: run to exhaustion)
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, value_enum)]
    likelihood: Likelihood,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = Hyper::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pow_min_delay: f64,
    #[arg(long, value_enum, default_value = "all-trees")]
    mode: Mode,
    #[arg(long)]
    no_lazy: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AucGainArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_enum)]
    likelihood: Likelihood,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = Hyper::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Ascending cascade counts, e.g. 25,50,100,200
    #[arg(long)]
    counts: String,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    #[arg(long, default_value_t = 1.0)]
    pow_min_delay: f64,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Aucgain(args) => cmd_aucgain(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn check_rate_bounds(low: f64, high: f64) -> Result<(), CliError> {
    if !low.is_finite() || low <= 0.0 || low > high {
        return Err(CliError::usage(format!(
            "--rate-low/--rate-high must satisfy 0 < low <= high, got {low} and {high}"
        )));
    }
    Ok(())
}

fn parse_seed_matrix(text: &str) -> Result<[[f64; 2]; 2], CliError> {
    let entries: Vec<f64> = text
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("--seed-matrix: '{text}' is not a,b,c,d")))?;
    if entries.len() != 4 {
        return Err(CliError::usage(format!(
            "--seed-matrix needs exactly 4 entries, got {}",
            entries.len()
        )));
    }
    for &p in &entries {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::usage(format!(
                "--seed-matrix: probability {p} is outside [0, 1]"
            )));
        }
    }
    Ok([[entries[0], entries[1]], [entries[2], entries[3]]])
}

/// Derives the rate-assignment stream from the topology seed so one --rng
/// flag drives the whole generation.
fn rate_seed(rng: u64) -> u64 {
    rng ^ 0x9E37_79B9_7F4A_7C15
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    check_rate_bounds(args.rate_low, args.rate_high)?;
    let mut manifest = Manifest::new("generate");
    let network = match args.model {
        GenModel::Kronecker => {
            let matrix_text = args
                .seed_matrix
                .as_deref()
                .ok_or_else(|| CliError::usage("--seed-matrix is required for kronecker"))?;
            let power = args
                .power
                .ok_or_else(|| CliError::usage("--power is required for kronecker"))?;
            if power == 0 {
                return Err(CliError::usage("--power must be at least 1"));
            }
            let matrix = parse_seed_matrix(matrix_text)?;
            let params = KroneckerParams::new(matrix, power)
                .map_err(|e| CliError::usage(e.to_string()))?;
            manifest.put("model", "kronecker");
            manifest.put("seed_matrix", matrix_text);
            manifest.put("power", power);
            kronecker_network(&params, args.rng)?
        }
        GenModel::Scalefree => {
            let nodes = args
                .nodes
                .ok_or_else(|| CliError::usage("--nodes is required for scalefree"))?;
            let out_degree = args
                .out_degree
                .ok_or_else(|| CliError::usage("--out-degree is required for scalefree"))?;
            manifest.put("model", "scalefree");
            manifest.put("nodes", nodes);
            manifest.put("out_degree", out_degree);
            scale_free_network(nodes, out_degree, args.rng)
                .map_err(|e| CliError::usage(e.to_string()))?
        }
    };
    let rated = assign_rates(&network, args.rate_low, args.rate_high, rate_seed(args.rng))?;
    manifest.put("rate_low", args.rate_low);
    manifest.put("rate_high", args.rate_high);
    manifest.put("rng", args.rng);
    manifest.put("rates_rng", rate_seed(args.rng));

    std::fs::write(&args.out, formats::write_network(&rated))?;
    manifest.write_beside(&args.out)?;
    println!(
        "generated {} nodes, {} edges -> {}",
        rated.n_nodes(),
        rated.n_edges(),
        args.out.display()
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&args.beta) {
        return Err(CliError::usage(format!("--beta must lie in [0, 1], got {}", args.beta)));
    }
    if !args.horizon.is_finite() || args.horizon <= 0.0 {
        return Err(CliError::usage(format!(
            "--horizon must be positive, got {}",
            args.horizon
        )));
    }
    if args.min_size < 1 {
        return Err(CliError::usage("--min-size must be at least 1"));
    }
    if !args.pow_min_delay.is_finite() || args.pow_min_delay <= 0.0 {
        return Err(CliError::usage("--pow-min-delay must be positive"));
    }
    let network = formats::read_network(&read_file(&args.network)?)?;
    let config = SimConfig {
        beta: args.beta,
        horizon: args.horizon,
        min_cascade_size: args.min_size,
        pow_min_delay: args.pow_min_delay,
        ..SimConfig::default()
    };
    let kind: ModelKind = args.likelihood.into();
    let set = simulate_set(&network, kind, &config, args.cascades, args.rng)?;

    let mut manifest = Manifest::new("simulate");
    manifest.put_path("input.network", &args.network);
    manifest.put("likelihood", kind.as_str());
    manifest.put("beta", args.beta);
    manifest.put("horizon", args.horizon);
    manifest.put("cascades", args.cascades);
    manifest.put("min_size", args.min_size);
    manifest.put("pow_min_delay", args.pow_min_delay);
    manifest.put("rng", args.rng);

    std::fs::write(&args.out, formats::write_cascades(&set)?)?;
    manifest.write_beside(&args.out)?;
    println!(
        "simulated {} cascades over {} nodes -> {}",
        set.len(),
        set.n_nodes(),
        args.out.display()
    );
    Ok(())
}

fn build_model(
    likelihood: Likelihood,
    alpha: f64,
    pow_min_delay: f64,
) -> Result<TransmissionModel, CliError> {
    TransmissionModel::with_min_delay(likelihood.into(), alpha, pow_min_delay)
        .map_err(|e| CliError::usage(format!("--alpha/--pow-min-delay: {e}")))
}

fn build_hyper(epsilon: f64) -> Result<Hyper, CliError> {
    Hyper::new(epsilon, 0.5).map_err(|e| CliError::usage(format!("--epsilon: {e}")))
}

fn load_cascades(path: &Path) -> Result<diffnet::CascadeSet, CliError> {
    let set = formats::read_cascades(&read_file(path)?)?;
    let violations = validate(&set);
    if !violations.is_empty() {
        return Err(CliError::data(format!(
            "{}: {}",
            path.display(),
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(set)
}

fn cmd_infer(args: InferArgs) -> Result<(), CliError> {
    if args.k == 0 {
        return Err(CliError::usage("--k must be at least 1"));
    }
    let set = load_cascades(&args.cascades)?;
    let model = build_model(args.likelihood, args.alpha, args.pow_min_delay)?;
    let config = InferenceConfig::new(args.k)
        .with_hyper(build_hyper(args.epsilon)?)
        .with_mode(args.mode.into())
        .with_lazy(!args.no_lazy);
    let result = greedy_infer(&set, &model, &config)?;

    let mut manifest = Manifest::new("infer");
    manifest.put_path("input.cascades", &args.cascades);
    manifest.put("k", args.k);
    manifest.put("epsilon", args.epsilon);
    manifest.put("likelihood", ModelKind::from(args.likelihood).as_str());
    manifest.put("alpha", args.alpha);
    manifest.put("pow_min_delay", args.pow_min_delay);
    manifest.put(
        "mode",
        match args.mode {
            Mode::AllTrees => "all-trees",
            Mode::BestTree => "best-tree",
        },
    );
    manifest.put("lazy", !args.no_lazy);

    std::fs::write(&args.out, formats::write_inferred(set.n_nodes(), &result.edges))?;
    manifest.write_beside(&args.out)?;
    println!(
        "selected {} edges (exhausted: {})",
        result.edges.len(),
        result.exhausted
    );
    println!("objective: {}", fmt_sig6(result.objective()));
    println!("online bound: {}", fmt_sig6(result.online_bound));
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let inferred = formats::read_inferred(&read_file(&args.inferred)?)?;
    let truth = formats::read_network(&read_file(&args.truth)?)?;
    if inferred.n_nodes() != truth.n_nodes() {
        return Err(CliError::data(format!(
            "node-count mismatch: {} has {} nodes, {} has {}",
            args.inferred.display(),
            inferred.n_nodes(),
            args.truth.display(),
            truth.n_nodes()
        )));
    }
    let (precision, recall) = precision_recall(&inferred, &truth)?;
    let acc = accuracy(&inferred, &truth)?;
    let common = inferred
        .edges()
        .filter(|&(s, d)| truth.contains(s, d))
        .count();

    let csv = format!(
        "n_inferred,n_truth,n_common,precision,recall,accuracy\n{},{},{},{},{},{}\n",
        inferred.n_edges(),
        truth.n_edges(),
        common,
        fmt_sig6(precision),
        fmt_sig6(recall),
        fmt_sig6(acc)
    );
    let mut manifest = Manifest::new("evaluate");
    manifest.put_path("input.inferred", &args.inferred);
    manifest.put_path("input.truth", &args.truth);

    std::fs::write(&args.out, csv)?;
    manifest.write_beside(&args.out)?;
    println!(
        "precision {} recall {} accuracy {}",
        fmt_sig6(precision),
        fmt_sig6(recall),
        fmt_sig6(acc)
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let set = load_cascades(&args.cascades)?;
    let truth = formats::read_network(&read_file(&args.truth)?)?;
    if truth.n_nodes() != set.n_nodes() {
        return Err(CliError::data(format!(
            "node-count mismatch: cascades cover {} nodes, truth has {}",
            set.n_nodes(),
            truth.n_nodes()
        )));
    }
    let model = build_model(args.likelihood, args.alpha, args.pow_min_delay)?;
    let config = InferenceConfig::new(1)
        .with_hyper(build_hyper(args.epsilon)?)
        .with_mode(args.mode.into())
        .with_lazy(!args.no_lazy);
    let k_max = args.k_max.unwrap_or(usize::MAX);
    let rows = sweep_k(&set, &model, &config, &truth, k_max)?;

    let mut manifest = Manifest::new("sweep");
    manifest.put_path("input.cascades", &args.cascades);
    manifest.put_path("input.truth", &args.truth);
    manifest.put(
        "k_max",
        args.k_max.map_or("exhaustion".to_string(), |k| k.to_string()),
    );
    manifest.put("likelihood", ModelKind::from(args.likelihood).as_str());
    manifest.put("alpha", args.alpha);
    manifest.put("epsilon", args.epsilon);
    manifest.put("pow_min_delay", args.pow_min_delay);
    manifest.put(
        "mode",
        match args.mode {
            Mode::AllTrees => "all-trees",
            Mode::BestTree => "best-tree",
        },
    );
    manifest.put("lazy", !args.no_lazy);

    std::fs::write(&args.out, sweep_csv(&rows))?;
    manifest.write_beside(&args.out)?;
    println!("{} sweep rows -> {}", rows.len(), args.out.display());
    Ok(())
}

fn parse_counts(text: &str) -> Result<Vec<usize>, CliError> {
    let counts: Vec<usize> = text
        .split(',')
        .map(|f| f.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("--counts: '{text}' is not a list of integers")))?;
    if counts.is_empty() || counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::usage("--counts must be sorted ascending"));
    }
    Ok(counts)
}

fn cmd_aucgain(args: AucGainArgs) -> Result<(), CliError> {
    let counts = parse_counts(&args.counts)?;
    if !(0.0..=1.0).contains(&args.beta) {
        return Err(CliError::usage(format!("--beta must lie in [0, 1], got {}", args.beta)));
    }
    if !args.horizon.is_finite() || args.horizon <= 0.0 {
        return Err(CliError::usage("--horizon must be positive"));
    }
    let truth = formats::read_network(&read_file(&args.truth)?)?;
    let model = build_model(args.likelihood, args.alpha, args.pow_min_delay)?;
    let sim_config = SimConfig {
        beta: args.beta,
        horizon: args.horizon,
        min_cascade_size: args.min_size,
        pow_min_delay: args.pow_min_delay,
        ..SimConfig::default()
    };
    let inference_config = InferenceConfig::new(usize::MAX).with_hyper(build_hyper(args.epsilon)?);
    let rows = auc_gain_experiment(
        &truth,
        args.likelihood.into(),
        &counts,
        &sim_config,
        &model,
        &inference_config,
        args.rng,
    )?;

    let mut manifest = Manifest::new("aucgain");
    manifest.put_path("input.truth", &args.truth);
    manifest.put("likelihood", ModelKind::from(args.likelihood).as_str());
    manifest.put("alpha", args.alpha);
    manifest.put("epsilon", args.epsilon);
    manifest.put("counts", &args.counts);
    manifest.put("beta", args.beta);
    manifest.put("horizon", args.horizon);
    manifest.put("min_size", args.min_size);
    manifest.put("pow_min_delay", args.pow_min_delay);
    manifest.put("rng", args.rng);

    std::fs::write(&args.out, auc_gain_csv(&rows))?;
    manifest.write_beside(&args.out)?;
    println!("{} rows -> {}", rows.len(), args.out.display());
    Ok(())
}
