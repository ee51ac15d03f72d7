//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 dataset or runtime error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{self, emit_report, history_csv, Report};
use crate::ccg::{Initializer, DEFAULT_MAX_PASSES};
use crate::constraints::FeasibilityMode;
use crate::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use crate::model::{dataset_digest, load_dataset, save_dataset, Dataset};
use crate::nsga3::{self, GaConfig, Mating, ObjectiveMask, Survival, OBJECTIVE_NAMES};

pub const OUT_DIR_ENV: &str = "ROBODSP_OUT_DIR";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "robodsp", version, about = "Disassembly sequence planning")]
pub struct Cli {
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic screw-tower dataset.
    GenSynthetic(GenArgs),
    /// Plan a disassembly sequence.
    Plan(PlanArgs),
    /// Compare chromosome initializers.
    InitBench(InitArgs),
    /// Run the ablation study.
    Ablate(PlanArgs),
    /// Optimize each objective on its own.
    SingleObj(SingleArgs),
    /// Load and check a dataset file.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// JSON file with any of the generator fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub screws: Option<usize>,
    #[arg(long)]
    pub manual_fraction: Option<f64>,
    #[arg(long)]
    pub priority: Option<usize>,
    #[arg(long)]
    pub spacers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pitch: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub clearance: f64,
    #[arg(long, default_value_t = 5.0)]
    pub angle: f64,
    /// Output file [default: <out dir>/dataset.json].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GaArgs {
    /// JSON file with planner settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub pop: Option<usize>,
    /// Random seed [default: drawn from entropy and echoed].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Crossover, mutation, cut-and-paste and break-and-join rates.
    #[arg(long, value_name = "CX,MUT,CAP,BAJ")]
    pub rates: Option<String>,
    #[arg(long)]
    pub divisions: Option<usize>,
    #[arg(long)]
    pub mode: Option<FeasibilityMode>,
    /// Enabled objectives, e.g. `d,e,p,a`.
    #[arg(long)]
    pub objectives: Option<ObjectiveMask>,
    #[arg(long)]
    pub mating: Option<Mating>,
    /// Survival: `niching` or `crowding`.
    #[arg(long)]
    pub selection: Option<Survival>,
    /// Initializer: ri, fr, sfr or ccgi.
    #[arg(long)]
    pub init: Option<Initializer>,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Output directory [default: $ROBODSP_OUT_DIR or `out`].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Objectives to optimize alone.
    #[arg(long, default_value = "d,e,p,a")]
    pub objective: ObjectiveMask,
}

#[derive(Debug, Args)]
pub struct InitArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "ri,fr,sfr,ccgi")]
    pub methods: Vec<Initializer>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "as-written")]
    pub mode: FeasibilityMode,
    #[arg(long, default_value_t = DEFAULT_MAX_PASSES)]
    pub max_passes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn parse_rates(text: &str) -> Result<[f64; 4], CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--rates: {e}")))?;
    <[f64; 4]>::try_from(values).map_err(|_| CliError::Usage("--rates takes exactly four values".into()))
}

fn ga_config(args: &GaArgs) -> Result<GaConfig, CliError> {
    let mut c: GaConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => GaConfig::default(),
    };
    if let Some(v) = args.generations {
        c.generations = v;
    }
    if let Some(v) = args.iterations {
        c.iterations = v;
    }
    if let Some(v) = args.pop {
        c.population = v;
    }
    if let Some(v) = &args.rates {
        [c.crossover_rate, c.mutation_rate, c.cut_paste_rate, c.break_join_rate] = parse_rates(v)?;
    }
    if let Some(v) = args.divisions {
        c.divisions = v;
    }
    if let Some(v) = args.mode {
        c.mode = v;
    }
    if let Some(v) = args.objectives {
        c.objectives = v;
    }
    if let Some(v) = args.mating {
        c.mating = v;
    }
    if let Some(v) = args.selection {
        c.survival = v;
    }
    if let Some(v) = args.init {
        c.initializer = v;
    }
    c.normalize |= args.normalize;
    c.parallel |= args.parallel;
    if args.seed.is_some() || args.config.is_none() {
        c.seed = resolve_seed(args.seed);
    }
    c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(c)
}

fn open_dataset(path: &Path, out: &mut dyn Write) -> Result<(Dataset, String), CliError> {
    let ds = load_dataset(path).map_err(|e| failure(format!("{}: {e}", path.display())))?;
    let digest = dataset_digest(&ds);
    let _ = writeln!(out, "dataset: {} (sha256 {digest})", path.display());
    log::info!("dataset {} sha256 {digest}", path.display());
    Ok((ds, digest))
}

fn header(out: &mut dyn Write, command: &str) {
    let _ = writeln!(out, "robodsp {VERSION}");
    let _ = writeln!(out, "command: {command}");
    log::info!("robodsp {VERSION} {command}");
}

fn echo_config(out: &mut dyn Write, config: &impl Serialize) {
    let text = serde_json::to_string(config).expect("configs serialize");
    let _ = writeln!(out, "config: {text}");
    log::info!("config {text}");
}

fn wrote(out: &mut dyn Write, paths: &[PathBuf]) {
    for p in paths {
        let _ = writeln!(out, "wrote {}", p.display());
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| failure(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn gen_synthetic(args: GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    header(out, "gen-synthetic");
    let mut spec: SyntheticSpec = match &args.config {
        Some(path) => read_json(path)?,
        None => SyntheticSpec::default(),
    };
    if let Some(v) = args.layers {
        spec.n_layers = v;
    }
    if let Some(v) = args.screws {
        spec.screws_per_layer = v;
    }
    if let Some(v) = args.manual_fraction {
        spec.manual_fraction = v;
    }
    if let Some(v) = args.priority {
        spec.priority_count = v;
    }
    if let Some(v) = args.spacers {
        spec.spacers = v;
    }
    if let Some(v) = args.pitch {
        spec.pitch_mm = v;
    }
    if args.seed.is_some() || args.config.is_none() {
        spec.seed = resolve_seed(args.seed);
    }
    if spec.n_layers == 0 {
        return Err(CliError::Usage("a tower needs at least one layer".into()));
    }
    if !(0.0..=1.0).contains(&spec.manual_fraction) {
        return Err(CliError::Usage("--manual-fraction must lie in [0, 1]".into()));
    }
    let params = SimParams {
        clearance_mm: args.clearance,
        angle_deg: args.angle,
    };
    if params.clearance_mm < spec.pitch_mm || params.angle_deg <= 0.0 {
        return Err(CliError::Usage("clearance must be at least one pitch and angle positive".into()));
    }
    let _ = writeln!(out, "seed: {}", spec.seed);
    echo_config(out, &spec);
    let ds = synthetic_dataset(&spec, params).map_err(failure)?;
    let path = args.out.unwrap_or_else(|| out_dir(None).join("dataset.json"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| failure(format!("{}: {e}", dir.display())))?;
    }
    save_dataset(&ds, &path).map_err(failure)?;
    let _ = writeln!(
        out,
        "parts: {} ({} active), sha256 {}",
        ds.catalog().len(),
        ds.active_len(),
        dataset_digest(&ds)
    );
    wrote(out, &[path]);
    Ok(())
}

#[derive(Serialize)]
struct PlanFile<'a> {
    version: &'a str,
    seed: u64,
    dataset_digest: &'a str,
    config: &'a GaConfig,
    result: &'a nsga3::PlanResult,
}

fn plan(args: PlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    header(out, "plan");
    let config = ga_config(&args.ga)?;
    let (ds, digest) = open_dataset(&args.dataset, out)?;
    let _ = writeln!(out, "seed: {}", config.seed);
    echo_config(out, &config);
    let result = nsga3::run(&ds, &config).map_err(failure)?;

    let _ = writeln!(out, "best sequence in removal order (first line is removed first; stored order is the reverse):");
    let removal: Vec<_> = result.best.removal_order().collect();
    for (step, id) in removal.iter().enumerate() {
        let part = ds.catalog().get(*id).expect("sequence parts exist");
        let task = part.task.map_or("-", |t| t.as_str());
        let _ = writeln!(out, "  {:>3}. {id} {} [{task}]", step + 1, part.name);
    }
    let e = &result.evaluation;
    let o = e.objectives;
    let _ = writeln!(
        out,
        "available: {} (feasible {}, stable {}, violations {})",
        e.available, e.feasible, e.stable, e.violations
    );
    let _ = writeln!(
        out,
        "objectives: f_d={:.6} f_e={:.6} f_p={:.6} f_a={:.6} sum={:.6}",
        o.difficulty,
        o.efficiency,
        o.prioritization,
        o.allocability,
        nsga3::masked_sum(e, config.objectives)
    );
    for b in &result.iteration_bests {
        let _ = writeln!(
            out,
            "  iteration {}: available={} sum={:.6}",
            b.iteration,
            b.evaluation.available,
            nsga3::masked_sum(&b.evaluation, config.objectives)
        );
    }

    let dir = out_dir(args.out);
    let plan_path = dir.join("plan.json");
    let file = PlanFile {
        version: VERSION,
        seed: config.seed,
        dataset_digest: &digest,
        config: &config,
        result: &result,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("plan serializes");
    text.push('\n');
    write_text(&plan_path, &text)?;
    let history_path = dir.join("history.csv");
    write_text(&history_path, &history_csv(&result.history))?;
    wrote(out, &[plan_path, history_path]);
    Ok(())
}

fn print_report<R: Report>(report: &R, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let _ = write!(out, "{}", report.to_csv());
    let paths = emit_report(report, dir).map_err(failure)?;
    wrote(out, &paths);
    Ok(())
}

fn init_bench(args: InitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    header(out, "init-bench");
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let (ds, _) = open_dataset(&args.dataset, out)?;
    let seed = resolve_seed(args.seed);
    let _ = writeln!(out, "seed: {seed}");
    let _ = writeln!(
        out,
        "config: trials={} methods={} mode={} max_passes={}",
        args.trials,
        args.methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(","),
        args.mode,
        args.max_passes
    );
    let report = bench::init_benchmark(&ds, args.trials, &args.methods, seed, args.mode, args.max_passes)
        .map_err(failure)?;
    print_report(&report, &out_dir(args.out), out)
}

fn ablate(args: PlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    header(out, "ablate");
    let config = ga_config(&args.ga)?;
    let (ds, _) = open_dataset(&args.dataset, out)?;
    let _ = writeln!(out, "seed: {}", config.seed);
    echo_config(out, &config);
    let report = bench::ablation_run(&ds, &config).map_err(failure)?;
    print_report(&report, &out_dir(args.out), out)
}

fn single_obj(args: SingleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    header(out, "single-obj");
    let config = ga_config(&args.plan.ga)?;
    let (ds, _) = open_dataset(&args.plan.dataset, out)?;
    let _ = writeln!(out, "seed: {}", config.seed);
    echo_config(out, &config);
    let objectives: Vec<usize> = (0..4).filter(|&d| args.objective.0[d]).collect();
    let _ = writeln!(
        out,
        "objectives: {}",
        objectives.iter().map(|&d| OBJECTIVE_NAMES[d]).collect::<Vec<_>>().join(",")
    );
    let report = bench::single_objective_run(&ds, &config, &objectives).map_err(failure)?;
    print_report(&report, &out_dir(args.plan.out), out)
}

fn validate(args: ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    header(out, "validate");
    let (ds, _) = open_dataset(&args.dataset, out)?;
    let ignored = ds.catalog().len() - ds.active_len();
    let _ = writeln!(out, "ok: {} parts, {} active, {ignored} ignored", ds.catalog().len(), ds.active_len());
    match crate::ccg::build_ccg(&ds) {
        Ok(g) => {
            let _ = writeln!(out, "contact graph connected, root {}", g.root_id());
        }
        Err(e) => {
            let _ = writeln!(out, "warning: {e}");
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// writing human-readable output to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
        }
    };
    let outcome = match cli.command {
        Command::GenSynthetic(a) => gen_synthetic(a, out),
        Command::Plan(a) => plan(a, out),
        Command::InitBench(a) => init_bench(a, out),
        Command::Ablate(a) => ablate(a, out),
        Command::SingleObj(a) => single_obj(a, out),
        Command::Validate(a) => validate(a, out),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            1
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            2
        }
    }
}

/// Log level implied by the `-v` count.
pub fn log_level(verbose: u8) -> log::LevelFilter {
    match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    }
}
