//! Command-line front end: single runs, benchmark suites, report
//! re-rendering, and the id registry.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use psolab_core::algorithm::{AlgorithmKind, Overrides};
use psolab_core::bench::report::{
    parse_report_csv, read_records, records_to_string, render_report, ReportFormat,
};
use psolab_core::bench::{report_from_records, run_single, run_suite, RunConfig, SuiteConfig};
use psolab_core::kernel::Kernel;
use psolab_core::objectives::ObjectiveId;

use config::ConfigFile;

#[derive(Parser)]
#[command(
    name = "psolab",
    version,
    about = "Particle swarm optimization runs, benchmark suites, and reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one seeded optimization run
    Run(RunArgs),
    /// Execute a (algorithms x functions x runs) benchmark suite
    Suite(SuiteArgs),
    /// Re-render a report from a results file
    Report(ReportArgs),
    /// Print the available algorithm, objective, and kernel ids
    List,
}

/// Algorithm parameter flags shared by `run` and `suite`. Defaults follow
/// the benchmark protocol and are applied per algorithm; a config file
/// overrides them and command-line flags override the config file.
#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Gradient-ascent learning constant [default: 0.8]
    #[arg(long)]
    gamma: Option<f64>,
    /// Component density width [default: 0.4 dependence, 0.1 independence]
    #[arg(long)]
    beta: Option<f64>,
    /// Temporal discount of the discounted variants [default: 0.5]
    #[arg(long)]
    tau: Option<f64>,
    /// Prior over optimum locations: uniform or gaussian_unit [default: uniform]
    #[arg(long)]
    prior: Option<String>,
    /// Bare bones covariance: per_dimension or scalar [default: by algorithm id]
    #[arg(long)]
    cov_mode: Option<String>,
    /// Bare bones covariance multiplier [default: 0.2]
    #[arg(long)]
    bb_scale: Option<f64>,
    /// Kernel id for kernel-dep/kernel-indep [default: sinc]
    #[arg(long)]
    kernel: Option<String>,
    /// Kernel width parameter mu [default: 1.0]
    #[arg(long)]
    kernel_mu: Option<f64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Algorithm id (see `psolab list`)
    #[arg(long)]
    algo: Option<String>,
    /// Objective function id [default: sphere]
    #[arg(long = "fn")]
    function: Option<String>,
    /// Problem dimension [default: 10]
    #[arg(long)]
    dim: Option<usize>,
    /// Swarm size [default: 100]
    #[arg(long)]
    particles: Option<usize>,
    /// Random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration budget, initialization round included [default: 100000]
    #[arg(long)]
    max_iters: Option<u64>,
    /// Swarm-collapse threshold [default: 0.001]
    #[arg(long)]
    stop_threshold: Option<f64>,
    /// Plain-text key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the run result as JSON to this path
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Comma-separated algorithm ids
    #[arg(long)]
    algos: Option<String>,
    /// Comma-separated objective ids
    #[arg(long = "fns")]
    functions: Option<String>,
    /// Runs per (algorithm, function) cell [default: 100]
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; per-run seeds derive from it [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Problem dimension [default: 10]
    #[arg(long)]
    dim: Option<usize>,
    /// Swarm size [default: 100]
    #[arg(long)]
    particles: Option<usize>,
    /// Iteration budget per run [default: 100000]
    #[arg(long)]
    max_iters: Option<u64>,
    /// Swarm-collapse threshold [default: 0.001]
    #[arg(long)]
    stop_threshold: Option<f64>,
    /// Worker threads [default: PSOLAB_WORKERS or 1]
    #[arg(long)]
    workers: Option<usize>,
    /// Report format: csv, json or markdown [default: markdown]
    #[arg(long)]
    format: Option<String>,
    /// Output directory for results.csv, the report, and the config copy
    /// [default: psolab-out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Results file written by `psolab suite`
    results: PathBuf,
    /// Report format: csv, json or markdown [default: markdown]
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    use psolab_core::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::UnknownAlgorithm(_)
            | E::UnknownObjective(_)
            | E::UnknownKernel(_)
            | E::InvalidParameter(_)
            | E::InvalidConfig(_)
            | E::InvalidBounds(_)
            | E::DimensionMismatch { .. },
        ) => 2,
        Some(_) => 1,
        // cli-level resolution problems are usage errors
        None if err.downcast_ref::<std::io::Error>().is_none() => 2,
        None => 1,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Suite(args) => cmd_suite(args),
        Command::Report(args) => cmd_report(args),
        Command::List => cmd_list(),
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

/// defaults < config file < flags, per field.
fn build_overrides(cfg: &ConfigFile, params: &ParamArgs) -> Result<Overrides> {
    Ok(Overrides {
        gamma: params.gamma.or(cfg.parse_value("gamma")?),
        beta: params.beta.or(cfg.parse_value("beta")?),
        tau: params.tau.or(cfg.parse_value("tau")?),
        prior: match params.prior.as_deref().or(cfg.get("prior")) {
            Some(s) => Some(s.parse().map_err(anyhow::Error::from)?),
            None => None,
        },
        cov_mode: match params.cov_mode.as_deref().or(cfg.get("cov-mode")) {
            Some(s) => Some(s.parse().map_err(anyhow::Error::from)?),
            None => None,
        },
        bb_scale: params.bb_scale.or(cfg.parse_value("bb-scale")?),
        kernel: params
            .kernel
            .clone()
            .or_else(|| cfg.get("kernel").map(str::to_owned)),
        kernel_mu: params.kernel_mu.or(cfg.parse_value("kernel-mu")?),
        w: cfg.parse_value("w")?,
        phi: cfg.parse_value("phi")?,
        eta: cfg.parse_value("eta")?,
        chi_as_inertia: cfg.parse_value("chi-as-inertia")?,
        beta_g: cfg.parse_value("beta-g")?,
        beta_b: cfg.parse_value("beta-b")?,
        window: cfg.parse_value("window")?,
        epsilon: cfg.parse_value("epsilon")?,
        transform: match cfg.get("transform") {
            Some(s) => Some(s.parse().map_err(anyhow::Error::from)?),
            None => None,
        },
    })
}

fn parse_algorithm(s: &str) -> Result<AlgorithmKind> {
    AlgorithmKind::from_str(s).map_err(anyhow::Error::from)
}

fn parse_objective(s: &str) -> Result<ObjectiveId> {
    ObjectiveId::from_str(s).map_err(anyhow::Error::from)
}

fn parse_format(flag: Option<&str>, cfg: &ConfigFile) -> Result<ReportFormat> {
    match flag.or(cfg.get("format")) {
        Some(s) => ReportFormat::from_str(s).map_err(anyhow::Error::from),
        None => Ok(ReportFormat::Markdown),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let algo = args
        .algo
        .as_deref()
        .or(cfg.get("algo"))
        .ok_or_else(|| anyhow!("--algo is required (or `algo` in the config file)"))?;
    let function = args.function.as_deref().or(cfg.get("fn")).unwrap_or("sphere");

    let mut run = RunConfig::new(parse_algorithm(algo)?, parse_objective(function)?, 0);
    run.seed = args.seed.or(cfg.parse_value("seed")?).unwrap_or(0);
    run.dim = args.dim.or(cfg.parse_value("dim")?).unwrap_or(10);
    run.particles = args.particles.or(cfg.parse_value("particles")?).unwrap_or(100);
    run.max_iterations = args
        .max_iters
        .or(cfg.parse_value("max-iters")?)
        .unwrap_or(100_000);
    run.stop_threshold = args
        .stop_threshold
        .or(cfg.parse_value("stop-threshold")?)
        .unwrap_or(0.001);
    run.noise_sigma = cfg.parse_value("noise-sigma")?.unwrap_or(0.0);
    run.record_trace = cfg.parse_value("record-trace")?.unwrap_or(false) || args.out.is_some();
    run.overrides = build_overrides(&cfg, &args.params)?;

    let result = run_single(&run)?;
    println!("algorithm:   {}", run.algorithm);
    println!("objective:   {} (dim {})", run.objective, run.dim);
    println!("seed:        {}", run.seed);
    println!("best value:  {}", result.best_value);
    println!("iterations:  {}", result.iterations_used);
    println!("stop reason: {}", result.stop_reason);
    println!("wall time:   {:.3} s", result.wall_time);
    println!(
        "best position: [{}]",
        result
            .best_position
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    );
    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&result)?;
        std::fs::write(out, json + "\n")
            .with_context(|| format!("writing {}", out.display()))?;
        println!("saved: {}", out.display());
    }
    Ok(())
}

fn split_ids(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn cmd_suite(args: SuiteArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let algos = args
        .algos
        .as_deref()
        .or(cfg.get("algos"))
        .ok_or_else(|| anyhow!("--algos is required (or `algos` in the config file)"))?;
    let fns = args
        .functions
        .as_deref()
        .or(cfg.get("fns"))
        .ok_or_else(|| anyhow!("--fns is required (or `fns` in the config file)"))?;
    let algorithms = split_ids(algos)
        .into_iter()
        .map(parse_algorithm)
        .collect::<Result<Vec<_>>>()?;
    let objectives = split_ids(fns)
        .into_iter()
        .map(parse_objective)
        .collect::<Result<Vec<_>>>()?;

    let mut suite = SuiteConfig::new(algorithms, objectives);
    suite.runs_per_cell = args.runs.or(cfg.parse_value("runs")?).unwrap_or(100);
    suite.base_seed = args.seed.or(cfg.parse_value("seed")?).unwrap_or(0);
    suite.dim = args.dim.or(cfg.parse_value("dim")?).unwrap_or(10);
    suite.particles = args.particles.or(cfg.parse_value("particles")?).unwrap_or(100);
    suite.max_iterations = args
        .max_iters
        .or(cfg.parse_value("max-iters")?)
        .unwrap_or(100_000);
    suite.stop_threshold = args
        .stop_threshold
        .or(cfg.parse_value("stop-threshold")?)
        .unwrap_or(0.001);
    suite.noise_sigma = cfg.parse_value("noise-sigma")?.unwrap_or(0.0);
    suite.workers = args
        .workers
        .or(cfg.parse_value("workers")?)
        .or_else(|| {
            std::env::var("PSOLAB_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    suite.overrides = build_overrides(&cfg, &args.params)?;
    let format = parse_format(args.format.as_deref(), &cfg)?;

    let (records, report) = run_suite(&suite)?;

    let out_dir = args.out.unwrap_or_else(|| PathBuf::from("psolab-out"));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let results_path = out_dir.join("results.csv");
    std::fs::write(&results_path, records_to_string(&records))?;
    let report_name = match format {
        ReportFormat::Csv => "report.csv",
        ReportFormat::Json => "report.json",
        ReportFormat::Markdown => "report.md",
    };
    let rendered = render_report(&report, format);
    std::fs::write(out_dir.join(report_name), &rendered)?;
    if args.config.is_some() {
        std::fs::write(out_dir.join("config.txt"), &cfg.raw)?;
    }
    print!("{rendered}");
    eprintln!(
        "wrote {} runs to {} and {}",
        records.len(),
        results_path.display(),
        out_dir.join(report_name).display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let records = read_records(&args.results)?;
    let report = report_from_records(&records)?;
    let format = parse_format(args.format.as_deref(), &ConfigFile::default())?;
    let rendered = render_report(&report, format);
    if format == ReportFormat::Csv {
        debug_assert_eq!(parse_report_csv(&rendered).expect("own csv parses"), report);
    }
    match &args.out {
        Some(path) => std::fs::write(path, &rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn cmd_list() -> Result<()> {
    println!("algorithms:");
    for kind in AlgorithmKind::ALL {
        println!("  {}", kind.id());
    }
    println!("objectives:");
    for id in ObjectiveId::ALL {
        println!("  {}", id.as_str());
    }
    println!("kernels:");
    for id in Kernel::IDS {
        println!("  {id}");
    }
    Ok(())
}
