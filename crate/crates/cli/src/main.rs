mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::FileConfig;
use crate::error::{CliError, CliResult, Status};

const THREADS_ENV: &str = "COMPACT_CONSERVE_THREADS";

/// Globally conservative fourth-order compact schemes: verification,
/// analysis, optimization and PDE experiments.
#[derive(Debug, Parser)]
#[command(name = "compact-conserve", version)]
struct Cli {
    /// TOML file with defaults for any subcommand; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check order conditions, conservation identities and quadrature precision.
    Verify {
        /// Bundled id (P1, P2, P3) or path to a scheme JSON file.
        scheme: String,
    },
    /// Write resolution and stability data.
    Analyze(AnalyzeArgs),
    /// Search the free boundary parameters with differential evolution.
    Optimize(OptimizeArgs),
    /// Run a PDE experiment.
    Solve(SolveArgs),
    /// Print or write a bundled scheme file.
    Export {
        scheme: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    scheme: String,
    /// Interval counts for the stability spectra.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Bisect each resolution crossing instead of reporting the grid point.
    #[arg(long)]
    refine: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Bundled id whose boundary closure is optimized.
    scheme: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    /// Accept `--generations 0`, returning the best initial member.
    #[arg(long)]
    allow_initial: bool,
    /// Output scheme file; defaults to `optimized_<id>.json` in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Advect1d,
    Advect2d,
    EulerVortex,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    scheme: String,
    /// Grid points per axis; several values produce order.csv.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Final time for the advection experiments.
    #[arg(long)]
    t_final: Option<f64>,
    /// Vortex strength.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    mach: Option<f64>,
    /// Vortex run length in units of L / u_inf.
    #[arg(long)]
    travel: Option<f64>,
    /// Snapshot times (travel units for the vortex); final time when omitted.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// Use the long horizons (t = 1000, travel 200) instead of the short defaults.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::input(anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(CliError::numeric)
}

fn run(cli: Cli) -> CliResult<Status> {
    configure_threads()?;
    let file = FileConfig::load(cli.config.as_deref())?;
    let out_dir = |flag: Option<PathBuf>| flag.or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Verify { scheme } => commands::verify::run(&scheme),
        Command::Analyze(a) => commands::analyze::run(commands::analyze::Options {
            scheme: a.scheme,
            n: a.n.or(file.analyze.n).unwrap_or_else(|| vec![50, 100, 200]),
            refine: a.refine || file.analyze.refine.unwrap_or(false),
            out: out_dir(a.out),
        }),
        Command::Optimize(a) => commands::optimize::run(commands::optimize::Options {
            scheme: a.scheme,
            seed: a.seed.or(file.optimize.seed).unwrap_or(0),
            generations: a.generations.or(file.optimize.generations),
            population: a.population.or(file.optimize.population),
            allow_initial: a.allow_initial || file.optimize.allow_initial.unwrap_or(false),
            out_file: a.out,
            out_dir: out_dir(None),
        }),
        Command::Solve(a) => {
            let d = file.solve;
            commands::solve::run(commands::solve::Options {
                experiment: a.experiment,
                scheme: a.scheme,
                n: a.n.or(d.n),
                t_final: a.t_final.or(d.t_final),
                epsilon: a.epsilon.or(d.epsilon),
                mach: a.mach.or(d.mach),
                travel: a.travel.or(d.travel),
                snapshots: a.snapshots.or(d.snapshots),
                full: a.full,
                out: out_dir(a.out),
            })
        }
        Command::Export { scheme, out } => commands::export::run(&scheme, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Input as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status as u8)
        }
    }
}
