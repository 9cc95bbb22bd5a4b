//! `qed`: command-line surface for the QED asset-price toolkit.
//!
//! Subcommands cover the pipeline end to end: `potential` and `instanton`
//! tabulate the log-space landscape, `simulate` and `escape` run the SDE,
//! `rates` triangulates the escape rate and implied CDS spread, `density`
//! evaluates the stationary law, and `calibrate`/`compare` fit market data.
//! Series leave as CSV, scalar reports as JSON, to `--out` or stdout.
//!
//! Flags override the JSON config file (`--config`, or the `QED_CONFIG`
//! environment variable); the file overrides built-in defaults. Every
//! subcommand is deterministic given its inputs, flags, and seed. Exit
//! codes: 0 success, 1 data or numerics error, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qed_core::dynamics::Space;
use qed_core::fpe::PartitionMethod;
use qed_core::instanton::InstantonKind;
use thiserror::Error;

mod commands;
mod config;
mod output;

/// Errors past argument parsing. `Usage` exits 2 like clap's own errors;
/// everything else is a data or numerics failure and exits 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] qed_core::ModelError),
    #[error(transparent)]
    Data(#[from] qed_dataio::DataError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Write(#[from] std::io::Error),
    #[error("config file {path}: {msg}")]
    Config { path: String, msg: String },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qed",
    version,
    about = "Quantum equilibrium-disequilibrium asset-price toolkit",
    after_help = "Precedence: flags > config file (--config or QED_CONFIG) > built-in defaults."
)]
pub struct Cli {
    /// JSON config file supplying default flag values.
    #[arg(long, env = "QED_CONFIG", global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output path; stdout when omitted (calibrate defaults to calibration.csv).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Model parameters shared by the analytic subcommands.
#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// Linear growth rate theta (1/year).
    #[arg(long, value_name = "RATE", allow_negative_numbers = true)]
    pub theta: Option<f64>,

    /// Volatility sigma (1/sqrt(year)), > 0.
    #[arg(long, value_name = "VOL")]
    pub sigma: Option<f64>,

    /// Reversion coefficient kappa (1/year); negative opens a metastable barrier.
    #[arg(long, value_name = "RATE", allow_negative_numbers = true)]
    pub kappa: Option<f64>,

    /// Saturation coefficient g (1/year), >= 0.
    #[arg(long, value_name = "RATE")]
    pub g: Option<f64>,

    /// Calculus convention nu (dimensionless): 1 = Stratonovich, 2 = Ito.
    #[arg(long, value_name = "1|2")]
    pub nu: Option<u8>,
}

/// Evaluation grid. Which coordinate the edges live in is stated per
/// subcommand; defaults derive from the barrier geometry where one exists.
#[derive(Args, Debug, Default)]
pub struct GridArgs {
    /// Number of grid points (dimensionless count).
    #[arg(long, value_name = "N")]
    pub grid_n: Option<usize>,

    /// Lower grid edge (same coordinate as the output's first column).
    #[arg(long, value_name = "COORD", allow_negative_numbers = true)]
    pub grid_lo: Option<f64>,

    /// Upper grid edge (same coordinate as the output's first column).
    #[arg(long, value_name = "COORD", allow_negative_numbers = true)]
    pub grid_hi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    /// Price coordinate x.
    X,
    /// Log-price coordinate y = ln x.
    Y,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::X => Space::X,
            SpaceArg::Y => Space::Y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Well to barrier top.
    Instanton,
    /// Barrier top to well (time reversal).
    AntiInstanton,
    /// Well to barrier top and back.
    Bounce,
}

impl From<KindArg> for InstantonKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Instanton => InstantonKind::Instanton,
            KindArg::AntiInstanton => InstantonKind::AntiInstanton,
            KindArg::Bounce => InstantonKind::Bounce,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Adaptive quadrature of the Gibbs weight (works for every regime).
    Quadrature,
    /// Closed form via the parabolic cylinder function (needs g > 0).
    KummerAnalytic,
}

impl From<MethodArg> for PartitionMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Quadrature => PartitionMethod::Quadrature,
            MethodArg::KummerAnalytic => PartitionMethod::KummerAnalytic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate V, V', V'' and the partner potentials on a log-price grid
    /// (CSV: y,v,v_d1,v_d2,u_minus,u_plus).
    Potential {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },

    /// Simulate SDE paths under multiplicative noise (CSV: t,path_0,...).
    Simulate {
        #[command(flatten)]
        model: ModelArgs,

        /// Force kappa = g = 0: geometric Brownian motion.
        #[arg(long, conflicts_with_all = ["kappa", "g"])]
        gbm: bool,

        /// Initial value in the simulation coordinate (price x0 or log-price y0).
        #[arg(long, value_name = "COORD", allow_negative_numbers = true)]
        x0: Option<f64>,

        /// Simulation coordinate: x steps the price SDE, y its log.
        #[arg(long, value_enum, default_value_t = SpaceArg::X)]
        space: SpaceArg,

        /// Number of paths (count).
        #[arg(long, value_name = "N")]
        paths: Option<usize>,

        /// Euler step (years).
        #[arg(long, value_name = "YEARS")]
        dt: Option<f64>,

        /// Horizon (years).
        #[arg(long, value_name = "YEARS")]
        t_end: Option<f64>,

        /// RNG seed (dimensionless); identical seeds reproduce identical bytes.
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
    },

    /// Monte Carlo escape rate from the metastable well (JSON).
    Escape {
        #[command(flatten)]
        model: ModelArgs,

        /// Euler step (years).
        #[arg(long, value_name = "YEARS")]
        dt: Option<f64>,

        /// Number of paths (count).
        #[arg(long, value_name = "N")]
        paths: Option<usize>,

        /// RNG seed (dimensionless).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,

        /// Census horizon (years); default is several mean escape times.
        #[arg(long, value_name = "YEARS")]
        t_end: Option<f64>,
    },

    /// Escape rates by the Kramers, SUSY-quadrature, and spectral routes,
    /// with the implied CDS spread (JSON; a rates.csv row when --out ends
    /// in .csv).
    Rates {
        #[command(flatten)]
        model: ModelArgs,

        /// Recovery fraction R in [0,1); spread = rate x (1-R) x 1e4 bps.
        #[arg(long, value_name = "FRAC")]
        recovery: Option<f64>,

        /// Spectral grid in log-price y (edges and point count).
        #[command(flatten)]
        grid: GridArgs,

        /// Also run a Monte Carlo check with this many paths (count); slow
        /// for deep barriers, whose mean escape times are long.
        #[arg(long, value_name = "N")]
        paths: Option<usize>,

        /// Euler step of the Monte Carlo check (years).
        #[arg(long, value_name = "YEARS")]
        dt: Option<f64>,

        /// RNG seed of the Monte Carlo check (dimensionless).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
    },

    /// Zero-energy trajectory between the well and the barrier top
    /// (CSV: t,y,x; JSON action summary to stdout when --out is set).
    Instanton {
        #[command(flatten)]
        model: ModelArgs,

        /// Trajectory shape.
        #[arg(long, value_enum, default_value_t = KindArg::Instanton)]
        kind: KindArg,

        /// Half-span T of the time grid [-T, T] (years).
        #[arg(long, value_name = "YEARS")]
        t_end: Option<f64>,

        /// Number of samples (odd count, mirrored about t = 0).
        #[arg(long, value_name = "N")]
        grid_n: Option<usize>,
    },

    /// Stationary density with the partition function (CSV: x|y,density;
    /// JSON summary to stdout when --out is set).
    Density {
        #[command(flatten)]
        model: ModelArgs,

        /// Density coordinate: price x or log-price y.
        #[arg(long, value_enum, default_value_t = SpaceArg::X)]
        space: SpaceArg,

        /// Evaluation grid in the chosen coordinate.
        #[command(flatten)]
        grid: GridArgs,

        /// Partition-function evaluation route.
        #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
        method: MethodArg,
    },

    /// Fit (theta, sigma, kappa, g) per symbol and year by maximum
    /// likelihood, optionally CDS-constrained; writes calibration.csv.
    Calibrate {
        /// Price CSV with header symbol,date,price (price in any fixed currency).
        #[arg(long, value_name = "PATH")]
        prices: PathBuf,

        /// CDS CSV with header symbol,date,spread_bps; enables the spread target.
        #[arg(long, value_name = "PATH")]
        cds: Option<PathBuf>,

        /// Restrict to these symbols (repeatable); default: all in --prices.
        #[arg(long, value_name = "SYM")]
        symbol: Vec<String>,

        /// CDS-constraint weight lambda1 (1/bps^2); 0 = pure likelihood.
        #[arg(long, value_name = "WEIGHT")]
        lambda1: Option<f64>,

        /// Barrier-region repulsion weight lambda2 (dimensionless), >= 0.
        #[arg(long, value_name = "WEIGHT")]
        lambda2: Option<f64>,

        /// Observation step (years); default 1/252, one trading day.
        #[arg(long, value_name = "YEARS")]
        dt: Option<f64>,

        /// Recovery fraction R in [0,1).
        #[arg(long, value_name = "FRAC")]
        recovery: Option<f64>,

        /// Calculus convention nu (dimensionless): 1 = Stratonovich, 2 = Ito.
        #[arg(long, value_name = "1|2")]
        nu: Option<u8>,

        /// Optimizer restart seed (dimensionless).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,

        /// Worker threads for the batch (count); default: available parallelism.
        #[arg(long, value_name = "N")]
        workers: Option<usize>,
    },

    /// Per-year GBM vs QED likelihood comparison for one symbol
    /// (CSV: year,nll_gbm,nll_qed,nll_qed_constrained,...).
    Compare {
        /// Price CSV with header symbol,date,price (price in any fixed currency).
        #[arg(long, value_name = "PATH")]
        prices: PathBuf,

        /// CDS CSV with header symbol,date,spread_bps; enables the constrained column.
        #[arg(long, value_name = "PATH")]
        cds: Option<PathBuf>,

        /// Symbol whose years are compared.
        #[arg(long, value_name = "SYM")]
        symbol: String,

        /// CDS-constraint weight lambda1 (1/bps^2); 0 disables the constrained fit.
        #[arg(long, value_name = "WEIGHT")]
        lambda1: Option<f64>,

        /// Barrier-region repulsion weight lambda2 (dimensionless), >= 0.
        #[arg(long, value_name = "WEIGHT")]
        lambda2: Option<f64>,

        /// Observation step (years); default 1/252, one trading day.
        #[arg(long, value_name = "YEARS")]
        dt: Option<f64>,

        /// Recovery fraction R in [0,1).
        #[arg(long, value_name = "FRAC")]
        recovery: Option<f64>,

        /// Calculus convention nu (dimensionless): 1 = Stratonovich, 2 = Ito.
        #[arg(long, value_name = "1|2")]
        nu: Option<u8>,

        /// Optimizer restart seed (dimensionless).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,

        /// Worker threads (count); default: available parallelism.
        #[arg(long, value_name = "N")]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::FileConfig::load(cli.config.as_deref())?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Potential { model, grid } => commands::potential(&model, &grid, &file, out),
        Command::Simulate {
            model,
            gbm,
            x0,
            space,
            paths,
            dt,
            t_end,
            seed,
        } => commands::simulate(
            &model,
            gbm,
            x0,
            space.into(),
            paths,
            dt,
            t_end,
            seed,
            &file,
            out,
        ),
        Command::Escape {
            model,
            dt,
            paths,
            seed,
            t_end,
        } => commands::escape(&model, dt, paths, seed, t_end, &file, out),
        Command::Rates {
            model,
            recovery,
            grid,
            paths,
            dt,
            seed,
        } => commands::rates(&model, recovery, &grid, paths, dt, seed, &file, out),
        Command::Instanton {
            model,
            kind,
            t_end,
            grid_n,
        } => commands::instanton(&model, kind.into(), t_end, grid_n, &file, out),
        Command::Density {
            model,
            space,
            grid,
            method,
        } => commands::density(&model, space.into(), &grid, method.into(), &file, out),
        Command::Calibrate {
            prices,
            cds,
            symbol,
            lambda1,
            lambda2,
            dt,
            recovery,
            nu,
            seed,
            workers,
        } => commands::calibrate(
            &prices,
            cds.as_deref(),
            &symbol,
            commands::FitFlags {
                lambda1,
                lambda2,
                dt,
                recovery,
                nu,
                seed,
                workers,
            },
            &file,
            out,
        ),
        Command::Compare {
            prices,
            cds,
            symbol,
            lambda1,
            lambda2,
            dt,
            recovery,
            nu,
            seed,
            workers,
        } => commands::compare(
            &prices,
            cds.as_deref(),
            &symbol,
            commands::FitFlags {
                lambda1,
                lambda2,
                dt,
                recovery,
                nu,
                seed,
                workers,
            },
            &file,
            out,
        ),
    }
}
