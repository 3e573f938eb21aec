#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or physically invalid input.
    Input(String),
    /// A check failed; the report has already been written.
    Verification(String),
    /// Structural or oracle failure, I/O trouble.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<ince_volkov::Error> for CliError {
    fn from(e: ince_volkov::Error) -> Self {
        use ince_volkov::Error as E;
        match e {
            E::Domain(_)
            | E::Overdense { .. }
            | E::DimensionMismatch { .. }
            | E::Precondition(_) => CliError::Input(e.to_string()),
            E::Structural(_) | E::Oracle(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ince-volkov",
    version,
    about = "Polynomial solutions for a charged particle in a plasma wave"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct Shared {
    /// TOML configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// dirac | dirac-minus | kg | kg-cos-odd | kg-sin-odd | kg-sin-even
    #[arg(long, global = true)]
    family: Option<String>,
    /// Quantum number n >= 1
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Coupling a; bypasses the laser/plasma inputs
    #[arg(long, global = true)]
    a: Option<f64>,
    /// json | csv
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file (stdout if absent)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for the pseudo-random sample points
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Photon energy in eV
    #[arg(long, global = true)]
    photon_ev: Option<f64>,
    /// Laser intensity in W/cm^2
    #[arg(long, global = true)]
    intensity: Option<f64>,
    /// Plasma energy hbar*omega_p in eV
    #[arg(long, global = true)]
    plasma_ev: Option<f64>,
    /// Mode labels to export, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Run the full verification grid
    #[arg(long, global = true)]
    all: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived plasma and wave parameters
    Params,
    /// Eigenvalues, coefficient vectors and residuals of one family
    Spectrum,
    /// Modulation functions and harmonic strengths of selected modes
    Modes,
    /// Plot-ready data for figure 1, 2 or 3
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
    },
    /// Residual and oracle checks
    Verify {
        /// Shift added to every eigenvalue before checking
        #[arg(long, hide = true, default_value_t = 0.0)]
        corrupt_eta: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let s = cli.shared;
    let file = match &s.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        family: s.family,
        n: s.n,
        a: s.a,
        format: s.format,
        out: s.out,
        seed: s.seed,
        photon_ev: s.photon_ev,
        intensity: s.intensity,
        plasma_ev: s.plasma_ev,
        k_select: s.k,
    };
    let cfg = RunConfig::resolve(file, flags)?;
    match cli.command {
        Command::Params => commands::params(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Modes => commands::modes(&cfg),
        Command::Figure { which } => commands::figure(&cfg, which),
        Command::Verify { corrupt_eta } => commands::verify(&cfg, s.all, corrupt_eta),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ince-volkov: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
