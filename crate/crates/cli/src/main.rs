//! `circprop` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 numeric-domain error,
//! 4 I/O error. Output is assembled in memory and written only on success,
//! so a failed run never leaves a partial file behind.

mod commands;
mod table;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use table::{Provenance, Table};

#[derive(Debug, Parser, Serialize)]
#[command(name = "circprop", version, about = "Free propagation on a discretized circle")]
pub struct Cli {
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for parallel sections (all cores when omitted).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    /// Seed for the random potential.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Progress and summary lines on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Free lattice propagator from site 0 at a rational time p/q.
    Propagator(PropagatorArgs),
    /// Split-step evolution of a Gaussian packet.
    Evolve(EvolveArgs),
    /// |phase| and probability over (t, xi).
    PhaseMap(PhaseMapArgs),
    /// Position of the probability maximum over time.
    Trajectory(EvolveArgs),
    /// Normalized quadratic Gauss sums.
    GaussSum(GaussSumArgs),
    /// Truncated Jacobi theta function.
    Theta(ThetaArgs),
    /// Free-qubit propagator profiles.
    Qubit(QubitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorMode {
    Direct,
    Exact,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct PropagatorArgs {
    #[arg(long)]
    pub n_sites: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long)]
    pub q: i64,
    #[arg(long, value_enum, default_value_t = PropagatorMode::Both)]
    pub mode: PropagatorMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialChoice {
    None,
    Cosine,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    /// Grid of 2^n sites.
    #[arg(long, default_value_t = 7)]
    pub n_qubits: u32,
    #[arg(long, value_enum, default_value_t = PotentialChoice::None)]
    pub potential: PotentialChoice,
    /// Maximum potential times the time step.
    #[arg(long, default_value_t = 0.75)]
    pub eta: f64,
    /// Packet centre as a fraction of the circumference, in [-1/2, 1/2).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    /// Central momentum index.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m0: i64,
    /// Packet width times circumference.
    #[arg(long, default_value_t = 10.0)]
    pub sigma_l: f64,
    /// Number of steps of size 1/N.
    #[arg(long, default_value_t = 32)]
    pub steps: u64,
    /// Keep every stride-th snapshot (plus the last).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSource {
    /// Evolved packet amplitudes.
    Packet,
    /// Free propagator from site 0 at times k/N.
    Propagator,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseMapArgs {
    #[arg(long, value_enum, default_value_t = PhaseSource::Packet)]
    pub source: PhaseSource,
    #[command(flatten)]
    pub evolve: EvolveArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GaussSumArgs {
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long)]
    pub q: i64,
    /// Sweep q up to this value (denominators sharing a factor with p are skipped).
    #[arg(long)]
    pub q_max: Option<i64>,
    /// Displacement as a fraction, e.g. 1/4.
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub delta_xi: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau_re: f64,
    /// Must be negative.
    #[arg(long, allow_negative_numbers = true)]
    pub tau_im: f64,
    #[arg(long, default_value_t = 1e-16)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QubitMode {
    Direct,
    Closed,
    SmallTime,
    Lightcone,
}

#[derive(Debug, Args, Serialize)]
pub struct QubitArgs {
    #[arg(long, value_enum, default_value_t = QubitMode::Closed)]
    pub mode: QubitMode,
    /// Sites for the direct sum.
    #[arg(long, default_value_t = 120)]
    pub n_sites: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(i64).range(0..))]
    pub dj_max: i64,
}

pub enum CliError {
    Usage(String),
    Domain(circprop::Error),
    Io(io::Error),
}

impl From<circprop::Error> for CliError {
    fn from(e: circprop::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Propagator(_) => "propagator",
        Command::Evolve(_) => "evolve",
        Command::PhaseMap(_) => "phase-map",
        Command::Trajectory(_) => "trajectory",
        Command::GaussSum(_) => "gauss-sum",
        Command::Theta(_) => "theta",
        Command::Qubit(_) => "qubit",
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    commands::validate(cli)?;
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let table: Table = commands::execute(cli)?;
    let config = serde_json::to_value(cli).expect("config is plain data");
    let prov = Provenance {
        tool: "circprop",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command).to_string(),
        config,
    };
    let mut buf = Vec::new();
    match cli.format {
        Format::Csv => table::write_csv(&mut buf, &prov, &table)?,
        Format::Json => table::write_json(&mut buf, &prov, &table)?,
    }
    match &cli.out {
        Some(path) => File::create(path)?.write_all(&buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    if cli.verbose {
        eprintln!("wrote {} rows", table.rows.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("circprop: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
