//! `wsl`: file formats, reports and the command-line surface over `wsl-core`.
//!
//! Every command is a plain function returning an [`Outcome`]; `main` only
//! parses arguments and maps results to exit codes (0 pass, 2 verdict
//! failure, 1 operational error).

// NaN-rejecting comparisons are written as negated ones on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod expr;
pub mod report;
pub mod spec;

#[derive(Debug)]
pub enum CliError {
    Io { path: String, source: std::io::Error },
    Parse(String),
    Core(wsl_core::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Parse(msg) => write!(f, "parse error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Core(e) => Some(e),
            _ => None,
        }
    }
}

impl From<wsl_core::Error> for CliError {
    fn from(e: wsl_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// 0 when every checked hypothesis holds, 2 otherwise.
    pub code: i32,
    /// Printed to stdout.
    pub summary: String,
}

impl Outcome {
    pub fn pass_if(ok: bool, summary: String) -> Self {
        Outcome { code: if ok { 0 } else { 2 }, summary }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wsl", version, about = "Rotationally symmetric 3-sphere laboratory")]
pub struct Cli {
    /// Worker threads (WSL_THREADS overrides; default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a manifold and write grid.csv and analysis.json.
    Analyze(AnalyzeArgs),
    /// Geodesic distance between two points, printed to stdout.
    Dist(DistArgs),
    /// Limit, window norms, weak scalar tests and cone portrait of a sequence.
    Sequence(SequenceArgs),
    /// Upper bound on the flat distance between two manifolds.
    SwifBound(SwifArgs),
    /// Write a manifold spec in sample form.
    Generate(GenerateArgs),
    /// Convergence-rate certificate.
    CertifyRate(RateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Diameter cap (default: the diameter itself).
    #[arg(long = "D-cap")]
    pub d_cap: Option<f64>,
    /// Minimal-area floor (default 0).
    #[arg(long = "A-floor")]
    pub a_floor: Option<f64>,
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    pub spec: PathBuf,
    /// `s,azimuth,elevation` with angles in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = wsl_core::distance::DEFAULT_RESOLUTION)]
    pub mesh: usize,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    pub spec: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub k: u32,
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LambdaArg {
    Certified,
    Sampled,
}

#[derive(Debug, Args)]
pub struct SwifArgs {
    pub spec1: PathBuf,
    pub spec2: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<u32>,
    #[arg(long = "D-cap")]
    pub d_cap: f64,
    #[arg(long, value_enum, default_value_t = LambdaArg::Certified)]
    pub lambda: LambdaArg,
    /// Distance-mesh resolution for the sampled distortion.
    #[arg(long, default_value_t = 256)]
    pub mesh: usize,
    #[arg(long, default_value_t = 512)]
    pub pairs: usize,
    /// Skip the sampled distortion estimate.
    #[arg(long)]
    pub no_sample: bool,
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub family: String,
    /// `key=value` parameters.
    pub params: Vec<String>,
    #[arg(short, long)]
    pub out: PathBuf,
    /// Number of samples written.
    #[arg(long, default_value_t = 4097)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long = "D")]
    pub d: f64,
    #[arg(long = "D0")]
    pub d0: f64,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub i: u32,
}

/// Thread count: `WSL_THREADS` wins over `--threads`; 0 means rayon's default.
pub fn thread_count(flag: Option<usize>) -> Result<usize, CliError> {
    match std::env::var("WSL_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("WSL_THREADS = {v:?} is not a count"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

pub fn run(cli: Cli, raw_args: &[OsString]) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cli.threads)?)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let command_line = report::command_line(raw_args);
    pool.install(|| match &cli.command {
        Command::Analyze(a) => commands::analyze(a, &command_line),
        Command::Dist(a) => commands::dist(a),
        Command::Sequence(a) => commands::sequence(a, &command_line),
        Command::SwifBound(a) => commands::swif_bound(a, &command_line),
        Command::Generate(a) => commands::generate(a),
        Command::CertifyRate(a) => commands::certify_rate(a),
    })
}

/// Parses `args` (program name first) and runs the command. Clap errors,
/// including `--help`, come back as `Usage`.
pub fn run_from<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&raw).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli, &raw)
}
