//! `octabif`: singular points, fibres and bifurcation data from the command line.

mod commands;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use octabif_core::energies::gamma_cap_self_test;
use octabif_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "octabif", version, about = "Singular points, fibres and bifurcation diagrams of (J, H_t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank-one singular points of the reduced system at level j.
    Singular(SingularArgs),
    /// Reduced level set, bouquet graph and stacked-torus counts.
    Fibre(FibreArgs),
    /// Singular values over a j-range.
    Bifurcation(BifurcationArgs),
    /// Transitions and per-tau diagrams along a family.
    Sweep(SweepArgs),
    /// Williamson types of the four invariant rank-zero points.
    ClassifyInvariant(ClassifyArgs),
    /// Numerical property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Four comma-separated reals, or a template in tau such as "tau/2,tau/2,tau/3,tau".
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,
    /// Value of tau when --t is a template.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct SingularArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub j: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FibreArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub j: f64,
    /// Level h, or "auto" for the level of the lowest-u hyperbolic point.
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    /// Samples per polyline arc.
    #[arg(long, default_value_t = octabif_core::fibres::DEFAULT_GRID)]
    pub grid: usize,
    /// Contour CSV (component_id,polyline_id,u,v).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Graph summary JSON; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// SVG overlay of polylines and singular points.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BifurcationArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub j_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub j_max: f64,
    #[arg(long, default_value_t = octabif_core::bifurcation::DEFAULT_J_STEPS)]
    pub steps: usize,
    /// Diagram CSV (j,h,kind,source); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Detect {
    /// Williamson type of the invariant rank-zero points.
    Rank0Type,
    /// Presence of hyperbolic-regular points at the level given by --j.
    HyperbolicAt,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Template in tau, e.g. "tau/2,tau/2,tau/3,tau".
    #[arg(long, allow_hyphen_values = true)]
    pub family: String,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    pub tau_max: f64,
    #[arg(long, value_enum, default_value = "rank0-type")]
    pub detect: Detect,
    /// Invariant point watched by --detect rank0-type: phi2, phi3, phi6, phi7 or all.
    #[arg(long, default_value = "phi2")]
    pub point: String,
    /// Level used by --detect hyperbolic-at.
    #[arg(long)]
    pub j: Option<f64>,
    /// Coarse tau samples before bisection.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Number of tau intervals for per-tau diagrams; 0 writes none.
    #[arg(long, default_value_t = 0)]
    pub diagrams: usize,
    /// j samples per diagram.
    #[arg(long, default_value_t = 300)]
    pub j_steps: usize,
    /// Directory for transitions.json and diagram files; stdout only when absent.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    /// Generic (c1, c2) draws that must agree.
    #[arg(long, default_value_t = 3)]
    pub draws: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Deliberate defect: "none" or "gamma2-sign".
    #[arg(long, default_value = "none")]
    pub mutate: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
    /// Completed but the outcome is negative (failed verification).
    Negative,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => Failure::Usage(m),
            e => Failure::Core(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(Error::Domain(_)) | Failure::Core(Error::AngleUndefined) => 3,
            Failure::Core(_) | Failure::Io(_) | Failure::Negative => 2,
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("OCTABIF_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("OCTABIF_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads()?;
    let drift = gamma_cap_self_test();
    if !(drift < 1e-10) {
        return Err(Failure::Core(Error::NoConvergence(format!("Gamma self-test failed: discrepancy {drift:e}"))));
    }
    match cli.command {
        Command::Singular(a) => commands::singular(&a),
        Command::Fibre(a) => commands::fibre(&a),
        Command::Bifurcation(a) => commands::bifurcation(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::ClassifyInvariant(a) => commands::classify_invariant(&a),
        Command::Verify(a) => commands::verify(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Negative => {}
            }
            ExitCode::from(f.code())
        }
    }
}
