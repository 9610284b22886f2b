//! `isospec`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage or input errors.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isospec_core::Error as CoreError;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "isospec", version, about = "Isospectral h-transforms and principal-eigenvalue bounds")]
struct Cli {
    /// Numerical tolerance for harmonicity and spectrum checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Seed for randomized fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Harmonic function of a chain.
    Harmonic(HarmonicArgs),
    /// h-transform of a chain (forward, inverse, local or measure dual).
    Transform(TransformArgs),
    /// Compare spectra of a chain and its transform.
    Verify(VerifyArgs),
    /// Two-sided bounds on the principal eigenvalue of a birth–death chain.
    Bounds(BoundsArgs),
    /// Transforms, spectra and eigenfunction checks for 1-D operators.
    Diffop(DiffopArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Iterate,
    Explicit,
    Solve,
}

#[derive(Args, Debug)]
pub struct HarmonicArgs {
    /// Chain JSON file.
    pub chain: PathBuf,
    /// Reference state for the iterative and direct methods.
    #[arg(long, default_value_t = 0)]
    pub theta: usize,
    #[arg(long, value_enum, default_value_t = Method::Iterate)]
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Forward,
    Inverse,
    Local,
    Measure,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    pub chain: PathBuf,
    #[arg(long, value_enum, default_value_t = Direction::Forward)]
    pub direction: Direction,
    /// h as JSON (`[...]` or `{"h":[...],"harmonic_set":[...]}`). Computed when omitted.
    #[arg(long)]
    pub h: Option<PathBuf>,
    /// Measure for the measure dual (JSON array). Defaults to the reversible measure.
    #[arg(long)]
    pub mu: Option<PathBuf>,
    /// Reference state used when h has to be computed.
    #[arg(long, default_value_t = 0)]
    pub theta: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Original chain.
    pub a: Option<PathBuf>,
    /// Transformed chain; built from `a` and `h` when omitted.
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub h: Option<PathBuf>,
    /// Instead of files, check this many seeded random reversible chains.
    #[arg(long)]
    pub random: Option<usize>,
    /// Largest chain size for `--random`.
    #[arg(long, default_value_t = 30)]
    pub max_states: usize,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    pub chain: PathBuf,
    #[arg(long, default_value_t = 4096)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tail_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// `L^h g_n = −n g_n` residuals for `g_n = h H_n`.
    Eigen,
    /// Forward transform of the operator by a harmonic `h`.
    Transform,
    /// Inverse transform of a potential-free operator by `h`.
    Inverse,
    /// Discretized spectrum (and isospectrality against the transform when `h` is given).
    Spectrum,
    /// Dual drift from the Riccati equation.
    Riccati,
}

#[derive(Args, Debug)]
pub struct DiffopArgs {
    /// Operator JSON file.
    pub op: PathBuf,
    /// Smooth h as JSON: `{"h":expr}` (optional "dh", "d2h") or `{"psi":expr}`.
    #[arg(long)]
    pub h: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Check::Spectrum)]
    pub check: Check,
    /// Highest Hermite degree for `--check eigen`.
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    /// Number of eigenvalues compared for `--check spectrum`.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Initial value of φ for `--check riccati`.
    #[arg(long, default_value_t = 0.0)]
    pub phi0: f64,
    /// Starting point for `--check riccati` (nearest grid point is used).
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
}

const SCHEMA_HELP: &str = "\
input formats:
  chain    {\"type\":\"bd\",\"birth\":[..],\"death\":[..],\"killing\":[..],\"N\":int}
           {\"type\":\"qpair\",\"rates\":[[..]],\"total\":[..],\"killing\":[..]}
           rate arrays may be {\"formula\":\"poly\",\"coeffs\":[..]} or
           {\"formula\":\"geometric\",\"scale\":s,\"ratio\":r}; death[0] is the rate out of state 1
  h        [..] or {\"h\":[..],\"harmonic_set\":[..]}
  operator {\"a\":expr,\"b\":expr,\"c\":expr,\"interval\":[lo,hi],\"M\":int,\"bc\":[\"neumann\",\"dirichlet\"]}
  smooth h {\"h\":expr,\"dh\":expr,\"d2h\":expr} or {\"psi\":expr}
  expr     numbers, x, + - * / ^, exp, sin, cos, log";

pub struct Context {
    pub tol: Option<f64>,
    pub seed: u64,
    pub quiet: bool,
}

impl Context {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Input errors: the request itself is malformed.
fn is_usage_error(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<std::io::Error>().is_some() || err.downcast_ref::<serde_json::Error>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<CoreError>(),
        Some(
            CoreError::Parse(_)
                | CoreError::NegativeRate(..)
                | CoreError::PotentialExceedsRate(_)
                | CoreError::NotTotallyStable(_)
                | CoreError::NonFinite(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::InvalidArgument(_)
                | CoreError::MissingRate(_)
        )
    )
}

/// A closed stdout, as under `| head`.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    use std::io::ErrorKind::BrokenPipe;
    err.chain().any(|e| {
        if let Some(e) = e.downcast_ref::<std::io::Error>() {
            e.kind() == BrokenPipe
        } else if let Some(e) = e.downcast_ref::<serde_json::Error>() {
            e.io_error_kind() == Some(BrokenPipe)
        } else if let Some(e) = e.downcast_ref::<csv::Error>() {
            matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == BrokenPipe)
        } else {
            false
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Context { tol: cli.tol, seed: cli.seed, quiet: cli.quiet };
    let result = match &cli.command {
        Command::Harmonic(a) => commands::harmonic(&ctx, a),
        Command::Transform(a) => commands::transform(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Bounds(a) => commands::bounds(&ctx, a),
        Command::Diffop(a) => commands::diffop(&ctx, a),
    };
    match result {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = output::emit(&report, cli.output, &mut out).and_then(|_| Ok(out.flush()?)) {
                if is_broken_pipe(&e) {
                    return ExitCode::SUCCESS;
                }
                ctx.note(format!("error: {e:#}"));
                return ExitCode::from(2);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ctx.note("check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            ctx.note(format!("error: {e:#}"));
            if is_usage_error(&e) {
                ctx.note(SCHEMA_HELP);
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
