//! `knorm`: ground states, regime verdicts, verification suites and
//! plot-ready curves for normalized Kirchhoff critical points.
//!
//! Exit codes: 0 pass, 1 usage error, 2 verification failure, 3 numerical failure.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use knorm_core::ground_state::SolverConfig;
use knorm_core::scalar_reduction::Params;

#[derive(Parser, Debug)]
#[command(name = "knorm", version, about = "Normalized critical points of the Kirchhoff energy")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the primary output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the ground state Q and report its norms
    SolveQ(SolveQArgs),
    /// Classify the regime and report the critical point, if any
    Classify(ClassifyArgs),
    /// Run verification suites; exits 2 if any check fails
    Verify(VerifyArgs),
    /// Verdict CSV over a (p, c) grid
    PhaseDiagram(PhaseArgs),
    /// Verdicts over a c-range with a gradient-flow cross-check per point
    Sweep(SweepArgs),
    /// CSV of f, f' or the energy along the dilation path
    Curve(CurveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// RK4 step of the shooting solver, in decay lengths
    #[arg(long, default_value_t = 2.0e-3)]
    grid_step: f64,
    /// Truncation radius of the shooting solver, in decay lengths
    #[arg(long, default_value_t = 40.0)]
    grid_radius: f64,
}

impl GridArgs {
    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        if !(self.grid_step > 0.0 && self.grid_radius > self.grid_step) {
            return Err(CliError::Usage("--grid-step must be positive and below --grid-radius".into()));
        }
        Ok(SolverConfig { step: self.grid_step, r_max_scale: self.grid_radius, ..SolverConfig::default() })
    }
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long = "dim")]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long)]
    c: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<Params, CliError> {
        Ok(Params::new(self.dim, self.p, self.a, self.b, self.c)?)
    }
}

#[derive(Args, Debug)]
pub struct SolveQArgs {
    #[arg(long = "dim")]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Also write the profile as CSV (r,Q)
    #[arg(long)]
    profile_csv: Option<PathBuf>,
    /// Tolerance of the Pohozaev identities
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Use this |Q|_{L²} instead of the cached or solved value
    #[arg(long)]
    q_l2: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Oracle,
    Path,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Override the tolerance of every check
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

/// Closed interval written `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    /// `n` evenly spaced points; empty when n = 0 or hi < lo.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        if n == 0 || self.hi < self.lo {
            return Vec::new();
        }
        if n == 1 {
            return vec![self.lo];
        }
        (0..n).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64).collect()
    }

    /// `n` log-spaced points; requires 0 < lo.
    pub fn logspace(&self, n: usize) -> Vec<f64> {
        if n == 0 || self.hi < self.lo {
            return Vec::new();
        }
        if n == 1 {
            return vec![self.lo];
        }
        let (l, h) = (self.lo.ln(), self.hi.ln());
        let mut xs: Vec<f64> = (0..n).map(|k| (l + (h - l) * k as f64 / (n - 1) as f64).exp()).collect();
        // Exact endpoints rather than exp(ln(x)).
        xs[0] = self.lo;
        xs[n - 1] = self.hi;
        xs
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let (lo, hi) = (num(lo)?, num(hi)?);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("range ends must be finite".into());
    }
    Ok(Range { lo, hi })
}

#[derive(Args, Debug)]
pub struct PhaseArgs {
    #[arg(long = "dim")]
    dim: u32,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Exponent range lo:hi
    #[arg(long, value_parser = parse_range)]
    p_range: Range,
    /// Mass range lo:hi
    #[arg(long, value_parser = parse_range)]
    c_range: Range,
    /// Points per axis
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long = "dim")]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Mass range lo:hi
    #[arg(long, value_parser = parse_range)]
    c_range: Range,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long)]
    q_l2: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    F,
    Fprime,
    PathEnergy,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    what: Curve,
    #[command(flatten)]
    params: ParamArgs,
    /// Abscissa range lo:hi (t for f and f', s for the path); log-spaced
    #[arg(long, value_parser = parse_range, default_value = "0.01:100")]
    range: Range,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    q_l2: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// A check failed; its report has already been written.
    Verification(String),
    Numerical(String),
}

impl From<knorm_core::Error> for CliError {
    fn from(err: knorm_core::Error) -> Self {
        use knorm_core::Error::*;
        match err {
            Inadmissible(_) | InvalidInput(_) => CliError::Usage(err.to_string()),
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(format!("I/O error: {err}"))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::SolveQ(args) => commands::solve_q(&args, out),
        Command::Classify(args) => commands::classify(&args, out),
        Command::Verify(args) => commands::verify(&args, out),
        Command::PhaseDiagram(args) => commands::phase_diagram(&args, out),
        Command::Sweep(args) => commands::sweep(&args, out),
        Command::Curve(args) => commands::curve(&args, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
