#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] fraccalc::Error),
    /// Checks ran but at least one failed; the report is already written.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(e) if e.is_numerical() => 2,
            CliError::Numeric(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

pub fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing required value --{flag}"))
}

#[derive(Debug, Parser)]
#[command(name = "fraccalc", version, about = "Fractional calculus toolkit")]
struct Cli {
    /// JSON config file; flags override its values
    #[arg(long, global = true, env = config::CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct Common {
    /// Output file ("-" or absent for stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Relative tolerance (evaluation accuracy or check threshold)
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Number of grid steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Right end of the time grid
    #[arg(long)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a Mittag-Leffler function at a point or over a range
    Ml(MlArgs),
    /// Apply a fractional operator to a test function
    Fracop(FracopArgs),
    /// Compare numerical Laplace transforms with closed forms
    LaplaceCheck(LaplaceArgs),
    /// Solve a linear fractional Cauchy problem
    Fde(FdeArgs),
    /// Relaxation modulus and creep compliance of a viscoelastic model
    Visco(ViscoArgs),
    /// Fractional oscillator: closed form against the Volterra oracle
    Osc(OscArgs),
    /// Data behind the viscoelastic figures
    Figures(FigureArgs),
    /// Run every verification check and print a JSON report
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct MlArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to 1
    #[arg(long)]
    pub beta: Option<f64>,
    /// Pochhammer parameter of the three-parameter function; defaults to 1
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Single evaluation point
    #[arg(long, conflicts_with_all = ["z_min", "z_max"])]
    pub z: Option<f64>,
    /// Range start (with --z-max and --steps)
    #[arg(long)]
    pub z_min: Option<f64>,
    #[arg(long)]
    pub z_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    Integral,
    Rl,
    Caputo,
    Gl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Func {
    One,
    T,
    ExpNeg,
    Sin,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FracopArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub op: Option<Operator>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, value_enum)]
    pub func: Option<Func>,
    #[arg(long, value_enum)]
    pub side: Option<Side>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplaceSuite {
    Pairs,
    Operators,
    All,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LaplaceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub suite: Option<LaplaceSuite>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Rl,
    Caputo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    Zero,
    One,
    T,
    T2,
    Sin,
    ExpNeg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct FdeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub form: Option<Form>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Initial data b_0,b_1,... (one per integer part of the order, rounded up)
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub forcing: Option<ForcingKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Hooke,
    Newton,
    Maxwell,
    Voigt,
    ZenerMaxwell,
    ZenerVoigt,
    ScottBlair,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ViscoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Elastic modulus (single-spring models), default 1
    #[arg(long)]
    pub e: Option<f64>,
    /// Viscosity, default 1
    #[arg(long)]
    pub eta: Option<f64>,
    /// Zener moduli, default 1
    #[arg(long)]
    pub e1: Option<f64>,
    #[arg(long)]
    pub e2: Option<f64>,
    /// Scott-Blair order in (0, 1)
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct OscArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// Friction coefficient; only 0 is solvable
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig6,
    Fig7,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FigureArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub id: Option<FigureName>,
    /// Scott-Blair orders for fig7
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long)]
    pub e: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated check groups to run
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.config.as_deref().map(config::load).transpose()?;
    let cfg = cfg.as_ref();
    match cli.command {
        Command::Ml(a) => commands::ml(config::merge(a, cfg, "ml")?),
        Command::Fracop(a) => commands::fracop(config::merge(a, cfg, "fracop")?),
        Command::LaplaceCheck(a) => commands::laplace_check(config::merge(a, cfg, "laplace-check")?),
        Command::Fde(a) => commands::fde(config::merge(a, cfg, "fde")?),
        Command::Visco(a) => commands::visco(config::merge(a, cfg, "visco")?),
        Command::Osc(a) => commands::osc(config::merge(a, cfg, "osc")?),
        Command::Figures(a) => commands::figures(config::merge(a, cfg, "figures")?),
        Command::VerifyAll(a) => commands::verify_all(config::merge(a, cfg, "verify-all")?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
