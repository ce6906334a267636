use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "optprice", version, about = "Closed-form option prices and their verification harness")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output format (defaults: csv for simulate-sqrtbm and sweep, json otherwise)
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,

    /// Write output here instead of standard output
    #[arg(long, global = true)]
    pub output_path: Option<PathBuf>,

    /// Master seed for every random stream
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// JSON object whose keys mirror the command-line flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price an option with one of the closed forms
    #[command(allow_negative_numbers = true)]
    Price(PriceArgs),
    /// Check a closed form against the pricing PDE on a grid
    #[command(allow_negative_numbers = true)]
    VerifyPde(VerifyPdeArgs),
    /// Simulate square-root-of-Brownian-motion increments
    #[command(allow_negative_numbers = true)]
    SimulateSqrtbm(SqrtBmArgs),
    /// Compare a closed form with a lattice or Monte Carlo oracle
    #[command(allow_negative_numbers = true)]
    OracleCompare(CompareArgs),
    /// Price over a grid of one parameter
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bs,
    American,
    Bermudan,
    Stochvol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Omega {
    Rademacher,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MarketArgs {
    #[arg(long)]
    pub spot: f64,
    #[arg(long)]
    pub strike: f64,
    #[arg(long)]
    pub rate: f64,
    /// Maturity T in years
    #[arg(long)]
    pub maturity: f64,
    /// Valuation time t in years
    #[arg(long, default_value_t = 0.0)]
    pub now: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// call or put (bermudan defaults to put, stochvol to call)
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Black-Scholes volatility σ
    #[arg(long)]
    pub vol: Option<f64>,
    /// Consumption premium constant Ψ (american)
    #[arg(long)]
    pub psi: Option<f64>,
    /// Bermudan premium constant δ
    #[arg(long)]
    pub delta: Option<f64>,
    /// First possible exercise date T̂ (bermudan)
    #[arg(long)]
    pub first_exercise: Option<f64>,
    /// Volatility component β (stochvol)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Jump scale λ of the √dB perturbation (stochvol)
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Physical drift μ (stochvol; unused in pricing)
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = Omega::Rademacher)]
    pub omega: Omega,
    /// Half width of the uniform ω distribution
    #[arg(long, default_value_t = 1.0)]
    pub omega_half_width: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PriceArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Candidate {
    /// Black-Scholes price scaled by the consumption premium
    American,
    /// Plain Black-Scholes price (checked against α = r)
    Bs,
    /// Exercise value; not a solution
    Payoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartialsMode {
    Analytic,
    Fd,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyPdeArgs {
    #[arg(long, value_enum, default_value_t = Candidate::American)]
    pub candidate: Candidate,
    #[arg(long, value_enum, default_value_t = Kind::Call)]
    pub kind: Kind,
    #[arg(long, default_value_t = 100.0)]
    pub strike: f64,
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,
    #[arg(long, default_value_t = 0.2)]
    pub vol: f64,
    #[arg(long, default_value_t = 0.1)]
    pub psi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub maturity: f64,
    #[arg(long, default_value_t = 50.0)]
    pub s_min: f64,
    #[arg(long, default_value_t = 150.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 0.9)]
    pub t_max: f64,
    #[arg(long, default_value_t = 101)]
    pub n_s: usize,
    #[arg(long, default_value_t = 91)]
    pub n_t: usize,
    #[arg(long, value_enum, default_value_t = PartialsMode::Analytic)]
    pub partials: PartialsMode,
    /// Relative spot step for finite differences
    #[arg(long, default_value_t = 1e-4)]
    pub h_s_rel: f64,
    /// Absolute time step for finite differences
    #[arg(long, default_value_t = 1e-6)]
    pub h_t: f64,
    /// Exit status 3 when max |residual| exceeds this
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SqrtBmArgs {
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub n_steps: usize,
    /// Also estimate E[X²] at these step sizes (repeatable)
    #[arg(long = "scaling-dt")]
    pub scaling_dt: Vec<f64>,
    /// Include the path rows in JSON output
    #[arg(long)]
    pub include_path: bool,
    /// Where CSV mode writes the JSON diagnostics (default: standard error)
    #[arg(long)]
    pub diagnostics_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    Crr,
    McGbm,
    McPerturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Abs,
    Se,
    ReportOnly,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub oracle: OracleKind,
    #[arg(long, default_value_t = 10_000)]
    pub tree_steps: usize,
    /// Monte Carlo paths (both halves of each antithetic pair count)
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Time steps per path for mc-perturbed
    #[arg(long, default_value_t = 250)]
    pub steps: usize,
    #[arg(long)]
    pub antithetic: bool,
    /// abs for crr, se for Monte Carlo unless given
    #[arg(long, value_enum)]
    pub policy: Option<PolicyKind>,
    /// Absolute tolerance for the abs policy
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Standard-error multiple for the se policy
    #[arg(long, default_value_t = 3.0)]
    pub se_multiple: f64,
    /// Write the first --dump-count mc-perturbed paths to this CSV
    #[arg(long)]
    pub dump_paths: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub dump_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Spot,
    Strike,
    Vol,
    Rate,
    Maturity,
    Now,
    Psi,
    Delta,
    Beta,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}
