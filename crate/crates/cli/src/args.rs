use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "halfsign", version, about = "Sign changes of weight-3/2 theta cusp forms along split and inert primes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Representation numbers r(n, Q) for n <= n-max.
    Theta(ThetaArgs),
    /// Checks a_f(t p²) = a_f(t) along the inert primes of the class set.
    Counterexample(CounterexampleArgs),
    /// Sign changes of a(t p²) along split or inert primes.
    Scan(ScanArgs),
    /// Shimura lift of a square-class series.
    Lift(LiftArgs),
    /// Partial-sum diagnostics and the quarter-log prime sum.
    Diag(DiagArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where a square-class series comes from: a class set (default: the shipped
/// `{Q1, Q2}` fixture) or a CSV table `n,numerator,denominator`.
#[derive(Args, Debug)]
pub struct SeriesSource {
    /// Class-set JSON file.
    #[arg(long, conflicts_with = "series")]
    pub classes: Option<PathBuf>,
    /// Coefficient CSV with rows `n, a(t n²)`.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Nebentypus literal, e.g. `{"kronecker": 12}`.
    #[arg(long)]
    pub psi: Option<String>,
    /// Level of a series read from CSV.
    #[arg(long, default_value_t = 1)]
    pub level: u64,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Args, Debug)]
pub struct ThetaArgs {
    #[arg(long)]
    pub form: PathBuf,
    #[arg(long, value_parser = parse_count)]
    pub n_max: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub classes: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    pub disc: i64,
    #[arg(long, default_value = "100", value_parser = parse_count)]
    pub prime_bound: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: SeriesSource,
    #[arg(long, allow_hyphen_values = true)]
    pub disc: i64,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    pub eps: i8,
    #[arg(long, value_parser = parse_count)]
    pub prime_bound: u64,
    /// Skip primes dividing this modulus.
    #[arg(long)]
    pub exclude_level: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    #[command(flatten)]
    pub source: SeriesSource,
    #[arg(long, value_parser = parse_count)]
    pub n_max: Option<u64>,
    /// Also check A(p) = 0 at the primes inert for this discriminant.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: Option<i64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct DiagArgs {
    #[command(flatten)]
    pub source: SeriesSource,
    #[arg(long, allow_hyphen_values = true)]
    pub disc: i64,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    pub eps: i8,
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    pub thresholds: Vec<u64>,
    #[arg(long)]
    pub exclude_level: Option<u64>,
    /// Skip the log log growth fit.
    #[arg(long)]
    pub no_fit: bool,
    /// Evaluate Σ log p / p over χ_D(p) = ε, ψ(p) = sign·ε with the `--psi`
    /// character instead of the series diagnostics.
    #[arg(long)]
    pub mertens: bool,
    #[arg(long, default_value = "-", value_parser = parse_sign, allow_hyphen_values = true)]
    pub sign: i8,
    #[command(flatten)]
    pub output: Output,
}

fn parse_sign(s: &str) -> Result<i8, String> {
    match s {
        "+" | "+1" | "1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => Err(format!("expected + or -, got `{s}`")),
    }
}

/// Accepts plain integers and `AeB` shorthand such as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    let bad = || format!("expected a non-negative integer, got `{s}`");
    match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let m: u64 = m.parse().map_err(|_| bad())?;
            let e: u32 = e.parse().map_err(|_| bad())?;
            10u64.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or_else(bad)
        }
        None => s.parse().map_err(|_| bad()),
    }
}
