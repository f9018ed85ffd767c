use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const SCHEMAS: &str = "\
CSV schemas (after one `# config:` comment line):
  exact          n,coefficient
  estimate       n,method,log_estimate,estimate,r,t
  compare        n,exact,estimate_closed,ratio
  saddle         n,method,r,t,m,residual
  charfn         theta,re,im,abs,gauss,abs_diff
  diagnose clt   r,t,liapounov_ratio,sup_var_ratio,liapounov_scaled,hypothesis1_gap,strong_gaussian

Exit status: 0 success, 1 usage error, 2 domain error (reported as `error: <kind>: <message>`).";

#[derive(Debug, Parser)]
#[command(
    name = "coefasym",
    version,
    about = "Saddle-point coefficient asymptotics for infinite products",
    after_help = SCHEMAS
)]
pub struct Cli {
    /// Factor family: distinct, geometric, or custom:<path.json>
    #[arg(long, global = true, default_value = "distinct", value_parser = parse_family)]
    pub family: FamilySpec,

    /// Relative tolerance of the saddle equation
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,

    /// Absolute tolerance of the strong-Gaussian quadrature
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive)]
    pub quad_tol: f64,

    /// Write CSV to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficients a_0..a_N
    Exact(ExactArgs),
    /// Asymptotic estimate of a_n
    Estimate(EstimateArgs),
    /// Exact coefficients against the closed-form estimate
    Compare(CompareArgs),
    /// Saddle point for degree n
    Saddle(SaddleArgs),
    /// Standardized characteristic function on a theta grid
    Charfn(CharfnArgs),
    /// Hypothesis diagnostics
    #[command(subcommand)]
    Diagnose(Diagnose),
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    General,
    Equivalents,
    Closed,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value = "general")]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub n_max: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub start: u64,
    /// Multiply n by this factor between rows instead of stepping by 1
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub geometric_stride: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SaddleArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Solve m(t) = n numerically instead of using the closed-form point
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct CharfnArgs {
    #[arg(long, value_parser = positive)]
    pub r: f64,
    #[arg(long, value_parser = positive)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
}

#[derive(Debug, Subcommand)]
pub enum Diagnose {
    /// Liapounov ratio, variance share and strong-Gaussian integral per grid point
    Clt(CltArgs),
}

#[derive(Debug, Args)]
pub struct CltArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.2,0.1,0.05,0.02", value_parser = positive)]
    pub r_grid: Vec<f64>,
    /// Evaluate at the closed-form points of these n instead, adding the Hypothesis-1 gap
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    pub n_grid: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Distinct,
    Geometric,
    Custom(PathBuf),
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Distinct => f.write_str("distinct"),
            FamilySpec::Geometric => f.write_str("geometric"),
            FamilySpec::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

fn parse_family(s: &str) -> Result<FamilySpec, String> {
    match s {
        "distinct" => Ok(FamilySpec::Distinct),
        "geometric" => Ok(FamilySpec::Geometric),
        _ => match s.strip_prefix("custom:") {
            Some(path) if !path.is_empty() => Ok(FamilySpec::Custom(PathBuf::from(path))),
            _ => Err("expected distinct, geometric or custom:<path.json>".into()),
        },
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}
