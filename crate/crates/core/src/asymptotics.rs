//! Coefficient estimates `a_n ≈ f(t)/(√(2π) σ t^n)`, all carried in log space.
//!
//! Three variants differ in the point and the scale they plug in:
//! the numeric saddle `t_n` with the exact `σ(t_n)`; the closed-form point
//! `τ_n` with `σ₁(τ_n)`; and the fully closed form for distinct parts, where
//! `ln f(τ_n)` is replaced by its Euler–Maclaurin expansion.

use std::fmt;

use crate::error::{Error, Result};
use crate::format::fmt_sig17;
use crate::moments::{aggregate_moments, sigma1_sq, RadialParam, DEFAULT_TOL, DEFAULT_TRUNCATION_CAP};
use crate::real::{from_usize, lit, to_f64, Real};
use crate::saddle::{solve_saddle, tau_n, SaddleSolution, DEFAULT_SADDLE_TOL};
use crate::series_core::FactorFamily;
use crate::summation::CompensatedSum;

/// Absolute tolerance for the truncated `ln f` series.
pub const DEFAULT_LOGF_TOL: f64 = 1e-14;
/// Estimates above this are printed as an empty CSV field.
pub const CSV_ESTIMATE_LIMIT: f64 = 1e300;

/// `Σ_k ln f_k(t)`. For distinct parts the dropped tail is at most
/// `t^{K+1}/(1−t)`, for geometric parts `t^{K+1}/(1−t)²`.
pub fn log_f<T: Real>(family: &FactorFamily, rp: &RadialParam<T>, tol: T) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let y = rp.one_minus_pow(T::one());
    let tail = |k: usize| -> T {
        let head = rp.pow(from_usize::<T>(k + 1)) / y;
        match family {
            FactorFamily::GeometricParts => head / y,
            _ => head,
        }
    };
    let mut acc = CompensatedSum::new();
    match family {
        FactorFamily::CustomPolynomial(c) => {
            for k in 1..=c.len() {
                let coeffs = c.factor_approx::<T>(k).expect("k within list");
                let value: T = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, &cj)| cj * rp.pow(from_usize(j)))
                    .collect::<CompensatedSum<T>>()
                    .value();
                acc.add(value.ln_1p());
            }
        }
        FactorFamily::DistinctParts | FactorFamily::GeometricParts => {
            let cap = DEFAULT_TRUNCATION_CAP as usize;
            if tail(cap) >= tol {
                return Err(Error::TruncationCap { r: to_f64(rp.r()), cap: DEFAULT_TRUNCATION_CAP });
            }
            let geometric = matches!(family, FactorFamily::GeometricParts);
            let mut k = 0usize;
            loop {
                k += 1;
                let x = from_usize::<T>(k);
                acc.add(if geometric { -rp.one_minus_pow(x).ln() } else { rp.pow(x).ln_1p() });
                if tail(k) < tol {
                    break;
                }
            }
        }
    }
    Ok(acc.value())
}

/// `π²/(12ρ) − ln 2 / 2`, the small-`ρ` expansion of `Σ ln(1 + e^{−ρk})`.
/// Only meaningful for `ρ ≤ 1`; larger values log a warning.
pub fn euler_maclaurin_logf<T: Real>(rho: T) -> T {
    if rho > T::one() {
        log::warn!("euler_maclaurin_logf: rho = {rho} is outside the small-rho regime (rho <= 1)");
    }
    T::PI() * T::PI() / (lit::<T>(12.0) * rho) - T::LN_2() / lit(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateMethod {
    GeneralSaddle,
    Equivalents,
    ClosedForm,
}

impl EstimateMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EstimateMethod::GeneralSaddle => "general",
            EstimateMethod::Equivalents => "equivalents",
            EstimateMethod::ClosedForm => "closed",
        }
    }
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three log-space pieces of an estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateComponents<T> {
    pub log_f: T,
    /// `n·r`, i.e. `−ln t^n`.
    pub n_r: T,
    /// `ln σ` of the scale used.
    pub log_sigma: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimate<T> {
    pub n: u64,
    pub log_estimate: T,
    pub method: EstimateMethod,
    pub saddle: SaddleSolution<T>,
    pub components: EstimateComponents<T>,
}

fn ln_sqrt_2pi<T: Real>() -> T {
    (lit::<T>(2.0) * T::PI()).ln() / lit(2.0)
}

impl<T: Real> AsymptoticEstimate<T> {
    pub const CSV_HEADER: &'static str = "n,method,log_estimate,estimate,r,t";

    fn from_components(n: u64, method: EstimateMethod, saddle: SaddleSolution<T>, c: EstimateComponents<T>) -> Self {
        let mut out = Self { n, log_estimate: T::zero(), method, saddle, components: c };
        out.log_estimate = out.reconstruct();
        out
    }

    /// `ln f + n·r − ln(√(2π)σ)` from the stored components.
    pub fn reconstruct(&self) -> T {
        self.components.log_f + self.components.n_r - ln_sqrt_2pi::<T>() - self.components.log_sigma
    }

    /// `e^{log_estimate}`; may be `inf` for large `n`.
    pub fn estimate(&self) -> T {
        self.log_estimate.exp()
    }

    pub fn csv_row(&self) -> String {
        let est = to_f64(self.log_estimate).exp();
        let est = if est.is_finite() && est <= CSV_ESTIMATE_LIMIT { fmt_sig17(est) } else { String::new() };
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.method,
            fmt_sig17(self.log_estimate),
            est,
            fmt_sig17(self.saddle.rp.r()),
            fmt_sig17(self.saddle.rp.t())
        )
    }
}

/// Numeric saddle `m(t_n) = n` with the exact `σ(t_n)`.
pub fn estimate_general<T: Real>(family: &FactorFamily, n: u64) -> Result<AsymptoticEstimate<T>> {
    estimate_general_with(family, n, lit(DEFAULT_SADDLE_TOL))
}

/// As [`estimate_general`], with the relative tolerance of the saddle equation.
pub fn estimate_general_with<T: Real>(family: &FactorFamily, n: u64, saddle_tol: T) -> Result<AsymptoticEstimate<T>> {
    let saddle = solve_saddle(family, n, saddle_tol)?;
    let summary = aggregate_moments(family, &saddle.rp, lit(DEFAULT_TOL))?;
    let components = EstimateComponents {
        log_f: log_f(family, &saddle.rp, lit(DEFAULT_LOGF_TOL))?,
        n_r: T::from_u64(n).expect("n fits") * saddle.rp.r(),
        log_sigma: summary.sigma2.ln() / lit(2.0),
    };
    Ok(AsymptoticEstimate::from_components(n, EstimateMethod::GeneralSaddle, saddle, components))
}

/// Distinct parts at `τ_n` with `σ₁(τ_n)` and the summed `ln f(τ_n)`.
pub fn estimate_equivalents<T: Real>(n: u64) -> Result<AsymptoticEstimate<T>> {
    let saddle = tau_n::<T>(n)?;
    let components = EstimateComponents {
        log_f: log_f(&FactorFamily::DistinctParts, &saddle.rp, lit(DEFAULT_LOGF_TOL))?,
        n_r: T::from_u64(n).expect("n fits") * saddle.rp.r(),
        log_sigma: sigma1_sq(&saddle.rp).ln() / lit(2.0),
    };
    Ok(AsymptoticEstimate::from_components(n, EstimateMethod::Equivalents, saddle, components))
}

/// `q(n) ≈ e^{π√(n/3)} / (4·3^{1/4} n^{3/4})`.
pub fn closed_form_q<T: Real>(n: u64) -> Result<AsymptoticEstimate<T>> {
    let saddle = tau_n::<T>(n)?;
    let nn = T::from_u64(n).expect("n fits");
    let rho = saddle.rp.r();
    let components = EstimateComponents {
        log_f: euler_maclaurin_logf(rho),
        n_r: nn * rho,
        // σ₁²(τ_n) = (4√3/π) n^{3/2}
        log_sigma: ((lit::<T>(4.0) * lit::<T>(3.0).sqrt() / T::PI()).ln() + lit::<T>(1.5) * nn.ln()) / lit(2.0),
    };
    let mut est = AsymptoticEstimate::from_components(n, EstimateMethod::ClosedForm, saddle, components);
    est.log_estimate = T::PI() * (nn / lit(3.0)).sqrt() - lit::<T>(4.0).ln() - lit::<T>(3.0).ln() / lit(4.0)
        - lit::<T>(0.75) * nn.ln();
    Ok(est)
}

pub fn estimate<T: Real>(family: &FactorFamily, n: u64, method: EstimateMethod) -> Result<AsymptoticEstimate<T>> {
    match method {
        EstimateMethod::GeneralSaddle => estimate_general(family, n),
        _ if !matches!(family, FactorFamily::DistinctParts) => Err(Error::Unsupported(format!(
            "the {method} estimate uses closed-form equivalents known only for distinct parts, not {family}"
        ))),
        EstimateMethod::Equivalents => estimate_equivalents(n),
        EstimateMethod::ClosedForm => closed_form_q(n),
    }
}
