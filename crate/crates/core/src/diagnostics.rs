//! Numeric checks of the hypotheses behind the normal approximation:
//! vanishing Liapounov ratio and maximal variance share, the Taylor
//! remainder bound per factor, and the product-to-exponential limit.

use num_complex::Complex;

use crate::charfn::{strong_gaussian_with, CharFn, QuadRule, DEFAULT_CHARFN_TOL, DEFAULT_QUAD_TOL};
use crate::error::{Error, Result};
use crate::format::fmt_sig17;
use crate::moments::{FactorLaw, RadialParam};
use crate::real::{from_usize, lit, Real};
use crate::saddle::{hypothesis1_gap, tau_n};
use crate::series_core::FactorFamily;
use crate::summation::CompensatedComplexSum;

/// Relative slack for trend checks.
pub const TREND_SLACK: f64 = 0.01;
/// Values below this are treated as converged by trend checks.
pub const TREND_FLOOR: f64 = 1e-12;
pub const TAYLOR_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltReport<T> {
    pub rp: RadialParam<T>,
    /// `Γ₃/σ³`.
    pub liapounov_ratio: T,
    pub sup_var_ratio: T,
    /// `(Γ₃/σ³)/√r`.
    pub liapounov_scaled: T,
    /// Present when the point is `τ_n` for some `n`.
    pub hypothesis1_gap: Option<T>,
    pub strong_gaussian: T,
}

impl<T: Real> CltReport<T> {
    pub const CSV_HEADER: &'static str =
        "r,t,liapounov_ratio,sup_var_ratio,liapounov_scaled,hypothesis1_gap,strong_gaussian";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            fmt_sig17(self.rp.r()),
            fmt_sig17(self.rp.t()),
            fmt_sig17(self.liapounov_ratio),
            fmt_sig17(self.sup_var_ratio),
            fmt_sig17(self.liapounov_scaled),
            self.hypothesis1_gap.map(fmt_sig17).unwrap_or_default(),
            fmt_sig17(self.strong_gaussian)
        )
    }
}

pub fn clt_report<T: Real>(family: &FactorFamily, rp: &RadialParam<T>) -> Result<CltReport<T>> {
    clt_report_with(family, rp, lit(DEFAULT_QUAD_TOL), None)
}

/// Report at `τ_n`, including the gap `(m − m₁)/σ₁` there.
pub fn clt_report_at_n<T: Real>(family: &FactorFamily, n: u64, quad_tol: T) -> Result<CltReport<T>> {
    let tau = tau_n::<T>(n)?;
    let gap = hypothesis1_gap(family, n)?;
    clt_report_with(family, &tau.rp, quad_tol, Some(gap))
}

pub fn clt_report_with<T: Real>(
    family: &FactorFamily,
    rp: &RadialParam<T>,
    quad_tol: T,
    hypothesis1_gap: Option<T>,
) -> Result<CltReport<T>> {
    let cf = CharFn::new(family, rp, lit(DEFAULT_CHARFN_TOL))?;
    let s = *cf.moments();
    let sigma = cf.sigma();
    let ratio = s.gamma3 / (sigma * sigma * sigma);
    let strong = strong_gaussian_with(&cf, quad_tol, QuadRule::AdaptiveSimpson)?;
    Ok(CltReport {
        rp: *rp,
        liapounov_ratio: ratio,
        sup_var_ratio: s.sup_var_ratio,
        liapounov_scaled: ratio / rp.r().sqrt(),
        hypothesis1_gap,
        strong_gaussian: strong.value,
    })
}

/// `|E e^{iθY/σ} − 1 + (θ²/2)(σ_k/σ)²| ≤ |θ|³ E|Y|³ / (6σ³)` for the centered
/// factor `Y = X_k − E X_k`, with the expectation taken over the support.
pub fn taylor_remainder_check<T: Real>(law: &FactorLaw<T>, sigma_total: T, theta: T) -> bool {
    taylor_remainder(law, sigma_total, theta) <= taylor_bound(law, sigma_total, theta) + lit(TAYLOR_SLACK)
}

pub fn taylor_remainder<T: Real>(law: &FactorLaw<T>, sigma_total: T, theta: T) -> T {
    let u = theta / sigma_total;
    let mut acc = CompensatedComplexSum::new();
    for &(v, p) in &law.support {
        let y = T::from_u64(v).expect("support value fits") - law.mean;
        let (s, c) = (u * y).sin_cos();
        // e^{iuy} − 1 − iuy, small for small u
        acc.add(Complex::new((c - T::one()) * p, (s - u * y) * p));
    }
    let ratio = law.variance / (sigma_total * sigma_total);
    (acc.value() + Complex::new(theta * theta / lit(2.0) * ratio, T::zero())).norm()
}

pub fn taylor_bound<T: Real>(law: &FactorLaw<T>, sigma_total: T, theta: T) -> T {
    let a = theta.abs();
    a * a * a * law.abs_central_3 / (lit::<T>(6.0) * sigma_total * sigma_total * sigma_total)
}

/// Builds a law from an explicit finite support, computing its moments.
pub fn law_from_support<T: Real>(k: usize, support: Vec<(u64, T)>) -> FactorLaw<T> {
    let val = |v: u64| T::from_u64(v).expect("support value fits");
    let mean = support.iter().fold(T::zero(), |acc, &(v, p)| acc + val(v) * p);
    let variance = support.iter().fold(T::zero(), |acc, &(v, p)| {
        let d = val(v) - mean;
        acc + d * d * p
    });
    let abs3 = support.iter().fold(T::zero(), |acc, &(v, p)| {
        let d = (val(v) - mean).abs();
        acc + d * d * d * p
    });
    FactorLaw { k, support, mean, variance, abs_central_3: abs3 }
}

/// Synthetic families `(u_{n,t})_{n≥1}` with `sup_n |u_{n,t}| → 0`,
/// `Σ_n |u_{n,t}|` bounded and `Σ_n u_{n,t} → S` as `t → 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceFamily<T> {
    /// `u = 0`, `S = 0`.
    Zero,
    /// `u = s(1−t)t^{n−1}`, `Σ u = s`.
    ScaledGeometric { s: T },
    /// `u = iθ²2^{−n}(t−1)`, `Σ u → 0`.
    ComplexDecay { theta: T },
    /// `u = −(θ²/2)/N_t` for `n ≤ N_t = ⌈1/(1−t)⌉`, so the product tends to `e^{−θ²/2}`.
    GaussianLike { theta: T },
}

impl<T: Real> SequenceFamily<T> {
    fn terms(&self, t: T) -> Vec<Complex<T>> {
        let zero = T::zero();
        let one = T::one();
        match *self {
            SequenceFamily::Zero => vec![Complex::new(zero, zero)],
            SequenceFamily::ScaledGeometric { s } => {
                let mut out = Vec::new();
                let mut tn = one;
                while tn > lit(1e-20) {
                    out.push(Complex::new(s * (one - t) * tn, zero));
                    tn *= t;
                }
                out
            }
            SequenceFamily::ComplexDecay { theta } => {
                let mut out = Vec::new();
                let mut h = lit::<T>(0.5);
                while h > lit(1e-30) {
                    out.push(Complex::new(zero, theta * theta * h * (t - one)));
                    h /= lit(2.0);
                }
                out
            }
            SequenceFamily::GaussianLike { theta } => {
                let n = (one / (one - t)).ceil();
                let u = -theta * theta / lit(2.0) / n;
                vec![Complex::new(u, zero); n.to_usize().expect("finite count")]
            }
        }
    }

    /// `lim_{t→1} Σ u_{n,t}`.
    pub fn limit_sum(&self) -> Complex<T> {
        let zero = T::zero();
        match *self {
            SequenceFamily::Zero | SequenceFamily::ComplexDecay { .. } => Complex::new(zero, zero),
            SequenceFamily::ScaledGeometric { s } => Complex::new(s, zero),
            SequenceFamily::GaussianLike { theta } => Complex::new(-theta * theta / lit(2.0), zero),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductLimitRow<T> {
    pub t: T,
    pub terms: usize,
    pub product: Complex<T>,
    pub sum: Complex<T>,
    pub sup_u: T,
    /// `Σ |u|`.
    pub m: T,
    /// `|Σ ln(1+u) − Σ u|`.
    pub log_gap: T,
    /// `2M·sup|u|`.
    pub bound: T,
    /// `|∏(1+u) − e^S|` with `S` the limit sum.
    pub distance_to_limit: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductLimitReport<T> {
    pub limit: Complex<T>,
    pub rows: Vec<ProductLimitRow<T>>,
}

impl<T: Real> ProductLimitReport<T> {
    /// Every row satisfies the logarithmic bound and the distance to the
    /// limit does not grow along the grid.
    pub fn passed(&self) -> bool {
        let bounds = self.rows.iter().all(|r| r.log_gap <= r.bound + lit(TAYLOR_SLACK));
        let d: Vec<T> = self.rows.iter().map(|r| r.distance_to_limit).collect();
        bounds && decreasing_trend(&d, lit(TREND_SLACK), lit(TREND_FLOOR))
    }
}

/// Evaluates `∏(1+u_{n,t})` on a grid of `t` increasing to 1.
pub fn product_limit_demo<T: Real>(family: &SequenceFamily<T>, t_grid: &[T]) -> Result<ProductLimitReport<T>> {
    let limit = family.limit_sum().exp();
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > T::zero() && t < T::one()) {
            return Err(Error::InvalidParameter(format!("t must lie in (0, 1), got {t}")));
        }
        let u = family.terms(t);
        let sup_u = u.iter().fold(T::zero(), |a, z| a.max(z.norm()));
        if sup_u > lit(0.5) {
            return Err(Error::InvalidParameter(format!("sup |u| = {sup_u} exceeds 1/2 at t = {t}")));
        }
        let mut logs = CompensatedComplexSum::new();
        let mut sum = CompensatedComplexSum::new();
        let mut m = T::zero();
        for z in &u {
            logs.add((Complex::new(T::one(), T::zero()) + z).ln());
            sum.add(*z);
            m += z.norm();
        }
        let product = logs.value().exp();
        rows.push(ProductLimitRow {
            t,
            terms: u.len(),
            product,
            sum: sum.value(),
            sup_u,
            m,
            log_gap: (logs.value() - sum.value()).norm(),
            bound: lit::<T>(2.0) * m * sup_u,
            distance_to_limit: (product - limit).norm(),
        });
    }
    Ok(ProductLimitReport { limit, rows })
}

/// Non-increasing within relative slack; pairs that are both below `floor`
/// in magnitude count as converged.
pub fn decreasing_trend<T: Real>(values: &[T], rel_slack: T, floor: T) -> bool {
    values.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        b < a || b - a <= rel_slack * a.abs() || (a.abs() <= floor && b.abs() <= floor)
    })
}

/// Strictly decreasing, no slack.
pub fn strictly_decreasing<T: Real>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn log_log_slope<T: Real>(x: &[T], y: &[T]) -> T {
    let n = from_usize::<T>(x.len());
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = ly.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (*a - mx) * (*b - my);
        sxx += (*a - mx) * (*a - mx);
    }
    sxy / sxx
}
