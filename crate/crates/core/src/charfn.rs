//! Characteristic function of the standardized radial variable
//! `Z_t = (X_t − m(t)) / σ(t)`:
//!
//! `φ_Z(θ) = e^{−iθm/σ} f(t e^{iθ/σ}) / f(t)`,
//!
//! evaluated as a sum of per-factor complex logarithms, together with the
//! Gaussian-approximation diagnostics built on it.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::format::fmt_sig17;
use crate::moments::{aggregate_moments, MomentSummary, RadialParam, DEFAULT_TOL, DEFAULT_TRUNCATION_CAP};
use crate::quadrature::{adaptive_simpson_panels, gauss_kronrod_panels, QuadResult, DEFAULT_MAX_DEPTH, DEFAULT_MAX_SUBDIVISIONS};
use crate::real::{from_usize, lit, to_f64, Real};
use crate::series_core::FactorFamily;
use crate::summation::CompensatedComplexSum;

/// Absolute tolerance on the truncated log-sum.
pub const DEFAULT_CHARFN_TOL: f64 = 1e-13;
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
/// Slack for the pointwise bound of the small-θ region.
pub const REGION_SLACK: f64 = 1e-9;
/// Slack for the second/third-moment bound.
pub const CRAMER_SLACK: f64 = 1e-12;
pub const REGION_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnSample<T> {
    pub rp: RadialParam<T>,
    pub theta: T,
    pub value: Complex<T>,
    /// `ln|φ|`, accumulated without exponentiating.
    pub log_abs: T,
}

impl<T: Real> CharFnSample<T> {
    pub const CSV_HEADER: &'static str = "theta,re,im,abs,gauss,abs_diff";

    pub fn gauss(&self) -> T {
        (-self.theta * self.theta / lit(2.0)).exp()
    }

    pub fn csv_row(&self) -> String {
        let g = self.gauss();
        format!(
            "{},{},{},{},{},{}",
            fmt_sig17(self.theta),
            fmt_sig17(self.value.re),
            fmt_sig17(self.value.im),
            fmt_sig17(self.value.norm()),
            fmt_sig17(g),
            fmt_sig17((self.value - Complex::new(g, T::zero())).norm())
        )
    }
}

#[derive(Debug, Clone)]
enum Terms<T> {
    // (q_k, 1 - q_k) for k = 1..=K
    Distinct(Vec<(T, T)>),
    Geometric(Vec<(T, T)>),
    // per factor: (degree, c_j t^j) pairs and their sum
    Custom(Vec<(Vec<(usize, T)>, T)>),
}

/// Evaluator for `φ_Z` at a fixed radial point; caches the moments and
/// the truncated factor table.
#[derive(Debug, Clone)]
pub struct CharFn<T> {
    rp: RadialParam<T>,
    moments: MomentSummary<T>,
    sigma: T,
    terms: Terms<T>,
}

impl<T: Real> CharFn<T> {
    /// `tol` bounds the neglected tail of the log-sum. For distinct and
    /// geometric parts each dropped term is at most `2t^k/(1−t)` in modulus,
    /// so `K` is the first index with `2t^{K+1}/(1−t)² < tol`.
    pub fn new(family: &FactorFamily, rp: &RadialParam<T>, tol: T) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
        let moments = aggregate_moments(family, rp, lit(DEFAULT_TOL))?;
        let terms = match family {
            FactorFamily::DistinctParts | FactorFamily::GeometricParts => {
                let k = truncation_index(rp, tol)?;
                let table: Vec<(T, T)> = (1..=k)
                    .map(|j| {
                        let x = from_usize::<T>(j);
                        (rp.pow(x), rp.one_minus_pow(x))
                    })
                    .collect();
                if matches!(family, FactorFamily::DistinctParts) {
                    Terms::Distinct(table)
                } else {
                    Terms::Geometric(table)
                }
            }
            FactorFamily::CustomPolynomial(c) => Terms::Custom(
                (1..=c.len())
                    .map(|k| {
                        let coeffs = c.factor_approx::<T>(k).expect("k within list");
                        let w: Vec<(usize, T)> = coeffs
                            .iter()
                            .enumerate()
                            .skip(1)
                            .filter(|(_, c)| **c > T::zero())
                            .map(|(j, &c)| (j, c * rp.pow(from_usize(j))))
                            .collect();
                        let total = w.iter().fold(T::one(), |acc, x| acc + x.1);
                        (w, total)
                    })
                    .collect(),
            ),
        };
        Ok(Self { rp: *rp, moments, sigma: moments.sigma(), terms })
    }

    pub fn moments(&self) -> &MomentSummary<T> {
        &self.moments
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn rp(&self) -> &RadialParam<T> {
        &self.rp
    }

    /// Number of factors kept in the log-sum.
    pub fn factor_count(&self) -> usize {
        match &self.terms {
            Terms::Distinct(v) | Terms::Geometric(v) => v.len(),
            Terms::Custom(v) => v.len(),
        }
    }

    /// `ln(f(te^{iα}) / f(t))` as a sum of principal logarithms.
    pub fn log_phi_x(&self, alpha: T) -> Complex<T> {
        let half = lit::<T>(0.5);
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        let mut acc = CompensatedComplexSum::new();
        match &self.terms {
            Terms::Distinct(table) => {
                for (i, &(q, p)) in table.iter().enumerate() {
                    let (s, c) = (from_usize::<T>(i + 1) * alpha * half).sin_cos();
                    let d = T::one() + q;
                    // |1 + q e^{iβ}|² = (1+q)² − 4q sin²(β/2); 1 + q cos β = (1−q) + 2q cos²(β/2)
                    let re = half * (-four * q * s * s / (d * d)).ln_1p();
                    let im = (two * q * s * c).atan2(p + two * q * c * c);
                    acc.add(Complex::new(re, im));
                }
            }
            Terms::Geometric(table) => {
                for (i, &(q, p)) in table.iter().enumerate() {
                    let (s, c) = (from_usize::<T>(i + 1) * alpha * half).sin_cos();
                    // |1 − q e^{iβ}|² = (1−q)² + 4q sin²(β/2); 1 − q cos β = (1−q) + 2q sin²(β/2)
                    let re = -half * (four * q * s * s / (p * p)).ln_1p();
                    let im = (two * q * s * c).atan2(p + two * q * s * s);
                    acc.add(Complex::new(re, im));
                }
            }
            Terms::Custom(factors) => {
                for (w, total) in factors {
                    let mut z = Complex::new(T::one(), T::zero());
                    for &(j, wj) in w {
                        let (s, c) = (from_usize::<T>(j) * alpha).sin_cos();
                        z += Complex::new(wj * c, wj * s);
                    }
                    acc.add((z / *total).ln());
                }
            }
        }
        acc.value()
    }

    /// `φ_Z(θ)`.
    pub fn phi_z(&self, theta: T) -> CharFnSample<T> {
        if theta == T::zero() {
            return CharFnSample { rp: self.rp, theta, value: Complex::new(T::one(), T::zero()), log_abs: T::zero() };
        }
        let log = self.log_phi_x(theta / self.sigma);
        let phase = log.im - theta * self.moments.m / self.sigma;
        let modulus = log.re.exp();
        let (s, c) = phase.sin_cos();
        CharFnSample { rp: self.rp, theta, value: Complex::new(modulus * c, modulus * s), log_abs: log.re }
    }

    /// Lower end of the Gaussian core, `σ³/(4Γ₃)`.
    pub fn core_boundary(&self) -> T {
        self.sigma * self.sigma * self.sigma / (lit::<T>(4.0) * self.moments.gamma3)
    }
}

fn truncation_index<T: Real>(rp: &RadialParam<T>, tol: T) -> Result<usize> {
    let y = rp.one_minus_pow(T::one());
    // 2 t^{K+1} / (1−t)² < tol  ⇔  K + 1 > ln(tol (1−t)²/2) / ln t
    let bound = (tol * y * y / lit(2.0)).ln() / (-rp.r());
    let k = bound.ceil().max(T::one());
    if k > lit(DEFAULT_TRUNCATION_CAP as f64) {
        return Err(Error::TruncationCap { r: to_f64(rp.r()), cap: DEFAULT_TRUNCATION_CAP });
    }
    Ok(k.to_usize().expect("bounded by cap"))
}

pub fn phi_z<T: Real>(family: &FactorFamily, rp: &RadialParam<T>, theta: T, tol: T) -> Result<CharFnSample<T>> {
    Ok(CharFn::new(family, rp, tol)?.phi_z(theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    AdaptiveSimpson,
    GaussKronrod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongGaussian<T> {
    pub value: T,
    pub error_estimate: T,
    /// `σ³/(4Γ₃)`, where the integration domain is split.
    pub core_boundary: T,
    pub evaluations: usize,
}

/// Breakpoints on `[0, πσ]`: the core boundary, its doublings, and a panel
/// width cap of `σr/4`, which is the scale of the structure of `|φ_X|` in `α`.
fn strong_gaussian_breakpoints<T: Real>(cf: &CharFn<T>) -> Vec<T> {
    let end = T::PI() * cf.sigma;
    let b = cf.core_boundary();
    let mut seeds = vec![T::zero()];
    let mut x = b;
    while x < end {
        seeds.push(x);
        x *= lit(2.0);
    }
    seeds.push(end);
    let cap = cf.sigma * cf.rp.r() / lit(4.0);
    let mut out = vec![T::zero()];
    for w in seeds.windows(2) {
        let pieces = ((w[1] - w[0]) / cap).ceil().max(T::one());
        let n = pieces.to_usize().unwrap_or(1);
        for i in 1..=n {
            out.push(if i == n { w[1] } else { w[0] + (w[1] - w[0]) * from_usize(i) / pieces });
        }
    }
    out
}

/// `∫_{−πσ}^{πσ} |φ_Z(x) − e^{−x²/2}| dx`.
pub fn strong_gaussian_integral<T: Real>(
    family: &FactorFamily,
    rp: &RadialParam<T>,
    quad_tol: T,
) -> Result<StrongGaussian<T>> {
    let cf = CharFn::new(family, rp, lit(DEFAULT_CHARFN_TOL))?;
    strong_gaussian_with(&cf, quad_tol, QuadRule::AdaptiveSimpson)
}

pub fn strong_gaussian_with<T: Real>(cf: &CharFn<T>, quad_tol: T, rule: QuadRule) -> Result<StrongGaussian<T>> {
    if !(quad_tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("quad_tol must be positive, got {quad_tol}")));
    }
    let bp = strong_gaussian_breakpoints(cf);
    let integrand = |x: T| {
        let phi = cf.phi_z(x).value;
        let g = (-x * x / lit(2.0)).exp();
        (phi - Complex::new(g, T::zero())).norm()
    };
    // symmetric about 0: integrate [0, πσ] and double
    let half_tol = quad_tol / lit(2.0);
    let q: QuadResult<T> = match rule {
        QuadRule::AdaptiveSimpson => adaptive_simpson_panels(integrand, &bp, half_tol, DEFAULT_MAX_DEPTH),
        QuadRule::GaussKronrod => gauss_kronrod_panels(integrand, &bp, half_tol, DEFAULT_MAX_SUBDIVISIONS.max(4 * bp.len())),
    }
    .map_err(|e| match e {
        Error::QuadratureNotConverged { partial, error_estimate } => {
            Error::QuadratureNotConverged { partial: 2.0 * partial, error_estimate: 2.0 * error_estimate }
        }
        other => other,
    })?;
    let two = lit::<T>(2.0);
    Ok(StrongGaussian {
        value: two * q.value,
        error_estimate: two * q.error_estimate,
        core_boundary: cf.core_boundary(),
        evaluations: q.evaluations,
    })
}

/// `|φ|² ≤ exp(−ξ² E Z² + (4/3)|ξ|³ E|Z|³)` up to [`CRAMER_SLACK`].
pub fn cramer_bound_check<T: Real>(second: T, abs_third: T, phi_abs: T, xi: T) -> bool {
    let a = xi.abs();
    let bound = (-a * a * second + lit::<T>(4.0) / lit(3.0) * a * a * a * abs_third).exp();
    phi_abs * phi_abs <= bound + lit(CRAMER_SLACK)
}

/// The sharper branch: for `|ξ| ≤ E Z²/(2 E|Z|³)`, `|φ|² ≤ exp(−ξ² E Z²/3)`.
/// `None` outside that range.
pub fn cramer_sharp_check<T: Real>(second: T, abs_third: T, phi_abs: T, xi: T) -> Option<bool> {
    let a = xi.abs();
    if a > second / (lit::<T>(2.0) * abs_third) {
        return None;
    }
    let bound = (-a * a * second / lit(3.0)).exp();
    Some(phi_abs * phi_abs <= bound + lit(CRAMER_SLACK))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CramerReport<T> {
    pub xi_max: T,
    pub checked: usize,
    pub violations: usize,
    pub sharp_checked: usize,
    pub sharp_violations: usize,
}

impl<T> CramerReport<T> {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.sharp_violations == 0
    }
}

/// Applies the moment bound to `Z_t` with `E Z² = 1` and `E|Z|³` replaced by
/// `Γ₃/σ³`, which is how the per-factor bounds multiply out, on `points`
/// values of `ξ` spread over `(0, σ³/(4Γ₃)]`.
pub fn cramer_grid_check<T: Real>(cf: &CharFn<T>, points: usize) -> CramerReport<T> {
    let third = cf.moments.gamma3 / (cf.sigma * cf.sigma * cf.sigma);
    let xi_max = cf.core_boundary();
    let mut report = CramerReport { xi_max, checked: 0, violations: 0, sharp_checked: 0, sharp_violations: 0 };
    for i in 0..=points {
        let xi = xi_max * from_usize(i) / from_usize(points.max(1));
        let a = cf.phi_z(xi).value.norm();
        report.checked += 1;
        if !cramer_bound_check(T::one(), third, a, xi) {
            report.violations += 1;
        }
        if let Some(ok) = cramer_sharp_check(T::one(), third, a, xi) {
            report.sharp_checked += 1;
            if !ok {
                report.sharp_violations += 1;
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaAReport<T> {
    /// `σ³/(4Γ₃)`.
    pub boundary: T,
    /// `boundary · √r`, which tends to `1/(4C₃)`.
    pub boundary_scaled: T,
    /// `max(|φ_Z(θ)| − e^{−θ²/3})` over the grid.
    pub max_violation: T,
    pub points: usize,
}

impl<T: Real> LemmaAReport<T> {
    pub fn passed(&self) -> bool {
        self.max_violation <= lit(REGION_SLACK)
    }
}

/// Checks `|φ_Z(θ)| ≤ e^{−θ²/3}` at `θ = 0` and on a log-spaced grid in
/// `[boundary·10⁻³, boundary]`.
pub fn lemma_a_region_check<T: Real>(cf: &CharFn<T>) -> LemmaAReport<T> {
    let b = cf.core_boundary();
    let lo = b * lit(1e-3);
    let mut max_violation = cf.phi_z(T::zero()).value.norm() - T::one();
    for theta in log_grid(lo, b, REGION_POINTS) {
        let v = cf.phi_z(theta).value.norm() - (-theta * theta / lit(3.0)).exp();
        max_violation = max_violation.max(v);
    }
    LemmaAReport {
        boundary: b,
        boundary_scaled: b * cf.rp.r().sqrt(),
        max_violation,
        points: REGION_POINTS + 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaBReport<T> {
    pub c: T,
    pub theta_min: T,
    pub theta_max: T,
    /// `max ln|φ_Z|` over the grid.
    pub max_log_abs: T,
    /// `−r · max ln|φ_Z|`.
    pub b_emp: T,
    /// Grid points where `ln|φ_Z(θ)|` exceeds the distinct-parts bound at
    /// the actual angle `α = θ/σ`; `None` for other families.
    pub analytic_violations: Option<usize>,
    pub edge_log_abs: T,
    /// The distinct-parts bound with angle `Cr`, compared at `θ = πσ`.
    pub edge_bound: Option<T>,
    pub points: usize,
}

impl<T: Real> LemmaBReport<T> {
    pub fn passed(&self) -> bool {
        self.b_emp > T::zero()
            && self.analytic_violations.is_none_or(|v| v == 0)
            && self.edge_bound.is_none_or(|b| self.edge_log_abs <= b + lit(REGION_SLACK))
    }
}

/// `(1/4)((t cos α − t²)/(1 − 2t cos α + t²) − t/(1−t))`, an upper bound on
/// `ln|φ_X(α)|` for distinct parts.
pub fn distinct_log_abs_bound<T: Real>(t: T, alpha: T) -> T {
    let ca = alpha.cos();
    let one = T::one();
    let quarter = lit::<T>(0.25);
    quarter * ((t * ca - t * t) / (one - lit::<T>(2.0) * t * ca + t * t) - t / (one - t))
}

/// Samples `θ ∈ [C/√r, πσ]` on a log-spaced grid.
pub fn lemma_b_region_check<T: Real>(family: &FactorFamily, cf: &CharFn<T>, c: T) -> Result<LemmaBReport<T>> {
    if !(c > T::zero()) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    let r = cf.rp.r();
    let t = cf.rp.t();
    let lo = c / r.sqrt();
    let hi = T::PI() * cf.sigma;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty region: C/sqrt(r) = {lo} is not below pi*sigma = {hi}")));
    }
    let distinct = matches!(family, FactorFamily::DistinctParts);
    let mut max_log = T::neg_infinity();
    let mut violations = 0usize;
    let mut edge = T::zero();
    let grid = log_grid(lo, hi, REGION_POINTS);
    for &theta in &grid {
        let s = cf.phi_z(theta);
        max_log = max_log.max(s.log_abs);
        if distinct && s.log_abs > distinct_log_abs_bound(t, theta / cf.sigma) + lit(REGION_SLACK) {
            violations += 1;
        }
        edge = s.log_abs;
    }
    Ok(LemmaBReport {
        c,
        theta_min: lo,
        theta_max: hi,
        max_log_abs: max_log,
        b_emp: -r * max_log,
        analytic_violations: distinct.then_some(violations),
        edge_log_abs: edge,
        edge_bound: distinct.then(|| distinct_log_abs_bound(t, c * r)),
        points: grid.len(),
    })
}

/// `n` points from `lo` to `hi` inclusive, evenly spaced in `ln θ`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n <= 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * from_usize(i) / from_usize(n - 1)).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cf(r: f64) -> CharFn<f64> {
        CharFn::new(&FactorFamily::DistinctParts, &RadialParam::from_r(r).unwrap(), DEFAULT_CHARFN_TOL).unwrap()
    }

    #[test]
    fn value_at_zero_is_one() {
        let s = cf(0.1).phi_z(0.0);
        assert_eq!(s.value, Complex::new(1.0, 0.0));
        assert_eq!(s.log_abs, 0.0);
    }

    #[test]
    fn conjugate_symmetry_and_modulus() {
        let c = cf(0.1);
        let a = c.phi_z(0.7).value;
        let b = c.phi_z(-0.7).value;
        assert!((a - b.conj()).norm() < 1e-14);
        for i in 0..50 {
            let theta = i as f64 * 3.7;
            assert!(c.phi_z(theta).value.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn geometric_factor_log_matches_direct_ratio() {
        let rp = RadialParam::from_r(0.3f64).unwrap();
        let c = CharFn::new(&FactorFamily::GeometricParts, &rp, 1e-14).unwrap();
        let alpha = 0.37;
        let t = rp.t();
        let mut direct = Complex::new(0.0, 0.0);
        for k in 1..400 {
            let q = t.powi(k);
            let w = Complex::from_polar(q, alpha * k as f64);
            direct += (Complex::new(1.0 - q, 0.0) / (Complex::new(1.0, 0.0) - w)).ln();
        }
        assert!((c.log_phi_x(alpha) - direct).norm() < 1e-12);
    }

    #[test]
    fn custom_matches_builtin() {
        let factors: Vec<Vec<i64>> = (1..=300)
            .map(|k| {
                let mut f = vec![0; k + 1];
                f[0] = 1;
                f[k] = 1;
                f
            })
            .collect();
        let refs: Vec<&[i64]> = factors.iter().map(Vec::as_slice).collect();
        let fam = FactorFamily::custom_integers(&refs).unwrap();
        let rp = RadialParam::from_r(0.2).unwrap();
        let a = CharFn::new(&fam, &rp, 1e-13).unwrap();
        let b = cf(0.2);
        for theta in [0.3, 1.0, 2.5] {
            assert!((a.phi_z(theta).value - b.phi_z(theta).value).norm() < 1e-10);
        }
    }

    #[test]
    fn cramer_two_point_law() {
        let p: f64 = 0.3;
        let second = p * (1.0 - p);
        let third = (1.0 - p) * p.powi(3) + p * (1.0 - p).powi(3);
        for i in -30..=30 {
            let xi = i as f64 / 10.0;
            let phi = Complex::new(1.0 - p, 0.0) * Complex::from_polar(1.0, -xi * p)
                + Complex::new(p, 0.0) * Complex::from_polar(1.0, xi * (1.0 - p));
            assert!(cramer_bound_check(second, third, phi.norm(), xi), "xi = {xi}");
            assert_ne!(cramer_sharp_check(second, third, phi.norm(), xi), Some(false));
        }
        assert!(cramer_bound_check(1.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn cramer_on_radial_variable() {
        let rep = cramer_grid_check(&cf(0.1), 64);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.sharp_checked, rep.checked);
    }

    #[test]
    fn small_theta_region() {
        let rep = lemma_a_region_check(&cf(0.1));
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.max_violation <= 0.0);
    }

    #[test]
    fn far_region_is_exponentially_small() {
        let c = cf(0.1);
        let rep = lemma_b_region_check(&FactorFamily::DistinctParts, &c, 1.0).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.max_log_abs <= 0.0);
        assert!(lemma_b_region_check(&FactorFamily::DistinctParts, &c, 1e6).is_err());
    }

    #[test]
    fn strong_gaussian_rules_agree() {
        let c = cf(0.1);
        let s = strong_gaussian_with(&c, 1e-8, QuadRule::AdaptiveSimpson).unwrap();
        let g = strong_gaussian_with(&c, 1e-8, QuadRule::GaussKronrod).unwrap();
        assert!((s.value - g.value).abs() < 1e-6, "{} vs {}", s.value, g.value);
        assert_relative_eq!(s.value, 0.69347, max_relative = 1e-4);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.5f64, 8.0, 5);
        assert_eq!(g.len(), 5);
        assert_relative_eq!(g[0], 0.5);
        assert_eq!(g[4], 8.0);
        assert_relative_eq!(g[2], 2.0, max_relative = 1e-14);
    }

    fn distinct_custom(factors: usize) -> FactorFamily {
        let fs: Vec<Vec<i64>> = (1..=factors)
            .map(|k| {
                let mut f = vec![0; k + 1];
                f[0] = 1;
                f[k] = 1;
                f
            })
            .collect();
        let refs: Vec<&[i64]> = fs.iter().map(Vec::as_slice).collect();
        FactorFamily::custom_integers(&refs).unwrap()
    }

    #[test]
    fn custom_charfn_against_convolved_distribution() {
        let n_factors = 200;
        let fam = distinct_custom(n_factors);
        for r in [0.2f64, 0.1] {
            let rp = RadialParam::from_r(r).unwrap();
            let t = rp.t();
            // law of Σ k·B_k by direct convolution of the two-point laws
            let top = n_factors * (n_factors + 1) / 2;
            let mut p = vec![0.0f64; top + 1];
            p[0] = 1.0;
            let mut reach = 0;
            for k in 1..=n_factors {
                let q = t.powi(k as i32) / (1.0 + t.powi(k as i32));
                reach += k;
                for n in (0..=reach).rev() {
                    let moved = if n >= k { p[n - k] * q } else { 0.0 };
                    p[n] = p[n] * (1.0 - q) + moved;
                }
            }
            let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
            let var: f64 = p.iter().enumerate().map(|(n, w)| (n as f64 - mean).powi(2) * w).sum();
            let sigma = var.sqrt();
            let c = CharFn::new(&fam, &rp, DEFAULT_CHARFN_TOL).unwrap();
            assert_relative_eq!(c.sigma(), sigma, max_relative = 1e-9);
            for theta in [0.1, 0.5, 1.0, 2.0, 5.0, 17.0] {
                let mut z = Complex::new(0.0, 0.0);
                for (n, w) in p.iter().enumerate() {
                    z += Complex::from_polar(*w, theta * (n as f64 - mean) / sigma);
                }
                let got = c.phi_z(theta).value;
                assert!((got - z).norm() < 1e-8, "r = {r}, θ = {theta}: {got} vs {z}");
            }
        }
    }

    #[test]
    fn pointwise_gaussian_limit() {
        let grid = [0.5, 0.2, 0.1, 0.05, 0.02];
        for theta in [0.5f64, 1.0, 2.0] {
            let gauss = (-theta * theta / 2.0).exp();
            let dev: Vec<f64> = grid.iter().map(|&r| (cf(r).phi_z(theta).value - gauss).norm()).collect();
            assert!(dev.windows(2).all(|w| w[1] < w[0]), "θ = {theta}: {dev:?}");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use proptest::test_runner::{Config, RngSeed};

        proptest! {
            #![proptest_config(Config { cases: 64, rng_seed: RngSeed::Fixed(13), ..Config::default() })]

            #[test]
            fn modulus_and_conjugate_symmetry(r in 0.05f64..2.0, theta in -200.0f64..200.0, geometric in any::<bool>()) {
                let fam = if geometric { FactorFamily::GeometricParts } else { FactorFamily::DistinctParts };
                let c = CharFn::new(&fam, &RadialParam::from_r(r).unwrap(), DEFAULT_CHARFN_TOL).unwrap();
                let a = c.phi_z(theta).value;
                let b = c.phi_z(-theta).value;
                prop_assert!(a.norm() <= 1.0 + 1e-12);
                prop_assert!((a - b.conj()).norm() <= 1e-12);
            }

            #[test]
            fn cramer_holds_on_finite_laws(
                atoms in prop::collection::vec((0u32..20, 0.01f64..1.0), 2..7),
                xi in -5.0f64..5.0,
            ) {
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                let mean: f64 = atoms.iter().map(|&(v, w)| v as f64 * w / total).sum();
                let second: f64 = atoms.iter().map(|&(v, w)| (v as f64 - mean).powi(2) * w / total).sum();
                let third: f64 = atoms.iter().map(|&(v, w)| (v as f64 - mean).abs().powi(3) * w / total).sum();
                let phi: Complex<f64> = atoms.iter().map(|&(v, w)| Complex::from_polar(w / total, xi * (v as f64 - mean))).sum();
                prop_assert!(cramer_bound_check(second, third, phi.norm(), xi));
                prop_assert!(cramer_sharp_check(second, third, phi.norm(), xi).unwrap_or(true));
            }
        }
    }
}
