//! Per-factor laws of the radial family and the aggregate series
//! `m(t) = Σ E X_k`, `σ²(t) = Σ Var X_k`, `Γ₃(t) = Σ E|X_k − E X_k|³`.
//!
//! Infinite families are truncated at the first `K` whose rigorous tail
//! bound drops below `tol` times the smallest of the three partial sums.

use crate::error::{Error, Result};
use crate::format::fmt_sig17;
use crate::quadrature::{adaptive_simpson_panels, DEFAULT_MAX_DEPTH};
use crate::real::{from_usize, lit, to_f64, Real};
use crate::series_core::FactorFamily;
use crate::summation::CompensatedSum;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_TRUNCATION_CAP: u64 = 100_000_000;

/// The coupled pair `(r, t)` with `t = e^{-r}`, `0 < t < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialParam<T> {
    r: T,
    t: T,
}

impl<T: Real> RadialParam<T> {
    pub fn from_r(r: T) -> Result<Self> {
        if !(r > T::zero() && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("r must be positive and finite, got {r}")));
        }
        let t = (-r).exp();
        if !(t > T::zero() && t < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "r = {r} gives t = e^-r outside (0, 1) at this precision"
            )));
        }
        Ok(Self { r, t })
    }

    pub fn from_t(t: T) -> Result<Self> {
        if !(t > T::zero() && t < T::one()) {
            return Err(Error::InvalidParameter(format!("t must lie in (0, 1), got {t}")));
        }
        Ok(Self { r: -t.ln(), t })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// `t^x = e^{-r x}`.
    pub fn pow(&self, x: T) -> T {
        (-self.r * x).exp()
    }

    /// `1 - t^x`, accurate when `t^x` is close to 1.
    pub fn one_minus_pow(&self, x: T) -> T {
        -(-self.r * x).exp_m1()
    }
}

/// Law of `X_{k,t}` with `P(X = j) = a_{j,k} t^j / f_k(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorLaw<T> {
    pub k: usize,
    pub support: Vec<(u64, T)>,
    pub mean: T,
    pub variance: T,
    pub abs_central_3: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FactorMoments<T> {
    pub mean: T,
    pub variance: T,
    pub abs3: T,
}

impl<T: Real> FactorMoments<T> {
    fn zero() -> Self {
        Self { mean: T::zero(), variance: T::zero(), abs3: T::zero() }
    }
}

fn distinct_moments<T: Real>(k: usize, rp: &RadialParam<T>) -> FactorMoments<T> {
    let kk = from_usize::<T>(k);
    let q = rp.pow(kk);
    let d = T::one() + q;
    FactorMoments {
        mean: kk * q / d,
        variance: kk * kk * q / (d * d),
        abs3: kk * kk * kk * (q * q * q + q) / (d * d * d * d),
    }
}

// X = k·G with P(G = j) = (1 - q) q^j. Uses |x|³ = x³ + 2(-x)³·1{x<0}
// together with the geometric third central moment q(1+q)/(1-q)³.
fn geometric_moments<T: Real>(k: usize, rp: &RadialParam<T>) -> FactorMoments<T> {
    let kk = from_usize::<T>(k);
    let q = rp.pow(kk);
    let p = rp.one_minus_pow(kk);
    let mu = q / p;
    let mut below = CompensatedSum::new();
    let mut j = 0usize;
    let mut prob = p;
    while from_usize::<T>(j) < mu {
        let d = mu - from_usize(j);
        below.add(d * d * d * prob);
        prob *= q;
        j += 1;
    }
    let third = q * (T::one() + q) / (p * p * p) + lit::<T>(2.0) * below.value();
    FactorMoments {
        mean: kk * mu,
        variance: kk * kk * q / (p * p),
        abs3: kk * kk * kk * third,
    }
}

// Finite law on the exponents of a polynomial factor.
fn custom_distribution<T: Real>(coeffs: &[T], rp: &RadialParam<T>) -> Vec<(u64, T)> {
    let weights: Vec<(u64, T)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > T::zero())
        .map(|(j, &c)| (j as u64, c * rp.pow(from_usize(j))))
        .collect();
    let total: T = weights.iter().map(|w| w.1).collect::<CompensatedSum<T>>().value();
    weights.into_iter().map(|(j, w)| (j, w / total)).collect()
}

fn moments_of_support<T: Real>(support: &[(u64, T)]) -> FactorMoments<T> {
    let mean = support
        .iter()
        .map(|&(j, p)| T::from_u64(j).expect("degree fits") * p)
        .collect::<CompensatedSum<T>>()
        .value();
    let mut var = CompensatedSum::new();
    let mut abs3 = CompensatedSum::new();
    for &(j, p) in support {
        let d = (T::from_u64(j).expect("degree fits") - mean).abs();
        var.add(d * d * p);
        abs3.add(d * d * d * p);
    }
    FactorMoments { mean, variance: var.value(), abs3: abs3.value() }
}

pub(crate) fn factor_moments<T: Real>(family: &FactorFamily, k: usize, rp: &RadialParam<T>) -> FactorMoments<T> {
    match family {
        FactorFamily::DistinctParts => distinct_moments(k, rp),
        FactorFamily::GeometricParts => geometric_moments(k, rp),
        FactorFamily::CustomPolynomial(c) => match c.factor_approx::<T>(k) {
            Some(coeffs) => moments_of_support(&custom_distribution(&coeffs, rp)),
            None => FactorMoments::zero(),
        },
    }
}

/// Law of the `k`-th factor (`k ≥ 1`). The geometric support is cut where
/// the remaining mass drops below `1e-17`.
pub fn factor_law<T: Real>(family: &FactorFamily, k: usize, rp: &RadialParam<T>) -> FactorLaw<T> {
    assert!(k >= 1, "factor index starts at 1");
    let kk = from_usize::<T>(k);
    let support = match family {
        FactorFamily::DistinctParts => {
            let q = rp.pow(kk);
            vec![(0, T::one() / (T::one() + q)), (k as u64, q / (T::one() + q))]
        }
        FactorFamily::GeometricParts => {
            let q = rp.pow(kk);
            let p = rp.one_minus_pow(kk);
            let cutoff = lit::<T>(1e-17);
            // mass beyond the first j atoms is exactly q^j
            let mut out = Vec::new();
            let mut qj = T::one();
            let mut j = 0u64;
            while qj > cutoff && j < 10_000_000 {
                out.push((j * k as u64, p * qj));
                qj *= q;
                j += 1;
            }
            out
        }
        FactorFamily::CustomPolynomial(c) => match c.factor_approx::<T>(k) {
            Some(coeffs) => custom_distribution(&coeffs, rp),
            None => vec![(0, T::one())],
        },
    };
    let m = factor_moments(family, k, rp);
    FactorLaw { k, support, mean: m.mean, variance: m.variance, abs_central_3: m.abs3 }
}

/// Aggregate moments at one radial point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary<T> {
    pub rp: RadialParam<T>,
    pub m: T,
    pub sigma2: T,
    pub gamma3: T,
    pub sup_var_ratio: T,
    pub truncation_k: u64,
    /// Bound on the neglected tail relative to the smallest partial sum.
    pub tail_bound: T,
}

impl<T: Real> MomentSummary<T> {
    pub const CSV_HEADER: &'static str = "r,t,m,sigma2,gamma3,sup_var_ratio,truncation_k,tail_bound";

    pub fn sigma(&self) -> T {
        self.sigma2.sqrt()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt_sig17(self.rp.r()),
            fmt_sig17(self.rp.t()),
            fmt_sig17(self.m),
            fmt_sig17(self.sigma2),
            fmt_sig17(self.gamma3),
            fmt_sig17(self.sup_var_ratio),
            self.truncation_k,
            fmt_sig17(self.tail_bound)
        )
    }
}

/// Exact `Σ_{j>K} j³ x^j` for `0 < x < 1`.
pub fn cubic_power_tail<T: Real>(x: T, k: u64) -> T {
    let a = T::from_u64(k + 1).expect("index fits");
    let one = T::one();
    let three = lit::<T>(3.0);
    let y = one - x;
    let xa = (a * x.ln()).exp();
    xa * (a * a * a / y
        + three * a * a * x / (y * y)
        + three * a * x * (one + x) / (y * y * y)
        + x * (one + lit::<T>(4.0) * x + x * x) / (y * y * y * y))
}

/// Constant `c` such that each per-factor mean, variance and absolute
/// third central moment is at most `c·k³t^k`.
fn tail_constant<T: Real>(family: &FactorFamily, rp: &RadialParam<T>) -> T {
    match family {
        FactorFamily::DistinctParts => T::one(),
        FactorFamily::GeometricParts => {
            let y = rp.one_minus_pow(T::one());
            lit::<T>(28.0) / (y * y * y)
        }
        FactorFamily::CustomPolynomial(_) => T::zero(),
    }
}

fn tail_abs<T: Real>(family: &FactorFamily, rp: &RadialParam<T>, k: u64) -> T {
    tail_constant(family, rp) * cubic_power_tail(rp.t(), k)
}

pub fn aggregate_moments<T: Real>(family: &FactorFamily, rp: &RadialParam<T>, tol: T) -> Result<MomentSummary<T>> {
    aggregate_moments_capped(family, rp, tol, DEFAULT_TRUNCATION_CAP)
}

pub fn aggregate_moments_capped<T: Real>(
    family: &FactorFamily,
    rp: &RadialParam<T>,
    tol: T,
    cap: u64,
) -> Result<MomentSummary<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let mut m = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    let mut g3 = CompensatedSum::new();
    let mut max_var = T::zero();

    let (k_end, tail) = if let FactorFamily::CustomPolynomial(c) = family {
        for k in 1..=c.len() {
            let fm = factor_moments(family, k, rp);
            m.add(fm.mean);
            s2.add(fm.variance);
            g3.add(fm.abs3);
            max_var = max_var.max(fm.variance);
        }
        (c.len() as u64, T::zero())
    } else {
        // every partial sum is at most tail(0), so this is a sound infeasibility test
        if cubic_power_tail(rp.t(), cap) > tol * cubic_power_tail(rp.t(), 0) {
            return Err(Error::TruncationCap { r: to_f64(rp.r()), cap });
        }
        let mut k = 0u64;
        loop {
            k += 1;
            let fm = factor_moments(family, k as usize, rp);
            m.add(fm.mean);
            s2.add(fm.variance);
            g3.add(fm.abs3);
            max_var = max_var.max(fm.variance);
            let smallest = m.value().min(s2.value()).min(g3.value());
            let tail = tail_abs(family, rp, k);
            if smallest > T::zero() && tail <= tol * smallest {
                break (k, tail);
            }
            if k >= cap {
                return Err(Error::TruncationCap { r: to_f64(rp.r()), cap });
            }
        }
    };

    let (m, sigma2, gamma3) = (m.value(), s2.value(), g3.value());
    if !(sigma2 > T::zero()) {
        return Err(Error::InvalidFamily("the radial law is degenerate (zero variance)".into()));
    }
    let smallest = m.min(sigma2).min(gamma3);
    Ok(MomentSummary {
        rp: *rp,
        m,
        sigma2,
        gamma3,
        sup_var_ratio: max_var.max(tail) / sigma2,
        truncation_k: k_end,
        tail_bound: tail / smallest,
    })
}

/// `π² / (12 r²)`.
pub fn m1<T: Real>(rp: &RadialParam<T>) -> T {
    T::PI() * T::PI() / (lit::<T>(12.0) * rp.r() * rp.r())
}

/// `π² / (6 r³)`.
pub fn sigma1_sq<T: Real>(rp: &RadialParam<T>) -> T {
    T::PI() * T::PI() / (lit::<T>(6.0) * rp.r() * rp.r() * rp.r())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma3Constant<T> {
    /// `C = ∫₀^∞ u³(e^{-3u} + e^{-u})/(1 + e^{-u})⁴ du`.
    pub c: T,
    /// `C / (π²/6)^{3/2}`.
    pub c3: T,
    pub error_estimate: T,
}

/// Integrand of the `Γ₃` constant, written in `e^{-u}` to avoid overflow.
pub fn gamma3_integrand<T: Real>(u: T) -> T {
    let e = (-u).exp();
    let d = T::one() + e;
    u * u * u * (e * e * e + e) / (d * d * d * d)
}

pub fn gamma3_constant<T: Real>() -> Result<Gamma3Constant<T>> {
    // integrand < 2u³e^{-u}, below 1e-28 past u = 80
    let bp: Vec<T> = [0.0, 1.0, 3.0, 6.0, 12.0, 24.0, 48.0, 80.0].iter().map(|&x| lit(x)).collect();
    let tol = lit::<T>(1e-12).max(T::epsilon() * lit(16.0));
    let q = adaptive_simpson_panels(gamma3_integrand, &bp, tol, DEFAULT_MAX_DEPTH)?;
    let z2 = T::PI() * T::PI() / lit(6.0);
    Ok(Gamma3Constant { c: q.value, c3: q.value / (z2 * z2.sqrt()), error_estimate: q.error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn rp(r: f64) -> RadialParam<f64> {
        RadialParam::from_r(r).unwrap()
    }

    #[test]
    fn radial_param_validation() {
        assert!(RadialParam::from_r(0.0f64).is_err());
        assert!(RadialParam::from_r(f64::NAN).is_err());
        assert!(RadialParam::from_r(1e-20f64).is_err());
        assert!(RadialParam::from_t(1.0f64).is_err());
        let p = RadialParam::from_t(0.5f64).unwrap();
        assert_relative_eq!(p.r(), 2f64.ln());
        let q = rp(0.1);
        assert!((q.r() + q.t().ln()).abs() <= 1e-15 * q.r());
    }

    #[test]
    fn two_point_law_at_half() {
        let p = RadialParam::from_t(0.5f64).unwrap();
        let law = factor_law(&FactorFamily::DistinctParts, 1, &p);
        assert_relative_eq!(law.mean, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(law.variance, 2.0 / 9.0, epsilon = 1e-15);
        assert_eq!(law.support.len(), 2);
        assert_eq!(law.support[1].0, 1);
    }

    #[test]
    fn mean_collapses_as_t_vanishes() {
        let law = factor_law(&FactorFamily::DistinctParts, 1, &rp(50.0));
        assert!(law.mean < 1e-21);
    }

    #[test]
    fn abs_third_moment_golden() {
        let law = factor_law(&FactorFamily::DistinctParts, 3, &rp(0.1));
        assert_relative_eq!(law.abs_central_3, 3.373341643296886, max_relative = 1e-14);
        // against the two-point support directly
        let direct: f64 = law.support.iter().map(|&(v, p)| (v as f64 - law.mean).abs().powi(3) * p).sum();
        assert_relative_eq!(law.abs_central_3, direct, max_relative = 1e-13);
    }

    #[test]
    fn geometric_law_matches_its_support() {
        for &(k, r) in &[(1usize, 0.3f64), (2, 0.05), (5, 0.01), (1, 2.0)] {
            let law = factor_law(&FactorFamily::GeometricParts, k, &rp(r));
            let direct = moments_of_support(&law.support);
            let mass: f64 = law.support.iter().map(|s| s.1).sum();
            assert!((mass - 1.0).abs() < 1e-12);
            assert_relative_eq!(law.mean, direct.mean, max_relative = 1e-10);
            assert_relative_eq!(law.variance, direct.variance, max_relative = 1e-10);
            assert_relative_eq!(law.abs_central_3, direct.abs3, max_relative = 1e-10);
        }
    }

    #[test]
    fn custom_law_reproduces_distinct() {
        let fam = FactorFamily::custom_integers(&[&[1, 1], &[1, 0, 1], &[1, 0, 0, 1]]).unwrap();
        let p = rp(0.4);
        for k in 1..=3 {
            let a = factor_law(&fam, k, &p);
            let b = factor_law(&FactorFamily::DistinctParts, k, &p);
            assert_relative_eq!(a.mean, b.mean, max_relative = 1e-14);
            assert_relative_eq!(a.variance, b.variance, max_relative = 1e-14);
            assert_relative_eq!(a.abs_central_3, b.abs_central_3, max_relative = 1e-13);
        }
        let past = factor_law(&fam, 9, &p);
        assert_eq!(past.support, vec![(0, 1.0)]);
        assert_eq!(past.variance, 0.0);
    }

    #[test]
    fn cubic_tail_closed_form() {
        for &(x, k) in &[(0.5f64, 0u64), (0.9, 3), (0.99, 10), (0.3, 7)] {
            let brute: f64 = ((k + 1)..20_000).map(|j| (j as f64).powi(3) * x.powi(j as i32)).sum();
            assert_relative_eq!(cubic_power_tail(x, k), brute, max_relative = 1e-12);
        }
    }

    #[test]
    fn aggregate_distinct_golden() {
        let s = aggregate_moments(&FactorFamily::DistinctParts, &rp(0.1), 1e-12).unwrap();
        assert_relative_eq!(s.m, 82.20503667574466, max_relative = 1e-13);
        assert!((s.m - m1(&rp(0.1))).abs() <= 1.0 / 0.1);
        assert!((s.sigma2 * 1e-3 / (PI * PI / 6.0) - 1.0).abs() < 0.05);
        assert!(s.tail_bound <= 1e-12);
        assert!(s.sup_var_ratio > 0.0 && s.sup_var_ratio <= 1.0);
        assert!(s.sup_var_ratio <= 4.0 * (-2f64).exp() / 0.01 / s.sigma2);
    }

    #[test]
    fn truncation_matches_longer_sum() {
        let p = rp(0.05);
        let s = aggregate_moments(&FactorFamily::DistinctParts, &p, 1e-12).unwrap();
        let mut m = 0.0;
        for k in 1..=4 * s.truncation_k as usize {
            m += distinct_moments(k, &p).mean;
        }
        assert_relative_eq!(s.m, m, max_relative = 1e-12);
    }

    #[test]
    fn truncation_cap_is_reported() {
        let err = aggregate_moments_capped(&FactorFamily::DistinctParts, &rp(1e-3), 1e-12, 1000).unwrap_err();
        assert_eq!(err.kind(), "truncation_cap");
    }

    #[test]
    fn geometric_aggregate_is_consistent() {
        let p = rp(0.2);
        let s = aggregate_moments(&FactorFamily::GeometricParts, &p, 1e-12).unwrap();
        // Σ k t^k/(1-t^k) by a long direct sum
        let direct: f64 = (1..5000).map(|k| geometric_moments(k, &p).mean).sum();
        assert_relative_eq!(s.m, direct, max_relative = 1e-12);
        assert!(s.sup_var_ratio <= 1.0);
    }

    #[test]
    fn closed_form_equivalents() {
        assert_relative_eq!(m1(&rp(1.0)), PI * PI / 12.0);
        assert_relative_eq!(sigma1_sq(&rp(0.1)), 1644.9340668482262, max_relative = 1e-14);
        assert!(m1(&rp(500.0)) < 1e-5 && sigma1_sq(&rp(500.0)) < 1e-7);
    }

    #[test]
    fn gamma3_constant_against_alternating_series() {
        // C = 2 Σ (-1)^{n-1} (n² + 2)/n³ = 2 ln 2 + 3 ζ(3)
        let zeta3 = 1.202_056_903_159_594_3;
        let c = gamma3_constant::<f64>().unwrap();
        assert_relative_eq!(c.c, 2.0 * 2f64.ln() + 3.0 * zeta3, max_relative = 1e-11);
        assert_relative_eq!(c.c3, 2.3664225358740807, max_relative = 1e-10);
    }

    #[test]
    fn mean_increases_with_t() {
        let ts: Vec<f64> = (0..=16).map(|i| 0.1 + 0.05 * i as f64).chain([0.95, 0.97, 0.99]).collect();
        let ms: Vec<f64> = ts
            .iter()
            .map(|&t| aggregate_moments(&FactorFamily::DistinctParts, &RadialParam::from_t(t).unwrap(), 1e-12).unwrap().m)
            .collect();
        assert!(ms.windows(2).all(|w| w[1] > w[0]), "{ms:?}");
    }

    #[test]
    fn gamma3_approaches_its_scaling() {
        let c = gamma3_constant::<f64>().unwrap().c;
        let dev: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&r| {
                let s = aggregate_moments(&FactorFamily::DistinctParts, &rp(r), 1e-12).unwrap();
                (s.gamma3 * r.powi(4) / c - 1.0).abs()
            })
            .collect();
        assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
        assert!(dev[2] < 0.05, "{dev:?}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use proptest::test_runner::{Config, RngSeed};

        proptest! {
            #![proptest_config(Config { cases: 48, rng_seed: RngSeed::Fixed(11), ..Config::default() })]

            #[test]
            fn summary_invariants(r in 0.01f64..3.0, geometric in any::<bool>()) {
                let fam = if geometric { FactorFamily::GeometricParts } else { FactorFamily::DistinctParts };
                let p = rp(r);
                prop_assert!((p.r() - r).abs() <= f64::EPSILON * r);
                prop_assert!((p.t() - (-r).exp()).abs() <= 2.0 * f64::EPSILON);
                let s = aggregate_moments(&fam, &p, 1e-12).unwrap();
                prop_assert!(s.m > 0.0 && s.sigma2 > 0.0 && s.gamma3 > 0.0);
                prop_assert!(s.truncation_k >= 1);
                prop_assert!(s.tail_bound <= 1e-12);
                prop_assert!(s.sup_var_ratio > 0.0 && s.sup_var_ratio <= 1.0);
                if !geometric {
                    prop_assert!(s.sup_var_ratio <= 4.0 * (-2f64).exp() / (r * r * s.sigma2) * (1.0 + 1e-12));
                }
            }

            #[test]
            fn per_factor_laws_are_normalised(r in 0.02f64..2.0, k in 1usize..30, geometric in any::<bool>()) {
                let fam = if geometric { FactorFamily::GeometricParts } else { FactorFamily::DistinctParts };
                let law = factor_law(&fam, k, &rp(r));
                let mass: f64 = law.support.iter().map(|s| s.1).sum();
                prop_assert!((mass - 1.0).abs() < 1e-12);
                prop_assert!(law.variance >= 0.0);
                // Lyapunov: E|X-μ|³ ≥ Var^{3/2}
                prop_assert!(law.abs_central_3 >= law.variance.powf(1.5) * (1.0 - 1e-12));
            }
        }
    }
}
