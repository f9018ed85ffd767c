//! Saddle points: the exact condition `m(t_n) = n` solved by bisection in
//! `r`, and the closed-form point `τ_n = e^{-ρ_n}`, `ρ_n = π/(2√(3n))`, which
//! solves `m₁(τ_n) = n` for distinct parts.

use std::fmt;

use crate::error::{Error, Result};
use crate::format::fmt_sig17;
use crate::moments::{aggregate_moments, m1, sigma1_sq, RadialParam, DEFAULT_TOL};
use crate::real::{lit, to_f64, Real};
use crate::series_core::FactorFamily;

pub const DEFAULT_SADDLE_TOL: f64 = 1e-9;
/// Each side of the initial bracket `[r₀/4, 4r₀]` is widened by ×4 at most this often.
pub const MAX_BRACKET_WIDENINGS: u32 = 8;
const MAX_BISECTIONS: u32 = 200;
const MONOTONE_GRID: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SaddleMethod {
    NumericExact,
    ClosedFormEquivalent,
}

impl fmt::Display for SaddleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SaddleMethod::NumericExact => "numeric_exact",
            SaddleMethod::ClosedFormEquivalent => "closed_form_equivalent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSolution<T> {
    pub n: u64,
    pub rp: RadialParam<T>,
    pub m_at_solution: T,
    pub method: SaddleMethod,
    pub residual: T,
}

impl<T: Real> SaddleSolution<T> {
    pub const CSV_HEADER: &'static str = "n,method,r,t,m,residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.method,
            fmt_sig17(self.rp.r()),
            fmt_sig17(self.rp.t()),
            fmt_sig17(self.m_at_solution),
            fmt_sig17(self.residual)
        )
    }
}

/// `ρ_n = π / (2√3 √n)`.
pub fn rho_n<T: Real>(n: u64) -> T {
    let n = T::from_u64(n).expect("n fits");
    T::PI() / (lit::<T>(2.0) * lit::<T>(3.0).sqrt() * n.sqrt())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

/// The closed-form point `τ_n`; the residual is `|m₁(τ_n) − n|`.
pub fn tau_n<T: Real>(n: u64) -> Result<SaddleSolution<T>> {
    check_n(n)?;
    let rp = RadialParam::from_r(rho_n::<T>(n))?;
    let m = m1(&rp);
    Ok(SaddleSolution {
        n,
        rp,
        m_at_solution: m,
        method: SaddleMethod::ClosedFormEquivalent,
        residual: (m - T::from_u64(n).expect("n fits")).abs(),
    })
}

fn mean_at<T: Real>(family: &FactorFamily, r: T, moment_tol: T) -> Result<T> {
    let rp = RadialParam::from_r(r)?;
    Ok(aggregate_moments(family, &rp, moment_tol)?.m)
}

/// Solves `m(e^{-r}) = n` by bisection in `r`.
pub fn solve_saddle<T: Real>(family: &FactorFamily, n: u64, tol: T) -> Result<SaddleSolution<T>> {
    check_n(n)?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let target = T::from_u64(n).expect("n fits");
    let goal = tol * target.max(T::one());
    let moment_tol = lit::<T>(DEFAULT_TOL).min(tol * lit(1e-3)).max(T::epsilon() * lit(4.0));
    let four = lit::<T>(4.0);
    let r0 = rho_n::<T>(n);
    let fail = |reason: String| Error::BracketFailure { n, reason };

    // m decreases in r: need m(r_lo) > n > m(r_hi)
    let mut r_lo = r0 / four;
    let mut m_lo = mean_at(family, r_lo, moment_tol)?;
    let mut widen = 0;
    while m_lo <= target {
        if widen == MAX_BRACKET_WIDENINGS {
            return Err(fail(format!(
                "m(e^-r) = {} at r = {} is still below n; n may exceed the range of m",
                to_f64(m_lo),
                to_f64(r_lo)
            )));
        }
        r_lo /= four;
        m_lo = mean_at(family, r_lo, moment_tol)?;
        widen += 1;
    }
    let mut r_hi = r0 * four;
    let mut m_hi = mean_at(family, r_hi, moment_tol)?;
    widen = 0;
    while m_hi >= target {
        let next = r_hi * four;
        if widen == MAX_BRACKET_WIDENINGS || RadialParam::from_r(next).is_err() {
            return Err(fail(format!(
                "m(e^-r) = {} at r = {} is still above n",
                to_f64(m_hi),
                to_f64(r_hi)
            )));
        }
        r_hi = next;
        m_hi = mean_at(family, r_hi, moment_tol)?;
        widen += 1;
    }

    check_monotone_on_bracket(family, n, r_lo, m_lo, r_hi, m_hi, moment_tol)?;

    let two = lit::<T>(2.0);
    let mut best = if (m_lo - target).abs() < (m_hi - target).abs() { (r_lo, m_lo) } else { (r_hi, m_hi) };
    for _ in 0..MAX_BISECTIONS {
        let mid = (r_lo + r_hi) / two;
        if mid <= r_lo || mid >= r_hi {
            break;
        }
        let m_mid = mean_at(family, mid, moment_tol)?;
        if (m_mid - target).abs() < (best.1 - target).abs() {
            best = (mid, m_mid);
        }
        if (m_mid - target).abs() <= goal {
            break;
        }
        if m_mid > target {
            r_lo = mid;
        } else {
            r_hi = mid;
        }
        if r_hi - r_lo < lit(1e-14) {
            break;
        }
    }

    let residual = (best.1 - target).abs();
    if residual > goal {
        return Err(fail(format!(
            "bracket collapsed at r = {} with residual {} above tolerance {}",
            to_f64(best.0),
            to_f64(residual),
            to_f64(goal)
        )));
    }
    Ok(SaddleSolution {
        n,
        rp: RadialParam::from_r(best.0)?,
        m_at_solution: best.1,
        method: SaddleMethod::NumericExact,
        residual,
    })
}

fn check_monotone_on_bracket<T: Real>(
    family: &FactorFamily,
    n: u64,
    r_lo: T,
    m_lo: T,
    r_hi: T,
    m_hi: T,
    moment_tol: T,
) -> Result<()> {
    let ratio = r_hi / r_lo;
    let mut prev = (r_lo, m_lo);
    for i in 1..MONOTONE_GRID {
        let (r, m) = if i + 1 == MONOTONE_GRID {
            (r_hi, m_hi)
        } else {
            let s = lit::<T>(i as f64 / (MONOTONE_GRID - 1) as f64);
            let r = r_lo * ratio.powf(s);
            (r, mean_at(family, r, moment_tol)?)
        };
        if !(m < prev.1) {
            return Err(Error::NotMonotone { n, r_a: to_f64(prev.0), r_b: to_f64(r) });
        }
        prev = (r, m);
    }
    Ok(())
}

/// `(m(τ_n) − m₁(τ_n)) / σ₁(τ_n)`. Only meaningful where `m₁, σ₁` are the
/// equivalents of the family, i.e. distinct parts.
pub fn hypothesis1_gap<T: Real>(family: &FactorFamily, n: u64) -> Result<T> {
    if !matches!(family, FactorFamily::DistinctParts) {
        return Err(Error::Unsupported(format!(
            "closed-form equivalents are only known for distinct parts, not {family}"
        )));
    }
    let tau = tau_n::<T>(n)?;
    let s = aggregate_moments(family, &tau.rp, lit(DEFAULT_TOL))?;
    Ok((s.m - m1(&tau.rp)) / sigma1_sq(&tau.rp).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn tau_goldens() {
        let t1 = tau_n::<f64>(1).unwrap();
        assert_relative_eq!(t1.rp.t(), 0.403_774_113_610_048_6, max_relative = 1e-14);
        let t100 = tau_n::<f64>(100).unwrap();
        assert_relative_eq!(t100.rp.r(), 0.090_689_968_211_710_9, max_relative = 1e-14);
        assert_relative_eq!(t100.rp.t(), 0.9133008192969492, max_relative = 1e-14);
        for n in [1u64, 10, 1_000_000] {
            let s = tau_n::<f64>(n).unwrap();
            assert!(s.residual < 1e-9 * n as f64, "n = {n}: {}", s.residual);
            let want = 4.0 * 3f64.sqrt() / PI * (n as f64).powf(1.5);
            assert_relative_eq!(sigma1_sq(&s.rp), want, max_relative = 1e-13);
        }
        assert!(tau_n::<f64>(0).is_err());
    }

    #[test]
    fn distinct_saddle_at_100() {
        let s = solve_saddle(&FactorFamily::DistinctParts, 100, 1e-9f64).unwrap();
        assert!((s.rp.r() - 0.0907).abs() < 5e-4, "{}", s.rp.r());
        let m = aggregate_moments(&FactorFamily::DistinctParts, &s.rp, 1e-13).unwrap().m;
        assert!((m - 100.0).abs() <= 1e-7);
        assert!(s.residual <= 1e-7);
        assert_eq!(s.method, SaddleMethod::NumericExact);
    }

    #[test]
    fn distinct_saddle_at_1() {
        let s = solve_saddle(&FactorFamily::DistinctParts, 1, 1e-9f64).unwrap();
        let m = aggregate_moments(&FactorFamily::DistinctParts, &s.rp, 1e-13).unwrap().m;
        assert!((m - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn bisection_is_deterministic() {
        let a = solve_saddle(&FactorFamily::DistinctParts, 777, 1e-9f64).unwrap();
        let b = solve_saddle(&FactorFamily::DistinctParts, 777, 1e-9f64).unwrap();
        assert_eq!(a.rp.r().to_bits(), b.rp.r().to_bits());
    }

    #[test]
    fn unreachable_n_is_reported() {
        // m(t) < 3 for every t: the product has total degree 3
        let fam = FactorFamily::custom_integers(&[&[1, 1], &[1, 0, 1]]).unwrap();
        let err = solve_saddle(&fam, 5, 1e-9f64).unwrap_err();
        assert_eq!(err.kind(), "bracket_failure");
        let ok = solve_saddle(&fam, 1, 1e-9f64).unwrap();
        assert!(ok.residual <= 1e-9);
    }

    #[test]
    fn numeric_and_closed_points_converge() {
        let mut prev = f64::INFINITY;
        for n in [100u64, 1000, 10_000] {
            let a = solve_saddle(&FactorFamily::DistinctParts, n, 1e-9f64).unwrap();
            let b = tau_n::<f64>(n).unwrap();
            let dev = (a.rp.r() / b.rp.r() - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn gap_shrinks_and_needs_distinct() {
        let g: Vec<f64> = [100u64, 400, 1600]
            .iter()
            .map(|&n| hypothesis1_gap(&FactorFamily::DistinctParts, n).unwrap())
            .collect();
        assert_relative_eq!(g[0], -8.8727e-4, max_relative = 1e-3);
        assert!(g[0].abs() > g[1].abs() && g[1].abs() > g[2].abs());
        assert_eq!(
            hypothesis1_gap::<f64>(&FactorFamily::GeometricParts, 100).unwrap_err().kind(),
            "unsupported"
        );
    }

    #[test]
    fn csv_row_shape() {
        let s = tau_n::<f64>(100).unwrap();
        assert_eq!(s.csv_row().split(',').count(), SaddleSolution::<f64>::CSV_HEADER.split(',').count());
        assert!(s.csv_row().starts_with("100,closed_form_equivalent,"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use proptest::test_runner::{Config, RngSeed};

        proptest! {
            #![proptest_config(Config { cases: 32, rng_seed: RngSeed::Fixed(17), ..Config::default() })]

            #[test]
            fn residual_within_tolerance(n in 1u64..200_000, geometric in any::<bool>()) {
                let fam = if geometric { FactorFamily::GeometricParts } else { FactorFamily::DistinctParts };
                let tol = 1e-9;
                let s = solve_saddle::<f64>(&fam, n, tol).unwrap();
                prop_assert!(s.residual <= tol * n as f64);
                prop_assert!((s.m_at_solution - n as f64).abs() == s.residual);
                prop_assert!(s.rp.r() > 0.0 && s.rp.t() < 1.0);
            }

            #[test]
            fn closed_point_satisfies_its_equation(n in 1u64..1_000_000_000) {
                let s = tau_n::<f64>(n).unwrap();
                prop_assert!(s.residual <= 1e-9 * n as f64);
            }
        }
    }
}
