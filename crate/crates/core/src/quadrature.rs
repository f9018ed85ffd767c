//! One-dimensional quadrature: adaptive Simpson and adaptive Gauss–Kronrod (7/15).
//!
//! Both rules accept a list of breakpoints. Integrands that change character
//! across a known abscissa should be split there, since a coarse first pass
//! of either rule can step over a narrow bump on a wide interval.

use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};
use crate::summation::CompensatedSum;

pub const DEFAULT_MAX_DEPTH: u32 = 50;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
}

struct Segment<T> {
    a: T,
    fa: T,
    m: T,
    fm: T,
    b: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T, max_depth: u32) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    adaptive_simpson_panels(f, &[a, b], tol, max_depth)
}

/// Adaptive Simpson over consecutive panels `[p_i, p_{i+1}]`; the tolerance
/// is shared out in proportion to panel width.
pub fn adaptive_simpson_panels<T, F>(
    mut f: F,
    breakpoints: &[T],
    tol: T,
    max_depth: u32,
) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    check_breakpoints(breakpoints, tol)?;
    let two = lit::<T>(2.0);
    let six = lit::<T>(6.0);
    let four = lit::<T>(4.0);
    let fifteen = lit::<T>(15.0);
    let floor = T::epsilon() * lit(64.0);
    let span = (breakpoints[breakpoints.len() - 1] - breakpoints[0]).abs();

    let mut total = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    let mut evaluations = 0usize;
    let mut converged = true;
    let mut stack: Vec<Segment<T>> = Vec::new();

    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let m = (a + b) / two;
        let (fa, fm, fb) = (f(a), f(m), f(b));
        evaluations += 3;
        let whole = (b - a) / six * (fa + four * fm + fb);
        let panel_tol = if span > T::zero() { tol * (b - a).abs() / span } else { tol };
        stack.push(Segment { a, fa, m, fm, b, fb, whole, tol: panel_tol, depth: 0 });

        while let Some(s) = stack.pop() {
            let lm = (s.a + s.m) / two;
            let rm = (s.m + s.b) / two;
            let (flm, frm) = (f(lm), f(rm));
            evaluations += 2;
            let left = (s.m - s.a) / six * (s.fa + four * flm + s.fm);
            let right = (s.b - s.m) / six * (s.fm + four * frm + s.fb);
            let delta = left + right - s.whole;
            let unsplittable = lm == s.a || lm == s.m || rm == s.m || rm == s.b;
            let accept = delta.abs() <= fifteen * s.tol
                || delta.abs() <= floor * (left.abs() + right.abs())
                || unsplittable;
            if accept || s.depth >= max_depth {
                if !accept {
                    converged = false;
                }
                total.add(left + right + delta / fifteen);
                err.add(delta.abs() / fifteen);
            } else {
                let half = s.tol / two;
                let depth = s.depth + 1;
                stack.push(Segment {
                    a: s.m, fa: s.fm, m: rm, fm: frm, b: s.b, fb: s.fb,
                    whole: right, tol: half, depth,
                });
                stack.push(Segment {
                    a: s.a, fa: s.fa, m: lm, fm: flm, b: s.m, fb: s.fm,
                    whole: left, tol: half, depth,
                });
            }
        }
    }

    let result = QuadResult { value: total.value(), error_estimate: err.value(), evaluations };
    if converged {
        Ok(result)
    } else {
        Err(Error::QuadratureNotConverged {
            partial: to_f64(result.value),
            error_estimate: to_f64(result.error_estimate),
        })
    }
}

// Kronrod 15-point abscissae (non-negative half) and weights; the Gauss
// 7-point rule uses the odd-indexed abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy)]
struct GkInterval<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> GkInterval<T> {
    let two = lit::<T>(2.0);
    let center = (a + b) / two;
    let half = (b - a) / two;
    let fc = f(center);
    let mut kronrod = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * lit(WG[j / 2]);
        }
    }
    GkInterval { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Globally adaptive Gauss–Kronrod 7/15 over the panels, splitting the
/// interval with the largest error estimate until the summed estimate is
/// below `tol`.
pub fn gauss_kronrod_panels<T, F>(
    mut f: F,
    breakpoints: &[T],
    tol: T,
    max_subdivisions: usize,
) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    check_breakpoints(breakpoints, tol)?;
    let two = lit::<T>(2.0);
    let mut intervals: Vec<GkInterval<T>> = breakpoints
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| gk15(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * intervals.len();
    let floor = T::epsilon() * lit(100.0);

    loop {
        let value: T = intervals.iter().map(|i| i.value).collect::<CompensatedSum<T>>().value();
        let error: T = intervals.iter().map(|i| i.error).collect::<CompensatedSum<T>>().value();
        let abs_scale = intervals.iter().fold(T::zero(), |acc, i| acc + i.value.abs());
        if error <= tol || error <= floor * abs_scale {
            return Ok(QuadResult { value, error_estimate: error, evaluations });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .fold((0usize, -T::one()), |best, (i, iv)| if iv.error > best.1 { (i, iv.error) } else { best });
        let iv = intervals[worst];
        let mid = (iv.a + iv.b) / two;
        if intervals.len() >= max_subdivisions || mid == iv.a || mid == iv.b {
            return Err(Error::QuadratureNotConverged {
                partial: to_f64(value),
                error_estimate: to_f64(error),
            });
        }
        intervals[worst] = gk15(&mut f, iv.a, mid);
        intervals.push(gk15(&mut f, mid, iv.b));
        evaluations += 30;
    }
}

pub fn gauss_kronrod<T, F>(f: F, a: T, b: T, tol: T) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    gauss_kronrod_panels(f, &[a, b], tol, DEFAULT_MAX_SUBDIVISIONS)
}

fn check_breakpoints<T: Real>(breakpoints: &[T], tol: T) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidParameter("quadrature needs at least two breakpoints".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter("quadrature tolerance must be positive".into()));
    }
    if breakpoints.iter().any(|p| !p.is_finite()) || breakpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("breakpoints must be finite and non-decreasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_mass_simpson() {
        let r = adaptive_simpson(|x: f64| (-x * x / 2.0).exp(), -40.0, 40.0, 1e-13, DEFAULT_MAX_DEPTH).unwrap();
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn gaussian_mass_gauss_kronrod() {
        let r = gauss_kronrod(|x: f64| (-x * x / 2.0).exp(), -40.0, 40.0, 1e-13).unwrap();
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn kronrod_is_exact_on_high_degree_polynomials() {
        // K15 integrates degree ≤ 22 exactly on a single panel
        let r = gk15(&mut |x: f64| x.powi(22) + 3.0 * x.powi(7), -1.0, 1.0);
        assert!((r.value - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let r = adaptive_simpson(|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12, 4).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn depth_cap_reports_partial_value() {
        let err = adaptive_simpson(|x: f64| (1.0 / x.max(1e-300)).sin(), 1e-6, 1.0, 1e-14, 6).unwrap_err();
        match err {
            Error::QuadratureNotConverged { partial, .. } => assert!(partial.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn panels_split_tolerance() {
        let bp = [0.0, 1.0, 3.0, 10.0];
        let s = adaptive_simpson_panels(|x: f64| x.exp().recip(), &bp, 1e-12, DEFAULT_MAX_DEPTH).unwrap();
        let g = gauss_kronrod_panels(|x: f64| x.exp().recip(), &bp, 1e-12, 1000).unwrap();
        let exact = 1.0 - (-10.0f64).exp();
        assert!((s.value - exact).abs() < 1e-11);
        assert!((g.value - exact).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(adaptive_simpson(|x: f64| x, 0.0, 1.0, 0.0, 10).is_err());
        assert!(gauss_kronrod_panels(|x: f64| x, &[1.0, 0.0], 1e-6, 10).is_err());
        assert!(gauss_kronrod_panels(|x: f64| x, &[0.0], 1e-6, 10).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let r = adaptive_simpson(|x: f32| x.cos(), 0.0, std::f32::consts::FRAC_PI_2, 1e-5, 30).unwrap();
        assert!((r.value - 1.0).abs() < 1e-5);
    }
}
