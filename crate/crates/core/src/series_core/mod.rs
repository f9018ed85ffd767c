//! Factor families and the exact coefficient oracle.
//!
//! The coefficients of `f = ∏_{k≥1} f_k` up to degree `N` only depend on the
//! first `N` factors: every family here has `f_k = 1 + (terms of degree ≥ k)`,
//! so a factor with index `k > N` contributes exactly `1` modulo `z^{N+1}`.
//! [`expand_product`] relies on this to truncate the infinite product.

mod family;
mod json;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub use family::{CustomFactors, FactorFamily, FamilyKind};
pub use json::parse_exact;

use crate::error::{Error, Result};
use crate::real::Real;

/// Largest `n` accepted by [`brute_force_distinct`].
pub const BRUTE_FORCE_LIMIT: u64 = 60;

/// Exact coefficient storage: integers for the built-in families, rationals
/// for custom polynomial families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficients {
    Integer(Vec<BigUint>),
    Rational(Vec<BigRational>),
}

/// Exact coefficients `a_0..=a_{n_max}` of the truncated product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    n_max: usize,
    coeffs: Coefficients,
}

impl CoefficientTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    /// Integer coefficient at degree `n`, for integer-valued tables.
    pub fn integer(&self, n: usize) -> Option<&BigUint> {
        match &self.coeffs {
            Coefficients::Integer(v) => v.get(n),
            Coefficients::Rational(_) => None,
        }
    }

    /// Coefficient at degree `n` as an exact rational.
    pub fn rational(&self, n: usize) -> Option<BigRational> {
        match &self.coeffs {
            Coefficients::Integer(v) => v.get(n).map(|c| BigRational::from_integer(c.clone().into())),
            Coefficients::Rational(v) => v.get(n).cloned(),
        }
    }

    /// Natural log of `a_n`; `-inf` for a zero coefficient.
    pub fn ln_coefficient<T: Real>(&self, n: usize) -> Option<T> {
        let ln = match &self.coeffs {
            Coefficients::Integer(v) => ln_biguint(v.get(n)?),
            Coefficients::Rational(v) => {
                let c = v.get(n)?;
                if c.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    ln_biguint(&c.numer().magnitude().clone()) - ln_biguint(c.denom().magnitude())
                }
            }
        };
        T::from_f64(ln)
    }

    /// Decimal (or `p/q`) rendering of `a_n`.
    pub fn display(&self, n: usize) -> Option<String> {
        match &self.coeffs {
            Coefficients::Integer(v) => v.get(n).map(ToString::to_string),
            Coefficients::Rational(v) => v.get(n).map(ToString::to_string),
        }
    }
}

/// Natural logarithm of an arbitrary-size non-negative integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head fits f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact coefficients of `∏_{k=1}^{n_max} f_k` up to degree `n_max`.
pub fn expand_product(family: &FactorFamily, n_max: usize) -> Result<CoefficientTable> {
    family.validate()?;
    let coeffs = match family {
        FactorFamily::DistinctParts => Coefficients::Integer(distinct_table(n_max)),
        FactorFamily::GeometricParts => {
            let mut a = unit_series(n_max);
            // multiply by 1/(1 - z^k): ascending update reuses already-updated entries
            for k in 1..=n_max {
                for n in k..=n_max {
                    let (lo, hi) = a.split_at_mut(n);
                    hi[0] += &lo[n - k];
                }
            }
            Coefficients::Integer(a)
        }
        FactorFamily::CustomPolynomial(custom) => {
            let mut a: Vec<BigRational> = vec![BigRational::zero(); n_max + 1];
            a[0] = BigRational::from_integer(1.into());
            for k in 1..=custom.len().min(n_max) {
                let factor = custom.factor(k).expect("k within list");
                if custom.min_degree(k).is_none_or(|d| d > n_max) {
                    continue;
                }
                // constant term is 1, so a[n] += Σ_{j≥1} c_j a[n-j], descending n
                for n in (1..=n_max).rev() {
                    let mut acc = BigRational::zero();
                    for (j, c) in factor.iter().enumerate().skip(1).take_while(|(j, _)| *j <= n) {
                        if !c.is_zero() && !a[n - j].is_zero() {
                            acc += c * &a[n - j];
                        }
                    }
                    a[n] += acc;
                }
            }
            Coefficients::Rational(a)
        }
    };
    Ok(CoefficientTable { n_max, coeffs })
}

fn unit_series(n_max: usize) -> Vec<BigUint> {
    let mut a = vec![BigUint::zero(); n_max + 1];
    a[0] = BigUint::from(1u32);
    a
}

fn distinct_table(n_max: usize) -> Vec<BigUint> {
    let mut a = unit_series(n_max);
    // each part k used at most once: descending update
    for k in 1..=n_max {
        for n in (k..=n_max).rev() {
            let (lo, hi) = a.split_at_mut(n);
            hi[0] += &lo[n - k];
        }
    }
    a
}

/// `q(0..=n_max)`: partition counts into distinct parts.
pub fn distinct_partition_counts(n_max: usize) -> Vec<BigUint> {
    distinct_table(n_max)
}

/// `q(n)`, the number of partitions of `n` into pairwise distinct parts.
pub fn distinct_partition_count(n: usize) -> BigUint {
    distinct_table(n).swap_remove(n)
}

/// Independent oracle: counts subsets of `{1..n}` summing to `n` by explicit
/// backtracking. Refuses `n > 60`.
pub fn brute_force_distinct(n: u64) -> Result<BigUint> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::EnumerationGuard(n));
    }
    // parts chosen in strictly decreasing order
    fn count(remaining: u64, max_part: u64) -> u64 {
        if remaining == 0 {
            return 1;
        }
        (1..=max_part.min(remaining)).map(|p| count(remaining - p, p - 1)).sum()
    }
    Ok(BigUint::from(count(n, n)))
}

/// Plain double-loop convolution of two exact coefficient sequences.
pub fn convolve(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
