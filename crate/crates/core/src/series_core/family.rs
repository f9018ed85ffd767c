use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Which built-in or user-supplied factor sequence defines `f = ∏_{k≥1} f_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `f_k(z) = 1 + z^k`: partitions into distinct parts.
    DistinctParts,
    /// `f_k(z) = 1 / (1 - z^k)`: unrestricted partitions.
    GeometricParts,
    /// Explicit finite polynomial per factor.
    CustomPolynomial,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::DistinctParts => "distinct",
            FamilyKind::GeometricParts => "geometric",
            FamilyKind::CustomPolynomial => "custom",
        })
    }
}

/// Validated list of polynomial factors, factor `k` stored at index `k - 1`.
///
/// Every factor has constant term 1, non-negative coefficients, and its
/// non-constant part starts at degree ≥ k. Factors past the end of the list
/// are the constant polynomial 1.
#[derive(Debug, Clone)]
pub struct CustomFactors {
    factors: Vec<Vec<BigRational>>,
    // Floating copies, used by the moment and characteristic-function layers.
    approx: Vec<Vec<f64>>,
}

impl PartialEq for CustomFactors {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for CustomFactors {}

impl CustomFactors {
    pub fn new(factors: Vec<Vec<BigRational>>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(factors.len());
        for (idx, mut coeffs) in factors.into_iter().enumerate() {
            let k = idx + 1;
            while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
                coeffs.pop();
            }
            match coeffs.first() {
                None => {
                    return Err(Error::InvalidFamily(format!("factor {k} has no coefficients")));
                }
                Some(c0) if !c0.is_one() => {
                    return Err(Error::InvalidFamily(format!(
                        "factor {k} has constant term {c0}, expected 1"
                    )));
                }
                _ => {}
            }
            if let Some(neg) = coeffs.iter().find(|c| c.is_negative()) {
                return Err(Error::InvalidFamily(format!(
                    "factor {k} has negative coefficient {neg}"
                )));
            }
            if let Some(deg) = coeffs.iter().skip(1).position(|c| !c.is_zero()).map(|p| p + 1) {
                if deg < k {
                    return Err(Error::InvalidFamily(format!(
                        "factor {k} has a non-constant term of degree {deg} < {k}; \
                         truncation at n_max factors would not be exact"
                    )));
                }
            }
            normalized.push(coeffs);
        }
        let approx = normalized
            .iter()
            .map(|f| f.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect())
            .collect();
        Ok(Self { factors: normalized, approx })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Coefficients of factor `k` (1-based), or `None` past the end of the list.
    pub fn factor(&self, k: usize) -> Option<&[BigRational]> {
        k.checked_sub(1).and_then(|i| self.factors.get(i)).map(Vec::as_slice)
    }

    pub(crate) fn factor_approx<T: Real>(&self, k: usize) -> Option<Vec<T>> {
        k.checked_sub(1)
            .and_then(|i| self.approx.get(i))
            .map(|f| f.iter().map(|&c| T::from_f64(c).unwrap_or_else(T::infinity)).collect())
    }

    /// Lowest degree carrying a non-zero coefficient besides the constant term.
    pub fn min_degree(&self, k: usize) -> Option<usize> {
        self.factor(k)?.iter().skip(1).position(|c| !c.is_zero()).map(|p| p + 1)
    }

    pub fn all_integral(&self) -> bool {
        self.factors.iter().flatten().all(|c| c.is_integer())
    }
}

/// Declarative description of the factor sequence `f_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorFamily {
    DistinctParts,
    GeometricParts,
    CustomPolynomial(CustomFactors),
}

impl FactorFamily {
    pub fn custom(factors: Vec<Vec<BigRational>>) -> Result<Self> {
        CustomFactors::new(factors).map(FactorFamily::CustomPolynomial)
    }

    /// Convenience constructor from integer coefficient lists.
    pub fn custom_integers(factors: &[&[i64]]) -> Result<Self> {
        Self::custom(
            factors
                .iter()
                .map(|f| f.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
                .collect(),
        )
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            FactorFamily::DistinctParts => FamilyKind::DistinctParts,
            FactorFamily::GeometricParts => FamilyKind::GeometricParts,
            FactorFamily::CustomPolynomial(_) => FamilyKind::CustomPolynomial,
        }
    }

    /// Number of non-trivial factors, `None` when the product is infinite.
    pub fn factor_count(&self) -> Option<usize> {
        match self {
            FactorFamily::CustomPolynomial(c) => Some(c.len()),
            _ => None,
        }
    }

    /// Re-checks the family invariants.
    pub fn validate(&self) -> Result<()> {
        if let FactorFamily::CustomPolynomial(c) = self {
            CustomFactors::new(c.factors.clone())?;
        }
        Ok(())
    }
}

impl fmt::Display for FactorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind().fmt(f)
    }
}
