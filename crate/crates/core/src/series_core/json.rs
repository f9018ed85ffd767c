//! JSON ingestion for custom polynomial families.
//!
//! Document shape: `{"factors": [[1, 0, 1], ["1", "1/2"], ...]}`. Entry `k`
//! of `factors` lists the coefficients of factor `k + 1` by ascending degree.
//! Each coefficient is a JSON number or a string holding an integer, a
//! terminating decimal (`"0.25"`, `"1e-3"`) or a fraction (`"1/3"`); all are
//! parsed exactly.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;
use serde_json::Value;

use super::family::FactorFamily;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDocument {
    factors: Vec<Vec<Value>>,
}

impl FactorFamily {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: FamilyDocument = serde_json::from_str(text)?;
        let mut factors = Vec::with_capacity(doc.factors.len());
        for (i, raw) in doc.factors.iter().enumerate() {
            let coeffs = raw
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    coefficient(v).map_err(|msg| {
                        Error::InvalidFamily(format!("factor {}, degree {j}: {msg}", i + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            factors.push(coeffs);
        }
        FactorFamily::custom(factors)
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

fn coefficient(v: &Value) -> std::result::Result<BigRational, String> {
    match v {
        Value::Number(n) => parse_exact(&n.to_string()),
        Value::String(s) => parse_exact(s),
        other => Err(format!("expected number or string, found {other}")),
    }
}

/// Parses an integer, terminating decimal with optional exponent, or `p/q`.
pub fn parse_exact(text: &str) -> std::result::Result<BigRational, String> {
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let den: BigInt = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(format!("not a decimal number: {s:?}"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|e| e.to_string())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}
