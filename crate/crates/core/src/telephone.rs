//! Generalized telephone numbers and the characteristic function
//! `X(z; k) = exp(z + k z^2 / 2)`.
//!
//! The recurrence is evaluated in exact rational arithmetic; the generating
//! function route goes through the floating-point series engine, so the two
//! are independent computations of the same sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::powerseries::TruncatedSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TelephoneError {
    #[error("index must be non-negative, got {0}")]
    NegativeIndex(i64),
    #[error("varkappa must be non-negative, got {0}")]
    NegativeVarkappa(String),
    #[error("cannot parse '{0}' as a rational number")]
    BadRational(String),
}

/// `T_k(0..=max_n)` for a fixed `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GtnSequence {
    varkappa: BigRational,
    values: Vec<BigRational>,
}

impl GtnSequence {
    pub fn new(varkappa: BigRational, max_n: usize) -> Result<Self, TelephoneError> {
        if varkappa.is_negative() {
            return Err(TelephoneError::NegativeVarkappa(varkappa.to_string()));
        }
        let mut values: Vec<BigRational> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let v = if n < 2 {
                BigRational::one()
            } else {
                let m = BigRational::from_integer(BigInt::from(n - 1));
                &values[n - 1] + &varkappa * m * &values[n - 2]
            };
            values.push(v);
        }
        Ok(Self { varkappa, values })
    }

    pub fn varkappa(&self) -> &BigRational {
        &self.varkappa
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(rational_to_f64).collect()
    }
}

/// `T_k(n)` by the recurrence `T(n) = T(n-1) + k (n-1) T(n-2)`, `T(0) = T(1) = 1`.
pub fn gtn(varkappa: &BigRational, n: i64) -> Result<BigRational, TelephoneError> {
    if n < 0 {
        return Err(TelephoneError::NegativeIndex(n));
    }
    let seq = GtnSequence::new(varkappa.clone(), n as usize)?;
    Ok(seq.values[n as usize].clone())
}

/// Taylor coefficients of `exp(z + k z^2 / 2)` through `z^order`.
pub fn x_series(varkappa: f64, order: usize) -> TruncatedSeries {
    TruncatedSeries::from_real(order, &[0.0, 1.0, varkappa / 2.0])
        .exp()
        .expect("exponent has zero constant term")
}

/// `n!` times the `n`-th coefficient of [`x_series`].
pub fn gtn_via_egf(varkappa: f64, n: usize) -> f64 {
    let c = x_series(varkappa, n).coeff(n).re;
    (1..=n).fold(c, |acc, k| acc * k as f64)
}

/// Parses `"7/2"`, `"3"`, `"-1"` or a finite decimal like `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, TelephoneError> {
    let bad = || TelephoneError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = BigRational::new(int * &den + frac, den);
        return Ok(if negative { -mag } else { mag });
    }
    let int: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(int))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// One row of `gtn` output.
#[derive(Debug, Clone, Serialize)]
pub struct GtnRow {
    pub n: usize,
    /// Exact value as `p/q` (or an integer).
    pub exact: String,
    pub value: f64,
    pub via_egf: f64,
}

pub fn gtn_table(varkappa: &BigRational, max_n: usize) -> Result<Vec<GtnRow>, TelephoneError> {
    let seq = GtnSequence::new(varkappa.clone(), max_n)?;
    let kf = rational_to_f64(varkappa);
    let chi = x_series(kf, max_n);
    let mut fact = 1.0;
    Ok(seq
        .values()
        .iter()
        .enumerate()
        .map(|(n, v)| {
            if n > 0 {
                fact *= n as f64;
            }
            GtnRow {
                n,
                exact: v.to_string(),
                value: rational_to_f64(v),
                via_egf: chi.coeff(n).re * fact,
            }
        })
        .collect())
}
