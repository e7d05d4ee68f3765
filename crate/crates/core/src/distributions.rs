//! Coefficients of the Poisson, Borel and Pascal distribution series
//! `z + sum_{n>=2} p_n z^n` and their Hadamard product with a normalized `f`.

use serde::Serialize;
use thiserror::Error;

use crate::powerseries::{TruncatedSeries, UNIT_TOL};

/// Above this many factors, factorials and binomials are formed in log space.
const LOG_SPACE_CUTOFF: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("bad distribution parameter: {0}")]
    BadParameter(String),
    #[error("coefficient index must be at least 2, got {0}")]
    BadIndex(usize),
    #[error("distribution has coefficients up to z^{have}, f needs z^{need}")]
    OrderMismatch { have: usize, need: usize },
    #[error("f must satisfy f(0) = 0, f'(0) = 1")]
    NotNormalized,
    #[error("convolution coefficient p_{n} = {value} must be positive")]
    ZeroConvolutionCoefficient { n: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionKind {
    Poisson { m: f64 },
    Borel { sigma: f64 },
    Pascal { q: f64, s: u32 },
    /// Explicit `p_2, p_3, ...` supplied by the caller.
    Custom,
}

impl DistributionKind {
    pub fn validate(&self) -> Result<(), DistributionError> {
        let bad = |msg: String| Err(DistributionError::BadParameter(msg));
        match *self {
            DistributionKind::Poisson { m } if !(m > 0.0 && m.is_finite()) => bad(format!("poisson m = {m}")),
            DistributionKind::Borel { sigma } if !(sigma > 0.0 && sigma <= 1.0) => {
                bad(format!("borel sigma = {sigma} (need 0 < sigma <= 1)"))
            }
            DistributionKind::Pascal { q, s } if !((0.0..1.0).contains(&q) && s >= 1) => {
                bad(format!("pascal q = {q}, s = {s} (need 0 <= q < 1, s >= 1)"))
            }
            _ => Ok(()),
        }
    }

    /// `p_n` for `n >= 2`.
    pub fn coeff(&self, n: usize) -> Result<f64, DistributionError> {
        match *self {
            DistributionKind::Poisson { m } => poisson_coeff(m, n),
            DistributionKind::Borel { sigma } => borel_coeff(sigma, n),
            DistributionKind::Pascal { q, s } => pascal_coeff(q, s, n),
            DistributionKind::Custom => Err(DistributionError::BadParameter(
                "custom coefficients have no closed form".into(),
            )),
        }
    }
}

fn check_index(n: usize) -> Result<(), DistributionError> {
    if n < 2 {
        return Err(DistributionError::BadIndex(n));
    }
    Ok(())
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `C(n, k)` by incremental multiplication, or via logs for large `n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n > LOG_SPACE_CUTOFF {
        return (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp();
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `psi_n = m^{n-1} e^{-m} / (n-1)!`
pub fn poisson_coeff(m: f64, n: usize) -> Result<f64, DistributionError> {
    DistributionKind::Poisson { m }.validate()?;
    check_index(n)?;
    let j = n - 1;
    if j > LOG_SPACE_CUTOFF {
        return Ok((j as f64 * m.ln() - m - ln_factorial(j)).exp());
    }
    Ok(m.powi(j as i32) * (-m).exp() / factorial(j))
}

/// `Lambda_n = (sigma (n-1))^{n-2} e^{-sigma (n-1)} / (n-1)!`
pub fn borel_coeff(sigma: f64, n: usize) -> Result<f64, DistributionError> {
    DistributionKind::Borel { sigma }.validate()?;
    check_index(n)?;
    let j = n - 1;
    let x = sigma * j as f64;
    if j > LOG_SPACE_CUTOFF {
        return Ok(((n - 2) as f64 * x.ln() - x - ln_factorial(j)).exp());
    }
    Ok(x.powi((n - 2) as i32) * (-x).exp() / factorial(j))
}

/// `Phi_n = C(n+s-2, s-1) q^{n-1} (1-q)^s`
pub fn pascal_coeff(q: f64, s: u32, n: usize) -> Result<f64, DistributionError> {
    DistributionKind::Pascal { q, s }.validate()?;
    check_index(n)?;
    Ok(pascal_mass(q, s, n))
}

/// Pascal term for any `n >= 1`; `n = 1` is the `z` coefficient `(1-q)^s`.
pub fn pascal_mass(q: f64, s: u32, n: usize) -> f64 {
    let s = s as usize;
    binomial(n + s - 2, s - 1) * q.powi(n as i32 - 1) * (1.0 - q).powi(s as i32)
}

/// `p_2 ..= p_max_n` for one distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionCoeffs {
    pub kind: DistributionKind,
    /// `values[i]` is `p_{i+2}`.
    pub values: Vec<f64>,
}

impl DistributionCoeffs {
    pub fn new(kind: DistributionKind, max_n: usize) -> Result<Self, DistributionError> {
        kind.validate()?;
        let values = (2..=max_n.max(2)).map(|n| kind.coeff(n)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { kind, values })
    }

    /// Coefficients built from explicit values `p_2, p_3, ...`; all must be positive.
    pub fn custom(values: Vec<f64>) -> Result<Self, DistributionError> {
        let d = Self {
            kind: DistributionKind::Custom,
            values,
        };
        d.check_positive()?;
        Ok(d)
    }

    pub fn max_n(&self) -> usize {
        self.values.len() + 1
    }

    /// `p_n`, with `p_1 = 1`.
    pub fn get(&self, n: usize) -> Option<f64> {
        match n {
            0 => None,
            1 => Some(1.0),
            _ => self.values.get(n - 2).copied(),
        }
    }

    pub fn check_positive(&self) -> Result<(), DistributionError> {
        for (i, &value) in self.values.iter().enumerate() {
            if value.is_nan() || value <= 0.0 {
                return Err(DistributionError::ZeroConvolutionCoefficient { n: i + 2, value });
            }
        }
        Ok(())
    }
}

/// `(f * p)(z) = z + sum p_n a_n z^n`.
pub fn convolve(f: &TruncatedSeries, d: &DistributionCoeffs) -> Result<TruncatedSeries, DistributionError> {
    if f.coeff(0).norm() > UNIT_TOL || (f.coeff(1) - 1.0).norm() > UNIT_TOL {
        return Err(DistributionError::NotNormalized);
    }
    let need = f.order();
    if need >= 2 && d.max_n() < need {
        return Err(DistributionError::OrderMismatch { have: d.max_n(), need });
    }
    Ok(TruncatedSeries::new(
        need,
        f.coeffs().iter().enumerate().map(|(n, &a)| match n {
            0 | 1 => a,
            _ => a * d.get(n).unwrap_or(0.0),
        }),
    ))
}
