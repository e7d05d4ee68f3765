//! Truncated power series with complex double-precision coefficients.
//!
//! A [`TruncatedSeries`] of order `N` stores the coefficients of
//! `1, z, ..., z^N`. Binary operations between series of different orders
//! truncate to the smaller order. Nothing here infers an order from the data:
//! every constructor takes it explicitly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance used for "constant term is zero / one" preconditions.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("division by a series with constant term {0} (not a unit)")]
    DivisionByNonUnit(Complex64),
    #[error("exp requires a zero constant term, got {0}")]
    NonzeroConstantTerm(Complex64),
    #[error("log/pow require constant term 1, got {0}")]
    ConstantTermNotOne(Complex64),
    #[error("composition requires the inner series to vanish at 0, got {0}")]
    InnerConstantNonzero(Complex64),
    #[error("series is not invertible (a0 = {a0}, a1 = {a1})")]
    NotInvertible { a0: Complex64, a1: Complex64 },
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series of the given order, zero-padding or truncating `coeffs`.
    pub fn new(order: usize, coeffs: impl IntoIterator<Item = Complex64>) -> Self {
        let mut c: Vec<Complex64> = coeffs.into_iter().take(order + 1).collect();
        c.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs: c }
    }

    pub fn from_real(order: usize, coeffs: &[f64]) -> Self {
        Self::new(order, coeffs.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    pub fn zero(order: usize) -> Self {
        Self::new(order, std::iter::empty())
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, Complex64::new(1.0, 0.0))
    }

    pub fn constant(order: usize, c: Complex64) -> Self {
        Self::new(order, std::iter::once(c))
    }

    /// The series `z` (truncated to `order`).
    pub fn identity(order: usize) -> Self {
        Self::monomial(order, 1, Complex64::new(1.0, 0.0))
    }

    /// `c * z^k` at the given order (zero when `k > order`).
    pub fn monomial(order: usize, k: usize, c: Complex64) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn set_coeff(&mut self, k: usize, c: Complex64) {
        self.coeffs[k] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(order, self.coeffs.iter().copied())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul_series(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, &a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// `self / other`; requires `|other[0]| > UNIT_TOL`.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let b0 = other.coeffs[0];
        if b0.norm() <= UNIT_TOL {
            return Err(SeriesError::DivisionByNonUnit(b0));
        }
        let n = self.order().min(other.order());
        let mut q = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(Self { coeffs: q })
    }

    /// `exp(self)`; requires a zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if a0.norm() > UNIT_TOL {
            return Err(SeriesError::NonzeroConstantTerm(a0));
        }
        let n = self.order();
        // g' = a' g  =>  k g_k = sum_{j=1..k} j a_j g_{k-j}
        let mut g = vec![Complex64::new(0.0, 0.0); n + 1];
        g[0] = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * g[k - j] * j as f64;
            }
            g[k] = acc / k as f64;
        }
        Ok(Self { coeffs: g })
    }

    /// Principal `log(self)`; requires constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if (a0 - 1.0).norm() > UNIT_TOL {
            return Err(SeriesError::ConstantTermNotOne(a0));
        }
        let n = self.order();
        // l' a = a'  =>  k l_k = k a_k - sum_{j=1..k-1} j l_j a_{k-j}
        let mut l = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            let tail: Complex64 = (1..k).map(|j| l[j] * self.coeffs[k - j] * j as f64).sum();
            l[k] = (self.coeffs[k] * k as f64 - tail) / k as f64;
        }
        Ok(Self { coeffs: l })
    }

    /// `self^e` on the principal branch; requires constant term 1.
    pub fn pow_real(&self, e: f64) -> Result<Self, SeriesError> {
        self.log()?.scale_real(e).exp()
    }

    /// `self(inner(z))`, truncated to the smaller order.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let i0 = inner.coeffs[0];
        if i0.norm() > UNIT_TOL {
            return Err(SeriesError::InnerConstantNonzero(i0));
        }
        let n = self.order().min(inner.order());
        let mut inner = inner.truncate(n);
        inner.coeffs[0] = Complex64::new(0.0, 0.0);
        let mut acc = Self::constant(n, self.coeffs[n]);
        for k in (0..n).rev() {
            acc = acc.mul_series(&inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse `r` with `self(r(z)) = z`, built order by order.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        let (a0, a1) = (self.coeffs[0], self.coeff(1));
        if a0.norm() > UNIT_TOL || a1.norm() <= UNIT_TOL || self.order() < 1 {
            return Err(SeriesError::NotInvertible { a0, a1 });
        }
        let n = self.order();
        let mut r = Self::monomial(n, 1, a1.inv());
        for k in 2..=n {
            // coefficient k of self(r) is linear in r_k with slope a1
            let residual = self.compose(&r)?.coeffs[k];
            r.coeffs[k] = -residual / a1;
        }
        Ok(r)
    }

    /// Termwise derivative; the order drops by one (floor 0).
    pub fn derive(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        Self::new(
            n - 1,
            (1..=n).map(|k| self.coeffs[k] * k as f64),
        )
    }

    /// Antiderivative vanishing at 0; the order grows by one.
    pub fn integrate(&self) -> Self {
        let n = self.order();
        Self::new(
            n + 1,
            std::iter::once(Complex64::new(0.0, 0.0))
                .chain((0..=n).map(|k| self.coeffs[k] / (k + 1) as f64)),
        )
    }

    /// Multiplies by `z`; the order grows by one.
    pub fn shift_up(&self) -> Self {
        Self::new(
            self.order() + 1,
            std::iter::once(Complex64::new(0.0, 0.0)).chain(self.coeffs.iter().copied()),
        )
    }

    /// Divides by `z`, dropping the constant term; the order drops by one.
    pub fn shift_down(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        Self::new(n - 1, self.coeffs[1..].iter().copied())
    }

    /// Evaluates the truncated polynomial at `z` (Horner).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Maximum of `|p(r e^{i t})|` over `samples` equally spaced angles.
    pub fn sup_on_circle(&self, radius: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / samples as f64;
                self.eval(Complex64::from_polar(radius, t)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest coefficient difference over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(order={}, {:?})", self.order(), self.coeffs)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = if c.im == 0.0 { format!("{}", c.re) } else { format!("({c})") };
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::new(n, (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]))
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::new(n, (0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]))
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale_real(-1.0)
    }
}
