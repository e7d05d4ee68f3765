//! First two coefficients of Carathéodory functions `p = 1 + c1 z + c2 z^2 + ...`
//! with `Re p > 0`, and grid suprema of functionals of `(c1, c2)`.
//!
//! The admissible body is `|c1| <= 2`, `|c2 - c1^2/2| <= 2 - |c1|^2/2`. It is
//! covered exactly by
//!
//! ```text
//! c1 = 2 rho e^{i alpha}
//! c2 = c1^2/2 + (2 - |c1|^2/2) tau e^{i beta},   rho, tau in [0, 1]
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CaratheodoryError {
    #[error("sampler parameter {name} = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("grid needs at least 2 steps per parameter, got {0:?}")]
    BadGrid([usize; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaratheodoryPoint {
    #[serde(with = "crate::report::complex")]
    pub c1: Complex64,
    #[serde(with = "crate::report::complex")]
    pub c2: Complex64,
}

impl CaratheodoryPoint {
    /// Checks both coefficient constraints up to `tol`.
    pub fn is_admissible(&self, tol: f64) -> bool {
        let r2 = self.c1.norm_sqr();
        self.c1.norm() <= 2.0 + tol
            && (self.c2 - self.c1 * self.c1 / 2.0).norm() <= 2.0 - r2 / 2.0 + tol
    }
}

/// The four sampler coordinates `(rho, alpha, tau, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerParams {
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub rho: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub alpha: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub tau: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub beta: f64,
}

impl SamplerParams {
    pub fn point(&self) -> Result<CaratheodoryPoint, CaratheodoryError> {
        sample_point(self.rho, self.alpha, self.tau, self.beta)
    }
}

pub fn sample_point(
    rho: f64,
    alpha: f64,
    tau: f64,
    beta: f64,
) -> Result<CaratheodoryPoint, CaratheodoryError> {
    let unit = |name, value: f64| {
        if (0.0..=1.0).contains(&value) {
            Ok(())
        } else {
            Err(CaratheodoryError::ParameterOutOfRange { name, value })
        }
    };
    let angle = |name, value: f64| {
        if value.is_finite() {
            Ok(())
        } else {
            Err(CaratheodoryError::ParameterOutOfRange { name, value })
        }
    };
    unit("rho", rho)?;
    angle("alpha", alpha)?;
    unit("tau", tau)?;
    angle("beta", beta)?;
    Ok(point_unchecked(
        Complex64::from_polar(2.0 * rho, alpha),
        Complex64::from_polar(tau, beta),
    ))
}

#[inline]
fn point_unchecked(c1: Complex64, t: Complex64) -> CaratheodoryPoint {
    let radius = (2.0 - c1.norm_sqr() / 2.0).max(0.0);
    CaratheodoryPoint {
        c1,
        c2: c1 * c1 / 2.0 + t * radius,
    }
}

/// `|c2 - v c1^2|` bound for real `v`.
pub fn lemma1_bound(v: f64) -> f64 {
    if v <= 0.0 {
        2.0 - 4.0 * v
    } else if v <= 1.0 {
        2.0
    } else {
        4.0 * v - 2.0
    }
}

/// `|c2 - v c1^2| <= 2 max(1, |2v - 1|)` for complex `v`.
pub fn lemma3_bound(v: Complex64) -> f64 {
    2.0 * (2.0 * v - 1.0).norm().max(1.0)
}

/// `|c2 - hbar c1^2 / 2| <= max(2, 2|hbar - 1|)`.
pub fn lemma4_bound(hbar: Complex64) -> f64 {
    (2.0 * (hbar - 1.0).norm()).max(2.0)
}

/// Steps per sampler coordinate. Radii include both endpoints; angles are
/// `2 pi j / n` for `j < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub rho: usize,
    pub alpha: usize,
    pub tau: usize,
    pub beta: usize,
}

impl GridSpec {
    pub fn uniform(n: usize) -> Result<Self, CaratheodoryError> {
        Self::new(n, n, n, n)
    }

    pub fn new(rho: usize, alpha: usize, tau: usize, beta: usize) -> Result<Self, CaratheodoryError> {
        let g = Self { rho, alpha, tau, beta };
        if [rho, alpha, tau, beta].iter().any(|&s| s < 2) {
            return Err(CaratheodoryError::BadGrid([rho, alpha, tau, beta]));
        }
        Ok(g)
    }

    pub fn points(&self) -> usize {
        self.rho * self.alpha * self.tau * self.beta
    }

    fn radius(steps: usize, i: usize) -> f64 {
        i as f64 / (steps - 1) as f64
    }

    fn angle(steps: usize, j: usize) -> f64 {
        TAU * j as f64 / steps as f64
    }

    fn params(&self, idx: [usize; 4]) -> SamplerParams {
        SamplerParams {
            rho: Self::radius(self.rho, idx[0]),
            alpha: Self::angle(self.alpha, idx[1]),
            tau: Self::radius(self.tau, idx[2]),
            beta: Self::angle(self.beta, idx[3]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupResult {
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub value: f64,
    pub witness: CaratheodoryPoint,
    pub params: SamplerParams,
    /// Grid index of the argmax (refinement leaves it unchanged).
    pub index: [usize; 4],
}

/// Maximum of `functional` over the sampled grid.
///
/// Ties go to the lexicographically smallest grid index, so the result does
/// not depend on how rayon splits the work. `NaN` values are skipped.
pub fn brute_force_sup<F>(functional: F, grid: &GridSpec) -> SupResult
where
    F: Fn(&CaratheodoryPoint) -> f64 + Sync,
{
    let inner: Vec<Complex64> = (0..grid.tau)
        .flat_map(|k| (0..grid.beta).map(move |l| (k, l)))
        .map(|(k, l)| {
            Complex64::from_polar(GridSpec::radius(grid.tau, k), GridSpec::angle(grid.beta, l))
        })
        .collect();

    let best = (0..grid.rho * grid.alpha)
        .into_par_iter()
        .map(|outer| {
            let (i, j) = (outer / grid.alpha, outer % grid.alpha);
            let c1 = Complex64::from_polar(
                2.0 * GridSpec::radius(grid.rho, i),
                GridSpec::angle(grid.alpha, j),
            );
            let mut best: Option<(f64, usize)> = None;
            for (m, &t) in inner.iter().enumerate() {
                let v = functional(&point_unchecked(c1, t));
                if v.is_nan() {
                    continue;
                }
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, outer * inner.len() + m));
                }
            }
            best
        })
        .reduce(|| None, pick_better);

    let (value, flat) = best.unwrap_or((f64::NAN, 0));
    let idx = [
        flat / (grid.alpha * inner.len()),
        (flat / inner.len()) % grid.alpha,
        (flat % inner.len()) / grid.beta,
        flat % grid.beta,
    ];
    let params = grid.params(idx);
    SupResult {
        value,
        witness: point_unchecked(
            Complex64::from_polar(2.0 * params.rho, params.alpha),
            Complex64::from_polar(params.tau, params.beta),
        ),
        params,
        index: idx,
    }
}

fn pick_better(a: Option<(f64, usize)>, b: Option<(f64, usize)>) -> Option<(f64, usize)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `g` on `[lo, hi]`, assuming unimodality.
fn golden_max(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        }
    }
    if f1 >= f2 { (x1, f1) } else { (x2, f2) }
}

/// Coordinate-wise golden-section polish of a grid argmax, searching one grid
/// cell either side of each coordinate. Never returns a smaller value.
pub fn refine_sup<F>(functional: F, grid: &GridSpec, start: &SupResult, sweeps: usize) -> SupResult
where
    F: Fn(&CaratheodoryPoint) -> f64,
{
    let eval = |p: &SamplerParams| p.point().map(|pt| functional(&pt)).unwrap_or(f64::NAN);
    let mut best = *start;
    let steps = [
        1.0 / (grid.rho - 1) as f64,
        TAU / grid.alpha as f64,
        1.0 / (grid.tau - 1) as f64,
        TAU / grid.beta as f64,
    ];
    for _ in 0..sweeps {
        for (coord, &h) in steps.iter().enumerate() {
            let mut p = best.params;
            let slot = match coord {
                0 => &mut p.rho,
                1 => &mut p.alpha,
                2 => &mut p.tau,
                _ => &mut p.beta,
            };
            let centre = *slot;
            let (lo, hi) = if coord % 2 == 0 {
                ((centre - h).max(0.0), (centre + h).min(1.0))
            } else {
                (centre - h, centre + h)
            };
            let probe = |x: f64| {
                let mut q = best.params;
                match coord {
                    0 => q.rho = x,
                    1 => q.alpha = x,
                    2 => q.tau = x,
                    _ => q.beta = x,
                }
                eval(&q)
            };
            let (x, v) = golden_max(probe, lo, hi, 60);
            if v > best.value {
                *slot = x;
                best.value = v;
                best.params = p;
                best.witness = p.point().expect("refined parameters stay in range");
            }
        }
    }
    best
}
