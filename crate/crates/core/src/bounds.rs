//! Coefficient, Fekete–Szegő, inverse, logarithmic and convolution bounds,
//! each evaluated exactly as printed.
//!
//! Nothing in this module corrects a formula. Where a printed formula is
//! internally inconsistent the evaluator still returns it verbatim; the
//! `verify` module pairs these values with oracle bounds and records the
//! mismatch. Notation: `M, S, Q, L, W` are the [`ClassParams`] constants and
//! `msq = M kappa^2 + S kappa + Q`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::bazilevic::{ClassParams, ClassPreset};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("convolution coefficient {which} = {value} must be positive")]
    ZeroConvolutionCoefficient { which: &'static str, value: f64 },
    #[error("the piecewise Fekete-Szego bound needs a real mu, got {0}")]
    ComplexMu(Complex64),
}

/// `|a2| <= 1/W`
pub fn a2_bound(params: &ClassParams) -> f64 {
    1.0 / params.w()
}

/// `|a3| <= (1/L) max{1, |msq/W^2 + (1+varkappa)/2|}`
pub fn a3_bound(params: &ClassParams) -> f64 {
    let w2 = params.w().powi(2);
    (params.msq() / w2 + (1.0 + params.varkappa()) / 2.0).abs().max(1.0) / params.l()
}

/// The `a2`/`a3` bounds printed for a named subclass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemarkBounds {
    pub a2: f64,
    /// The `max{1, ...}` expression.
    pub a3_max_form: f64,
    /// The closed form printed after the `=` sign.
    pub a3_closed_form: f64,
}

pub fn remark_bounds(preset: ClassPreset, varkappa: f64) -> RemarkBounds {
    let x = varkappa;
    match preset {
        ClassPreset::GKappa(k) => {
            let r = (k * k + 8.0 * k + 3.0) / (2.0 * (1.0 + k).powi(2));
            RemarkBounds {
                a2: 1.0 / (1.0 + k),
                a3_max_form: (r + x).abs().max(1.0) / (2.0 * (1.0 + 2.0 * k)),
                a3_closed_form: ((k * k + 8.0 * k + 3.0)
                    / (2.0 * (1.0 + 2.0 * k) * (1.0 + k).powi(2))
                    + x)
                    / (2.0 * (1.0 + 2.0 * k)),
            }
        }
        ClassPreset::Starlike => RemarkBounds {
            a2: 1.0,
            a3_max_form: 0.5 * (1.5 + x).abs().max(1.0),
            a3_closed_form: 0.5 * (1.5 + x),
        },
        ClassPreset::Convex => RemarkBounds {
            a2: 0.5,
            a3_max_form: (0.5 + x).abs().max(1.0) / 6.0,
            a3_closed_form: (0.5 + x) / 6.0,
        },
        ClassPreset::BVartheta(t) => {
            let inner = (t * t + t - 2.0) / (1.0 + t).powi(2) - 1.0 - x;
            RemarkBounds {
                a2: 1.0 / (1.0 + t),
                a3_max_form: (0.5 * inner.abs()).max(1.0) / (t + 2.0),
                a3_closed_form: ((t + 3.0) / (1.0 + t).powi(2) + x) / (2.0 * (1.0 + t)),
            }
        }
        ClassPreset::R => RemarkBounds {
            a2: 0.5,
            a3_max_form: (0.5 * (1.0 + x).abs()).max(1.0) / 3.0,
            a3_closed_form: (1.0 + x) / 6.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    BelowSigma1,
    Between,
    AboveSigma2,
}

/// Result of a three-branch Fekete–Szegő evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiecewiseVerdict {
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub value: f64,
    pub branch: Branch,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub sigma1: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub sigma2: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub aleph: f64,
    /// Set when the printed formula yields a value `<= 0`, which no modulus
    /// bound can be.
    pub non_positive: bool,
}

/// Shared three-branch evaluator: `scale = 1/L` (times `1/p3` for the
/// convolution form), knots `sigma1 <= sigma2`, and `aleph`.
fn piecewise(params: &ClassParams, mu: f64, scale: f64, sigma1: f64, sigma2: f64, aleph: f64) -> PiecewiseVerdict {
    let outer = 1.0 + params.varkappa() + aleph / params.w().powi(2);
    let (branch, value) = if mu < sigma1 {
        (Branch::BelowSigma1, 0.5 * scale * outer)
    } else if mu <= sigma2 {
        (Branch::Between, scale)
    } else {
        (Branch::AboveSigma2, -0.5 * scale * outer)
    };
    PiecewiseVerdict {
        value,
        branch,
        sigma1,
        sigma2,
        aleph,
        non_positive: value <= 0.0,
    }
}

fn sigma1(params: &ClassParams) -> f64 {
    ((params.varkappa() - 1.0) * params.w().powi(2) + 2.0 * params.msq()) / (2.0 * params.l())
}

fn sigma2_printed(params: &ClassParams) -> f64 {
    (params.varkappa() * params.w().powi(2) + 2.0 * params.msq()) / (2.0 * params.l())
}

/// Knot at which the printed third branch equals the middle value `1/L`:
/// `((varkappa + 3) W^2 + 2 msq) / (2L)`.
pub fn sigma2_matching(params: &ClassParams) -> f64 {
    ((params.varkappa() + 3.0) * params.w().powi(2) + 2.0 * params.msq()) / (2.0 * params.l())
}

/// `aleph = 2 msq - 2 mu L`
pub fn aleph(params: &ClassParams, mu: f64) -> f64 {
    2.0 * params.msq() - 2.0 * mu * params.l()
}

/// Piecewise bound on `|a3 - mu a2^2|` for real `mu`, as printed (total in `mu`).
pub fn fs_real(params: &ClassParams, mu: f64) -> PiecewiseVerdict {
    piecewise(params, mu, 1.0 / params.l(), sigma1(params), sigma2_printed(params), aleph(params, mu))
}

/// [`fs_real`] with the second knot moved to [`sigma2_matching`]. Not a
/// printed formula; used to show where the printed `sigma2` breaks continuity.
pub fn fs_real_matching_knot(params: &ClassParams, mu: f64) -> PiecewiseVerdict {
    piecewise(params, mu, 1.0 / params.l(), sigma1(params), sigma2_matching(params), aleph(params, mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsComplex {
    /// `(1/L) max{1, (1/2)|1 + varkappa + (2 msq - 2 mu L)/W^2|}`
    pub value: f64,
    /// Same expression with the prefactor `1/((vartheta+2)(1+2kappa))`.
    pub alternate: f64,
}

/// Bound on `|a3 - mu a2^2|` for complex `mu`.
pub fn fs_complex(params: &ClassParams, mu: Complex64) -> FsComplex {
    let inner = 1.0 + params.varkappa() + (2.0 * params.msq() - 2.0 * mu * params.l()) / params.w().powi(2);
    let m = (0.5 * inner.norm()).max(1.0);
    FsComplex {
        value: m / params.l(),
        alternate: m / ((params.vartheta() + 2.0) * (1.0 + 2.0 * params.kappa())),
    }
}

/// `|d2|` bound for the inverse function: printed `1/(2W)` and the value
/// `1/W` implied by `d2 = -a2` together with `|a2| <= 1/W`.
pub fn inverse_d2_bound(params: &ClassParams) -> (f64, f64) {
    (1.0 / (2.0 * params.w()), 1.0 / params.w())
}

/// Second inverse-coefficient inequality (printed with `|d2|` on the left,
/// it bounds `|d3|`):
/// `(1/(2L)) max{1, |(-(1+varkappa) W^2 - 2 msq + 4L) / (2 W^2)|}`.
pub fn inverse_d3_bound(params: &ClassParams) -> f64 {
    let w2 = params.w().powi(2);
    let inner = (-(1.0 + params.varkappa()) * w2 - 2.0 * params.msq() + 4.0 * params.l()) / (2.0 * w2);
    inner.abs().max(1.0) / (2.0 * params.l())
}

/// `|d3 - hbar d2^2| <= (1/L) max{1, |((1+varkappa) W^2 + 2 msq + 2L(hbar - 2)) / (2 W^2)|}`
pub fn inverse_fs(params: &ClassParams, hbar: Complex64) -> f64 {
    let w2 = params.w().powi(2);
    let inner = ((1.0 + params.varkappa()) * w2 + 2.0 * params.msq() + 2.0 * params.l() * (hbar - 2.0)) / (2.0 * w2);
    inner.norm().max(1.0) / params.l()
}

/// `d2 = -a2`, `d3 = 2 a2^2 - a3`.
pub fn inverse_coeffs(a2: Complex64, a3: Complex64) -> (Complex64, Complex64) {
    (-a2, 2.0 * a2 * a2 - a3)
}

/// `gamma1 = a2/2`, `gamma2 = (a3 - a2^2/2)/2`.
pub fn log_coeffs(a2: Complex64, a3: Complex64) -> (Complex64, Complex64) {
    (a2 / 2.0, (a3 - a2 * a2 / 2.0) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogCoeffBounds {
    /// `1/(2W)`
    pub g1: f64,
    /// `(1/L) max{1, (1/2)|1 + varkappa + (2 msq - L)/W^2|}` as printed.
    pub g2: f64,
    /// `(1/2) fs_complex(mu = 1/2)`, what `2 gamma2 = a3 - a2^2/2` gives
    /// from the same Fekete–Szegő bound.
    pub g2_from_fs: f64,
}

pub fn log_coeff_bounds(params: &ClassParams) -> LogCoeffBounds {
    let w2 = params.w().powi(2);
    let inner = 1.0 + params.varkappa() + (2.0 * params.msq() - params.l()) / w2;
    LogCoeffBounds {
        g1: 1.0 / (2.0 * params.w()),
        g2: (0.5 * inner.abs()).max(1.0) / params.l(),
        g2_from_fs: 0.5 * fs_complex(params, Complex64::new(0.5, 0.0)).value,
    }
}

/// Inputs shared by the Fekete–Szegő style evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeketeSzegoInputs {
    pub params: ClassParams,
    pub mu: Complex64,
    pub hbar: Complex64,
    pub wp2: f64,
    pub wp3: f64,
}

impl FeketeSzegoInputs {
    pub fn new(params: ClassParams, mu: Complex64) -> Self {
        Self {
            params,
            mu,
            hbar: Complex64::new(0.0, 0.0),
            wp2: 1.0,
            wp3: 1.0,
        }
    }

    pub fn with_convolution(mut self, wp2: f64, wp3: f64) -> Self {
        self.wp2 = wp2;
        self.wp3 = wp3;
        self
    }

    fn check_convolution(&self) -> Result<(), BoundsError> {
        for (which, value) in [("p2", self.wp2), ("p3", self.wp3)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(BoundsError::ZeroConvolutionCoefficient { which, value });
            }
        }
        Ok(())
    }
}

/// Convolution Fekete–Szegő bound for complex `mu`, as printed:
///
/// ```text
/// (2/(L p3)) max{1, (1/2)| -1 - varkappa + 2 msq/(W p2)^2
///                          + 2 mu (vartheta+2)(1+2kappa) p3/(W p2)^2 |}
/// ```
pub fn conv_fs_complex(inputs: &FeketeSzegoInputs) -> Result<f64, BoundsError> {
    inputs.check_convolution()?;
    let p = &inputs.params;
    let wp2sq = (p.w() * inputs.wp2).powi(2);
    let mixed = (p.vartheta() + 2.0) * (1.0 + 2.0 * p.kappa());
    let inner = -1.0 - p.varkappa() + 2.0 * p.msq() / wp2sq + 2.0 * inputs.mu * mixed * inputs.wp3 / wp2sq;
    Ok(2.0 * (0.5 * inner.norm()).max(1.0) / (p.l() * inputs.wp3))
}

/// Convolution version of [`fs_real`]: knots scaled by `p2^2/p3`, values by
/// `1/p3`, `aleph2 = 2 msq - 2 mu L p3/p2^2`.
pub fn conv_fs_real(inputs: &FeketeSzegoInputs) -> Result<PiecewiseVerdict, BoundsError> {
    inputs.check_convolution()?;
    if inputs.mu.im != 0.0 {
        return Err(BoundsError::ComplexMu(inputs.mu));
    }
    let p = &inputs.params;
    let mu = inputs.mu.re;
    let ratio = inputs.wp2 * inputs.wp2 / inputs.wp3;
    let aleph2 = 2.0 * p.msq() - 2.0 * mu * p.l() / ratio;
    Ok(piecewise(
        p,
        mu,
        1.0 / (p.l() * inputs.wp3),
        ratio * sigma1(p),
        ratio * sigma2_printed(p),
        aleph2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64, k: f64, x: f64) -> ClassParams {
        ClassParams::new(t, k, x).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn a2_examples() {
        assert_eq!(a2_bound(&p(0.0, 0.0, 1.0)), 1.0);
        assert_eq!(a2_bound(&p(0.0, 1.0, 1.0)), 0.5);
        assert_eq!(a2_bound(&p(1.0, 1.0, 1.0)), 0.25);
    }

    #[test]
    fn a3_examples() {
        assert_eq!(a3_bound(&p(0.0, 0.0, 1.0)), 1.0);
        assert_eq!(a3_bound(&p(0.0, 0.0, 4.0)), 1.0);
        assert!((a3_bound(&p(1.0, 0.0, 0.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn remark_values() {
        let r = remark_bounds(ClassPreset::Starlike, 1.0);
        assert_eq!((r.a2, r.a3_max_form, r.a3_closed_form), (1.0, 1.25, 1.25));
        let r = remark_bounds(ClassPreset::Convex, 1.0);
        assert_eq!(r.a2, 0.5);
        assert!((r.a3_max_form - 0.25).abs() < 1e-16);
        let r = remark_bounds(ClassPreset::R, 1.0);
        assert!((r.a3_max_form - 1.0 / 3.0).abs() < 1e-16);
        assert!((r.a3_closed_form - 1.0 / 3.0).abs() < 1e-16);
        // (vartheta^2 + vartheta - 2)/(1+vartheta)^2 - 1 - varkappa at vartheta = 0: -2 - 1 - 1
        let r = remark_bounds(ClassPreset::BVartheta(0.0), 1.0);
        assert_eq!(r.a3_max_form, 1.0);
    }

    #[test]
    fn fs_real_examples() {
        let params = p(0.0, 0.0, 1.0);
        let v = fs_real(&params, 0.0);
        assert_eq!((v.sigma1, v.sigma2), (-2.0, -1.5));
        assert_eq!(v.branch, Branch::AboveSigma2);
        assert_eq!(v.value, 1.0);

        let v = fs_real(&params, -2.0);
        assert_eq!(v.aleph, 0.0);
        assert_eq!(v.value, 1.0);
        let below = fs_real(&params, -2.0 - 1e-12);
        assert_eq!(below.branch, Branch::BelowSigma1);
        assert!((below.value - 1.0).abs() < 1e-11);

        let v = fs_real(&params, -1.75);
        assert_eq!((v.branch, v.value), (Branch::Between, 1.0));
    }

    #[test]
    fn printed_third_branch_can_be_negative() {
        let params = p(0.0, 0.0, 1.0);
        // just above sigma2 = -3/2 the printed value is about -1/(2L)
        let v = fs_real(&params, -1.4);
        assert_eq!(v.branch, Branch::AboveSigma2);
        assert!(v.non_positive);
    }

    #[test]
    fn matching_knot_is_continuous() {
        let params = p(0.3, 0.8, 2.0);
        let s2 = sigma2_matching(&params);
        let lo = fs_real_matching_knot(&params, s2 - 1e-9).value;
        let hi = fs_real_matching_knot(&params, s2 + 1e-9).value;
        assert!((lo - hi).abs() < 1e-9);
        assert!((lo - 1.0 / params.l()).abs() < 1e-9);
    }

    #[test]
    fn fs_complex_examples() {
        assert_eq!(fs_complex(&p(0.0, 0.0, 1.0), c(0.0)).value, 1.0);
        let v = fs_complex(&p(1.0, 1.0, 1.0), c(0.0));
        assert!((v.value - 1.0 / 9.0).abs() < 1e-16);
        assert_eq!(v.value, v.alternate);

        // mu zeroing the modulus leaves the floor 1/L
        let params = p(0.4, 0.2, 1.5);
        let mu = (2.0 * params.msq() + (1.0 + params.varkappa()) * params.w().powi(2)) / (2.0 * params.l());
        assert!((fs_complex(&params, c(mu)).value - 1.0 / params.l()).abs() < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_d2_bound(&p(0.0, 0.0, 1.0)), (0.5, 1.0));
        assert_eq!(inverse_d2_bound(&p(1.0, 0.0, 1.0)), (0.25, 0.5));
        assert_eq!(inverse_d2_bound(&p(0.0, 1.0, 1.0)), (0.25, 0.5));
        assert_eq!(inverse_fs(&p(0.0, 0.0, 1.0), c(2.0)), 1.0);
        assert_eq!(inverse_fs(&p(0.0, 0.0, 1.0), c(0.0)), 3.0);
        let (a2, a3) = (Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5));
        let (d2, d3) = inverse_coeffs(a2, a3);
        assert_eq!(d2, -a2);
        assert_eq!(d3, 2.0 * a2 * a2 - a3);
    }

    #[test]
    fn log_examples() {
        let b = log_coeff_bounds(&p(0.0, 0.0, 1.0));
        assert_eq!(b.g1, 0.5);
        assert_eq!(b.g2, 1.5);
        assert_eq!(b.g2_from_fs, 0.75);
        let a2 = Complex64::new(0.7, -0.2);
        assert_eq!(log_coeffs(a2, c(0.0)).0 * 2.0, a2);
    }

    #[test]
    fn conv_examples() {
        let params = p(0.0, 0.0, 1.0);
        let unit = FeketeSzegoInputs::new(params, c(0.0));
        // (2/1) max{1, (1/2)|-2 + 2(-2)|} = 6
        assert_eq!(conv_fs_complex(&unit).unwrap(), 6.0);

        let e = std::f64::consts::E;
        let poisson = unit.with_convolution(1.0 / e, 0.5 / e);
        let want = 2.0 / (0.5 / e) * (0.5 * (-2.0 - 4.0 * e * e)).abs();
        assert!((conv_fs_complex(&poisson).unwrap() - want).abs() < 1e-12);

        let big = unit.with_convolution(1.0, 1e9);
        assert!(conv_fs_complex(&big).unwrap() < 1e-7);

        assert!(matches!(
            conv_fs_complex(&unit.with_convolution(0.0, 1.0)),
            Err(BoundsError::ZeroConvolutionCoefficient { which: "p2", .. })
        ));
    }

    #[test]
    fn conv_real_reduces_and_scales() {
        let params = p(0.6, 0.3, 2.0);
        for mu in [-3.0, -1.0, 0.0, 0.4, 2.5] {
            let unit = conv_fs_real(&FeketeSzegoInputs::new(params, c(mu))).unwrap();
            assert_eq!(unit, fs_real(&params, mu));
        }
        let e = std::f64::consts::E;
        let borel = FeketeSzegoInputs::new(params, c(0.0)).with_convolution((-0.5f64).exp(), 0.5 / e);
        let v = conv_fs_real(&borel).unwrap();
        let base = fs_real(&params, 0.0);
        assert!((v.sigma1 - 2.0 * base.sigma1).abs() < 1e-12);
        assert!((v.sigma2 - 2.0 * base.sigma2).abs() < 1e-12);

        let far = conv_fs_real(&FeketeSzegoInputs::new(params, c(1e6))).unwrap();
        assert_eq!(far.branch, Branch::AboveSigma2);
        assert!(far.value > 0.0);

        assert!(matches!(
            conv_fs_real(&FeketeSzegoInputs::new(params, Complex64::new(0.0, 1.0))),
            Err(BoundsError::ComplexMu(_))
        ));
    }
}
