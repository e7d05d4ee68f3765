//! The Bazilevic-type functional
//!
//! ```text
//! W(f) = [ zf'/(f^{1-kappa} z^kappa) + zf''/f' + (kappa-1)(zf'/f - 1) ]^vartheta
//!        * [ zf'/(f^{1-kappa} z^kappa) ]^{1-vartheta}
//! ```
//!
//! together with class members built from Schwarz functions
//! (`W(f) = X(w)`, `X(u) = exp(u + varkappa u^2 / 2)`), recovery of the Schwarz
//! function from a member, and a numerical fit of the coefficient relation
//! `b1 = A a2`, `b2 = B a3 + C a2^2` between `W(f) = 1 + b1 z + b2 z^2 + ...`
//! and `f = z + a2 z^2 + a3 z^3 + ...`.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::powerseries::{SeriesError, TruncatedSeries, UNIT_TOL};
use crate::telephone::x_series;

/// Circle radius and sample count for numerical Schwarz / witness checks.
pub const SCHWARZ_RADIUS: f64 = 0.99;
pub const SCHWARZ_SAMPLES: usize = 256;
/// Witnesses with sup-norm at or below this value count as class members.
pub const MEMBERSHIP_THRESHOLD: f64 = 1.0 - 1e-6;

const FIT_STEPS: [f64; 2] = [1e-3, 2e-3];
const FIT_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BazilevicError {
    #[error("class parameters must be finite and non-negative: {0}")]
    InvalidParams(String),
    #[error("f must satisfy f(0) = 0, f'(0) = 1 (got a0 = {a0}, a1 = {a1})")]
    NotNormalized { a0: Complex64, a1: Complex64 },
    #[error("series order {0} is too low (need at least 3)")]
    OrderTooLow(usize),
    #[error("power base has constant term {0}, principal branch undefined")]
    PowerBranchFailure(Complex64),
    #[error("coefficient fit unstable: {what} estimates {first} and {second} disagree")]
    FitUnstable { what: &'static str, first: f64, second: f64 },
    #[error("w is not a Schwarz function (w(0) = {w0}, sup |w| on |z| = {SCHWARZ_RADIUS} is {sup})")]
    NotSchwarz { w0: Complex64, sup: f64 },
    #[error("coefficient {step} of W(f) does not depend on a_{next}", next = step + 1)]
    SolveSingular { step: usize },
    #[error("coefficient {step} of W(f) is not affine in a_{next}", next = step + 1)]
    LinearizationFailed { step: usize },
    #[error("witness undefined: 1 + varkappa w vanishes near z = {0}")]
    WitnessUndefined(Complex64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `(vartheta, kappa, varkappa)`; derived constants are recomputed on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    vartheta: f64,
    kappa: f64,
    varkappa: f64,
}

impl ClassParams {
    pub fn new(vartheta: f64, kappa: f64, varkappa: f64) -> Result<Self, BazilevicError> {
        for (name, v) in [("vartheta", vartheta), ("kappa", kappa), ("varkappa", varkappa)] {
            if !v.is_finite() || v < 0.0 {
                return Err(BazilevicError::InvalidParams(format!("{name} = {v}")));
            }
        }
        Ok(Self { vartheta, kappa, varkappa })
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn varkappa(&self) -> f64 {
        self.varkappa
    }

    pub fn with_varkappa(&self, varkappa: f64) -> Result<Self, BazilevicError> {
        Self::new(self.vartheta, self.kappa, varkappa)
    }

    /// `vartheta^2 - vartheta + 1`
    pub fn m(&self) -> f64 {
        let t = self.vartheta;
        t * t - t + 1.0
    }

    /// `2 vartheta^2 - 4 vartheta + 1`
    pub fn s(&self) -> f64 {
        let t = self.vartheta;
        2.0 * t * t - 4.0 * t + 1.0
    }

    /// `vartheta^2 - 7 vartheta - 2`
    pub fn q(&self) -> f64 {
        let t = self.vartheta;
        t * t - 7.0 * t - 2.0
    }

    /// `M kappa^2 + S kappa + Q`
    pub fn msq(&self) -> f64 {
        let k = self.kappa;
        self.m() * k * k + self.s() * k + self.q()
    }

    /// `(1 + 2 vartheta)(1 + 2 kappa)`
    pub fn l(&self) -> f64 {
        (1.0 + 2.0 * self.vartheta) * (1.0 + 2.0 * self.kappa)
    }

    /// `(1 + vartheta)(1 + kappa)`
    pub fn w(&self) -> f64 {
        (1.0 + self.vartheta) * (1.0 + self.kappa)
    }
}

impl Serialize for ClassParams {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use crate::report::sig12;
        let mut st = s.serialize_struct("ClassParams", 8)?;
        st.serialize_field("vartheta", &sig12(self.vartheta))?;
        st.serialize_field("kappa", &sig12(self.kappa))?;
        st.serialize_field("varkappa", &sig12(self.varkappa))?;
        st.serialize_field("M", &sig12(self.m()))?;
        st.serialize_field("S", &sig12(self.s()))?;
        st.serialize_field("Q", &sig12(self.q()))?;
        st.serialize_field("L", &sig12(self.l()))?;
        st.serialize_field("W", &sig12(self.w()))?;
        st.end()
    }
}

/// Named subclasses obtained by fixing `vartheta` and `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ClassPreset {
    /// `vartheta = 0`, free `kappa`: Bazilevic-type `zf'/f (f/z)^kappa`.
    GKappa(f64),
    /// `vartheta = kappa = 0`: starlike-type `zf'/f`.
    Starlike,
    /// `vartheta = 0`, `kappa = 1`.
    Convex,
    /// `kappa = 0`, free `vartheta`.
    BVartheta(f64),
    /// `vartheta = 1`, `kappa = 0`.
    R,
}

impl ClassPreset {
    /// The five presets with the free parameters fixed at `1/2`.
    pub fn remark_suite() -> [ClassPreset; 5] {
        [
            ClassPreset::GKappa(0.5),
            ClassPreset::Starlike,
            ClassPreset::Convex,
            ClassPreset::BVartheta(0.5),
            ClassPreset::R,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            ClassPreset::GKappa(k) => format!("G_kappa(kappa={k})"),
            ClassPreset::Starlike => "S*".into(),
            ClassPreset::Convex => "C".into(),
            ClassPreset::BVartheta(t) => format!("B_vartheta(vartheta={t})"),
            ClassPreset::R => "R".into(),
        }
    }

    pub fn vartheta_kappa(&self) -> (f64, f64) {
        match *self {
            ClassPreset::GKappa(k) => (0.0, k),
            ClassPreset::Starlike => (0.0, 0.0),
            ClassPreset::Convex => (0.0, 1.0),
            ClassPreset::BVartheta(t) => (t, 0.0),
            ClassPreset::R => (1.0, 0.0),
        }
    }

    pub fn params(&self, varkappa: f64) -> Result<ClassParams, BazilevicError> {
        let (t, k) = self.vartheta_kappa();
        ClassParams::new(t, k, varkappa)
    }
}

/// `b1 = linear_a2 a2`, `b2 = linear_a3 a3 + quad_a2 a2^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRelation {
    pub linear_a2: f64,
    pub linear_a3: f64,
    pub quad_a2: f64,
}

impl CoefficientRelation {
    /// `(a2, a3)` from `(b1, b2)`.
    pub fn solve(&self, b1: Complex64, b2: Complex64) -> (Complex64, Complex64) {
        let a2 = b1 / self.linear_a2;
        let a3 = (b2 - self.quad_a2 * a2 * a2) / self.linear_a3;
        (a2, a3)
    }
}

/// Which printed form of the `b2` multiplier on `a3` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrintedRelation {
    /// `(1 + 2 vartheta)(2 + kappa)` as in the expansion of `W`.
    Expansion,
    /// `L = (1 + 2 vartheta)(1 + 2 kappa)` as used in the theorem statements.
    Theorem,
}

/// The relation exactly as printed: `(W, (1+2t)(2+k) or L, M k^2 + S k + Q)`.
pub fn paper_relation(params: &ClassParams, form: PrintedRelation) -> CoefficientRelation {
    let linear_a3 = match form {
        PrintedRelation::Expansion => {
            (1.0 + 2.0 * params.vartheta) * (2.0 + params.kappa)
        }
        PrintedRelation::Theorem => params.l(),
    };
    CoefficientRelation {
        linear_a2: params.w(),
        linear_a3,
        quad_a2: params.msq(),
    }
}

fn check_normalized(f: &TruncatedSeries) -> Result<(), BazilevicError> {
    let (a0, a1) = (f.coeff(0), f.coeff(1));
    if a0.norm() > UNIT_TOL || (a1 - 1.0).norm() > UNIT_TOL {
        return Err(BazilevicError::NotNormalized { a0, a1 });
    }
    Ok(())
}

fn check_unit(s: &TruncatedSeries) -> Result<(), BazilevicError> {
    let c = s.coeff(0);
    if (c - 1.0).norm() > UNIT_TOL {
        return Err(BazilevicError::PowerBranchFailure(c));
    }
    Ok(())
}

/// `W(f)` as a series; `f` of order `N` gives a result of order `N - 1`.
pub fn w_functional(f: &TruncatedSeries, params: &ClassParams) -> Result<TruncatedSeries, BazilevicError> {
    check_normalized(f)?;
    if f.order() < 3 {
        return Err(BazilevicError::OrderTooLow(f.order()));
    }
    let (t, k) = (params.vartheta, params.kappa);
    let f_over_z = f.shift_down();
    let fp = f.derive();
    let zfpp = fp.derive().shift_up();

    let zfp_over_f = fp.div(&f_over_z)?;
    let bazilevic = &zfp_over_f * &f_over_z.pow_real(k)?;
    let one = TruncatedSeries::one(zfp_over_f.order());
    let base = &(&bazilevic + &zfpp.div(&fp)?) + &(&zfp_over_f - &one).scale_real(k - 1.0);

    check_unit(&base)?;
    check_unit(&bazilevic)?;
    Ok(&base.pow_real(t)? * &bazilevic.pow_real(1.0 - t)?)
}

/// Fits the true `(b1, b2)` relation numerically from `W` itself.
///
/// Uses `f = z + eps z^2` (for `b1 / a2` and `b2 / a2^2`) and `f = z + eps z^3`
/// (for `b2 / a3`) at two step sizes and extrapolates `2 r(eps) - r(2 eps)`.
pub fn derive_relation(params: &ClassParams) -> Result<CoefficientRelation, BazilevicError> {
    let probe = |k: usize, eps: f64| -> Result<(f64, f64), BazilevicError> {
        let f = TruncatedSeries::new(
            3,
            (0..=3).map(|j| match j {
                1 => Complex64::new(1.0, 0.0),
                j if j == k => Complex64::new(eps, 0.0),
                _ => Complex64::new(0.0, 0.0),
            }),
        );
        let w = w_functional(&f, params)?;
        Ok((w.coeff(1).re, w.coeff(2).re))
    };

    let mut a2_rates = [0.0; 2];
    let mut quad_rates = [0.0; 2];
    let mut a3_rates = [0.0; 2];
    for (i, &eps) in FIT_STEPS.iter().enumerate() {
        let (b1, b2) = probe(2, eps)?;
        a2_rates[i] = b1 / eps;
        quad_rates[i] = b2 / (eps * eps);
        a3_rates[i] = probe(3, eps)?.1 / eps;
    }
    let extrapolate = |what: &'static str, r: [f64; 2]| {
        if (r[0] - r[1]).abs() > FIT_AGREEMENT {
            Err(BazilevicError::FitUnstable { what, first: r[0], second: r[1] })
        } else {
            Ok(2.0 * r[0] - r[1])
        }
    };
    Ok(CoefficientRelation {
        linear_a2: extrapolate("b1/a2", a2_rates)?,
        linear_a3: extrapolate("b2/a3", a3_rates)?,
        quad_a2: extrapolate("b2/a2^2", quad_rates)?,
    })
}

fn check_schwarz(w: &TruncatedSeries) -> Result<(), BazilevicError> {
    let w0 = w.coeff(0);
    let sup = w.sup_on_circle(SCHWARZ_RADIUS, SCHWARZ_SAMPLES);
    if w0.norm() > UNIT_TOL || sup >= 1.0 {
        return Err(BazilevicError::NotSchwarz { w0, sup });
    }
    Ok(())
}

/// Builds `f` of the given order with `W(f) = X(w)` through `z^{order-1}`.
///
/// `w` is treated as a polynomial: coefficients past its order are zero.
/// Each coefficient of `W(f)` is affine in the newest unknown `a_{n+1}`, so
/// the unknown is found from two evaluations and the affinity is checked with
/// a third.
pub fn solve_from_schwarz(
    w: &TruncatedSeries,
    params: &ClassParams,
    order: usize,
) -> Result<TruncatedSeries, BazilevicError> {
    if order < 3 {
        return Err(BazilevicError::OrderTooLow(order));
    }
    check_schwarz(w)?;
    let w = w.truncate(order - 1);
    let target = x_series(params.varkappa, order - 1).compose(&w)?;

    let mut f = TruncatedSeries::identity(order);
    let coeff_at = |f: &mut TruncatedSeries, n: usize, a: f64| -> Result<Complex64, BazilevicError> {
        f.set_coeff(n + 1, Complex64::new(a, 0.0));
        Ok(w_functional(f, params)?.coeff(n))
    };
    for n in 1..order {
        let e0 = coeff_at(&mut f, n, 0.0)?;
        let e1 = coeff_at(&mut f, n, 1.0)?;
        let em = coeff_at(&mut f, n, -1.0)?;
        let slope = e1 - e0;
        if slope.norm() <= UNIT_TOL {
            return Err(BazilevicError::SolveSingular { step: n });
        }
        if ((e0 - em) - slope).norm() > 1e-8 * slope.norm().max(1.0) {
            return Err(BazilevicError::LinearizationFailed { step: n });
        }
        f.set_coeff(n + 1, (target.coeff(n) - e0) / slope);
    }
    Ok(f)
}

/// A candidate Schwarz function for `f` and its sup-norm on `|z| = 0.99`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub w: TruncatedSeries,
    pub sup_norm: f64,
}

impl Witness {
    pub fn is_member(&self) -> bool {
        self.sup_norm <= MEMBERSHIP_THRESHOLD
    }
}

/// Solves `X(w) = W(f)` for `w`, i.e. `w + varkappa w^2 / 2 = log W(f)`.
pub fn membership_witness(f: &TruncatedSeries, params: &ClassParams) -> Result<Witness, BazilevicError> {
    let g = w_functional(f, params)?.log()?;
    let n = g.order();
    let half = params.varkappa / 2.0;
    let mut w = TruncatedSeries::zero(n);
    for k in 1..=n {
        let mut acc = g.coeff(k);
        for i in 1..k {
            acc -= half * w.coeff(i) * w.coeff(k - i);
        }
        w.set_coeff(k, acc);
    }
    for j in 0..SCHWARZ_SAMPLES {
        let t = std::f64::consts::TAU * j as f64 / SCHWARZ_SAMPLES as f64;
        let z = Complex64::from_polar(SCHWARZ_RADIUS, t);
        if (1.0 + params.varkappa * w.eval(z)).norm() < 1e-9 {
            return Err(BazilevicError::WitnessUndefined(z));
        }
    }
    let sup_norm = w.sup_on_circle(SCHWARZ_RADIUS, SCHWARZ_SAMPLES);
    Ok(Witness { w, sup_norm })
}
