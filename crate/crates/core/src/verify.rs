//! End-to-end experiments: printed bound, oracle bound and sampled supremum
//! side by side, with a discrepancy log.
//!
//! The oracle maps a Carathéodory pair `(c1, c2)` to `(a2, a3)` through the
//! fitted [`CoefficientRelation`] and bounds every quadratic functional by
//! rewriting it as `scale * |c2 - v c1^2|` and applying `2 max(1, |2v - 1|)`.
//!
//! Discrepancy identifiers:
//!
//! | id | meaning |
//! |----|---------|
//! | D1 | printed `a2`/`a3`/Fekete–Szegő bound differs from the oracle, or a subclass corollary prints a different `a3` bound |
//! | D2 | printed `|d2|` bound differs from the oracle (factor 2) |
//! | D3 | printed logarithmic-coefficient bound differs from the oracle or from half the Fekete–Szegő bound at `mu = 1/2` |
//! | D4 | printed convolution bound differs from the oracle, or does not reduce to the plain bound at `p2 = p3 = 1` |
//! | D5 | alternate prefactor `(vartheta+2)(1+2kappa)` differs from `L` |
//! | D6 | piecewise real-`mu` bound differs from the complex-`mu` bound |
//! | D7 | printed `|d3|` or inverse Fekete–Szegő bound differs from the oracle |

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::bazilevic::{derive_relation, BazilevicError, ClassParams, ClassPreset, CoefficientRelation};
use crate::bounds::{self, BoundsError, FeketeSzegoInputs};
use crate::caratheodory::{
    brute_force_sup, lemma1_bound, lemma3_bound, lemma4_bound, refine_sup, CaratheodoryError,
    CaratheodoryPoint, GridSpec, SamplerParams,
};
use crate::distributions::{DistributionError, DistributionKind};
use crate::report::{fmt_complex, fmt_sig};

/// Printed and oracle values further apart than this are a discrepancy.
pub const DISCREPANCY_TOL: f64 = 1e-9;
/// Allowed excess of the sampled supremum over the oracle bound.
pub const SOUNDNESS_TOL: f64 = 1e-9;
const REFINE_SWEEPS: usize = 2;

pub const REMARK_MUS: [f64; 5] = [-2.0, 0.0, 0.5, 1.0, 2.0];
pub const INVERSE_HBARS: [f64; 3] = [0.0, 1.0, 2.0];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("sweep needs at least one parameter point and one functional")]
    EmptySweep,
    #[error("invalid functional: {0}")]
    InvalidDescriptor(String),
    #[error(transparent)]
    Bazilevic(#[from] BazilevicError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Caratheodory(#[from] CaratheodoryError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("encoding report: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LemmaKind {
    /// `|c2 - v c1^2|`, real `v`, three-branch bound.
    One,
    /// `|c2 - v c1^2| <= 2 max(1, |2v - 1|)`.
    Three,
    /// `|c2 - hbar c1^2 / 2| <= max(2, 2|hbar - 1|)`.
    Four,
}

/// Convolution weights `p2, p3` with a label for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convolution {
    pub label: String,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub wp2: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub wp3: f64,
}

impl Convolution {
    pub fn unit() -> Self {
        Self {
            label: "unit".into(),
            wp2: 1.0,
            wp3: 1.0,
        }
    }

    pub fn custom(wp2: f64, wp3: f64) -> Result<Self, VerifyError> {
        for (n, value) in [(2, wp2), (3, wp3)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DistributionError::ZeroConvolutionCoefficient { n, value }.into());
            }
        }
        Ok(Self {
            label: format!("custom(p2={},p3={})", fmt_sig(wp2, 12), fmt_sig(wp3, 12)),
            wp2,
            wp3,
        })
    }

    pub fn from_kind(kind: DistributionKind) -> Result<Self, VerifyError> {
        let label = match kind {
            DistributionKind::Poisson { m } => format!("poisson(m={})", fmt_sig(m, 12)),
            DistributionKind::Borel { sigma } => format!("borel(sigma={})", fmt_sig(sigma, 12)),
            DistributionKind::Pascal { q, s } => format!("pascal(q={},s={s})", fmt_sig(q, 12)),
            DistributionKind::Custom => {
                return Err(VerifyError::InvalidDescriptor("use Convolution::custom for explicit weights".into()))
            }
        };
        let c = Self {
            label,
            wp2: kind.coeff(2)?,
            wp3: kind.coeff(3)?,
        };
        Self::custom(c.wp2, c.wp3)?;
        Ok(c)
    }
}

/// The quantity whose supremum an experiment measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Functional {
    A2,
    A3,
    Fs {
        #[serde(serialize_with = "crate::report::complex::serialize")]
        mu: Complex64,
    },
    InverseD2,
    InverseD3,
    InverseFs {
        #[serde(serialize_with = "crate::report::complex::serialize")]
        hbar: Complex64,
    },
    LogGamma1,
    LogGamma2,
    ConvFs {
        #[serde(serialize_with = "crate::report::complex::serialize")]
        mu: Complex64,
        dist: Convolution,
    },
    /// A bare Carathéodory lemma; `v` holds `hbar` for [`LemmaKind::Four`].
    Lemma {
        which: LemmaKind,
        #[serde(serialize_with = "crate::report::complex::serialize")]
        v: Complex64,
    },
}

impl Functional {
    pub fn fs(mu: f64) -> Self {
        Functional::Fs { mu: Complex64::new(mu, 0.0) }
    }

    pub fn label(&self) -> String {
        match self {
            Functional::A2 => "a2".into(),
            Functional::A3 => "a3".into(),
            Functional::Fs { mu } => format!("fs(mu={})", fmt_complex(*mu, 12)),
            Functional::InverseD2 => "inverse-d2".into(),
            Functional::InverseD3 => "inverse-d3".into(),
            Functional::InverseFs { hbar } => format!("inverse-fs(hbar={})", fmt_complex(*hbar, 12)),
            Functional::LogGamma1 => "log-gamma1".into(),
            Functional::LogGamma2 => "log-gamma2".into(),
            Functional::ConvFs { mu, dist } => format!("conv-fs(mu={},{})", fmt_complex(*mu, 12), dist.label),
            Functional::Lemma { which, v } => {
                let n = match which {
                    LemmaKind::One => 1,
                    LemmaKind::Three => 3,
                    LemmaKind::Four => 4,
                };
                format!("lemma{n}(v={})", fmt_complex(*v, 12))
            }
        }
    }

    fn validate(&self) -> Result<(), VerifyError> {
        match self {
            Functional::Lemma { which: LemmaKind::One, v } if v.im != 0.0 => {
                Err(VerifyError::InvalidDescriptor(format!("lemma 1 needs a real v, got {v}")))
            }
            Functional::ConvFs { dist, .. } => Convolution::custom(dist.wp2, dist.wp3).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Discrepancy id used when the printed bound disagrees with the oracle.
    fn family(&self) -> Option<&'static str> {
        match self {
            Functional::A2 | Functional::A3 | Functional::Fs { .. } => Some("D1"),
            Functional::InverseD2 => Some("D2"),
            Functional::LogGamma1 | Functional::LogGamma2 => Some("D3"),
            Functional::ConvFs { .. } => Some("D4"),
            Functional::InverseD3 | Functional::InverseFs { .. } => Some("D7"),
            Functional::Lemma { .. } => None,
        }
    }

    fn weights(&self) -> (f64, f64) {
        match self {
            Functional::ConvFs { dist, .. } => (dist.wp2, dist.wp3),
            _ => (1.0, 1.0),
        }
    }
}

/// `(c1, c2) -> (a2, a3)` through the oracle relation and `X(w)` expansion
/// `b1 = c1/2`, `b2 = c2/2 + (varkappa - 1) c1^2 / 8`, then divided by the
/// convolution weights.
#[derive(Debug, Clone, Copy)]
struct Mapping {
    rel: CoefficientRelation,
    varkappa: f64,
    wp2: f64,
    wp3: f64,
}

impl Mapping {
    #[inline]
    fn coeffs(&self, p: &CaratheodoryPoint) -> (Complex64, Complex64) {
        let b1 = p.c1 * 0.5;
        let b2 = p.c2 * 0.5 + p.c1 * p.c1 * ((self.varkappa - 1.0) / 8.0);
        let (a2, a3) = self.rel.solve(b1, b2);
        (a2 / self.wp2, a3 / self.wp3)
    }

    /// `|a3 - mu a2^2| = scale |c2 - v c1^2|`; returns `(scale, v)`.
    fn fekete_szego(&self, mu: Complex64) -> (f64, Complex64) {
        let CoefficientRelation { linear_a2: l2, linear_a3: l3, quad_a2: q } = self.rel;
        let v = -(self.varkappa - 1.0) / 4.0
            + q / (2.0 * l2 * l2)
            + mu * (l3 * self.wp3 / (2.0 * l2 * l2 * self.wp2 * self.wp2));
        (1.0 / (2.0 * l3 * self.wp3), v)
    }

    fn fs_bound(&self, mu: Complex64) -> f64 {
        let (scale, v) = self.fekete_szego(mu);
        scale * lemma3_bound(v)
    }
}

fn lemma_v(which: LemmaKind, v: Complex64) -> Complex64 {
    match which {
        LemmaKind::Four => v / 2.0,
        _ => v,
    }
}

fn evaluate(f: &Functional, m: &Mapping, p: &CaratheodoryPoint) -> f64 {
    if let Functional::Lemma { which, v } = f {
        return (p.c2 - lemma_v(*which, *v) * p.c1 * p.c1).norm();
    }
    let (a2, a3) = m.coeffs(p);
    match f {
        Functional::A2 => a2.norm(),
        Functional::A3 => a3.norm(),
        Functional::Fs { mu } | Functional::ConvFs { mu, .. } => (a3 - mu * a2 * a2).norm(),
        Functional::InverseD2 => bounds::inverse_coeffs(a2, a3).0.norm(),
        Functional::InverseD3 => bounds::inverse_coeffs(a2, a3).1.norm(),
        Functional::InverseFs { hbar } => {
            let (d2, d3) = bounds::inverse_coeffs(a2, a3);
            (d3 - hbar * d2 * d2).norm()
        }
        Functional::LogGamma1 => bounds::log_coeffs(a2, a3).0.norm(),
        Functional::LogGamma2 => bounds::log_coeffs(a2, a3).1.norm(),
        Functional::Lemma { .. } => unreachable!(),
    }
}

fn oracle_bound(f: &Functional, m: &Mapping) -> f64 {
    let two = Complex64::new(2.0, 0.0);
    match f {
        Functional::A2 | Functional::InverseD2 => 1.0 / m.rel.linear_a2,
        Functional::LogGamma1 => 0.5 / m.rel.linear_a2,
        Functional::A3 => m.fs_bound(Complex64::new(0.0, 0.0)),
        Functional::Fs { mu } | Functional::ConvFs { mu, .. } => m.fs_bound(*mu),
        Functional::InverseD3 => m.fs_bound(two),
        Functional::InverseFs { hbar } => m.fs_bound(two - hbar),
        Functional::LogGamma2 => 0.5 * m.fs_bound(Complex64::new(0.5, 0.0)),
        Functional::Lemma { which, v } => lemma3_bound(lemma_v(*which, *v)),
    }
}

fn as_stated_bound(f: &Functional, params: &ClassParams) -> Result<f64, VerifyError> {
    Ok(match f {
        Functional::A2 => bounds::a2_bound(params),
        Functional::A3 => bounds::a3_bound(params),
        Functional::Fs { mu } => bounds::fs_complex(params, *mu).value,
        Functional::InverseD2 => bounds::inverse_d2_bound(params).0,
        Functional::InverseD3 => bounds::inverse_d3_bound(params),
        Functional::InverseFs { hbar } => bounds::inverse_fs(params, *hbar),
        Functional::LogGamma1 => bounds::log_coeff_bounds(params).g1,
        Functional::LogGamma2 => bounds::log_coeff_bounds(params).g2,
        Functional::ConvFs { mu, dist } => {
            bounds::conv_fs_complex(&FeketeSzegoInputs::new(*params, *mu).with_convolution(dist.wp2, dist.wp3))?
        }
        Functional::Lemma { which, v } => match which {
            LemmaKind::One => lemma1_bound(v.re),
            LemmaKind::Three => lemma3_bound(*v),
            LemmaKind::Four => lemma4_bound(*v),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub id: &'static str,
    pub description: String,
    /// The printed value.
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub printed: f64,
    /// What it was compared with.
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub reference: f64,
}

fn differs(a: f64, b: f64) -> bool {
    (a - b).abs() > DISCREPANCY_TOL
}

/// Subclass corollaries whose `(vartheta, kappa)` match `params`.
fn matching_presets(params: &ClassParams) -> Vec<ClassPreset> {
    let (t, k) = (params.vartheta(), params.kappa());
    let mut out = Vec::new();
    if t == 0.0 {
        out.push(ClassPreset::GKappa(k));
        if k == 0.0 {
            out.push(ClassPreset::Starlike);
        }
        if k == 1.0 {
            out.push(ClassPreset::Convex);
        }
    }
    if k == 0.0 {
        out.push(ClassPreset::BVartheta(t));
        if t == 1.0 {
            out.push(ClassPreset::R);
        }
    }
    out
}

fn discrepancies(
    f: &Functional,
    params: &ClassParams,
    as_stated: f64,
    oracle: f64,
) -> Result<Vec<Discrepancy>, VerifyError> {
    let mut out = Vec::new();
    if let Some(id) = f.family() {
        if differs(as_stated, oracle) {
            out.push(Discrepancy {
                id,
                description: format!("printed {} bound differs from the oracle bound", f.label()),
                printed: as_stated,
                reference: oracle,
            });
        }
    }
    match f {
        Functional::A2 => {
            for preset in matching_presets(params) {
                let printed = bounds::remark_bounds(preset, params.varkappa()).a2;
                if differs(printed, oracle) {
                    out.push(Discrepancy {
                        id: "D1",
                        description: format!("{} corollary a2 bound differs from the oracle bound", preset.name()),
                        printed,
                        reference: oracle,
                    });
                }
            }
        }
        Functional::A3 => {
            for preset in matching_presets(params) {
                let remark = bounds::remark_bounds(preset, params.varkappa());
                if differs(remark.a3_max_form, as_stated) || differs(remark.a3_max_form, oracle) {
                    out.push(Discrepancy {
                        id: "D1",
                        description: format!(
                            "{} corollary a3 bound differs from the general a3 bound {} (oracle {})",
                            preset.name(),
                            fmt_sig(as_stated, 12),
                            fmt_sig(oracle, 12)
                        ),
                        printed: remark.a3_max_form,
                        reference: as_stated,
                    });
                }
            }
        }
        Functional::Fs { mu } => {
            let fs = bounds::fs_complex(params, *mu);
            if differs(fs.alternate, fs.value) {
                out.push(Discrepancy {
                    id: "D5",
                    description: "prefactor 1/((vartheta+2)(1+2kappa)) gives a different bound than 1/L".into(),
                    printed: fs.alternate,
                    reference: fs.value,
                });
            }
            if mu.im == 0.0 {
                let piecewise = bounds::fs_real(params, mu.re);
                if differs(piecewise.value, fs.value) {
                    out.push(Discrepancy {
                        id: "D6",
                        description: format!(
                            "piecewise real-mu bound ({:?} branch{}) differs from the complex-mu bound",
                            piecewise.branch,
                            if piecewise.non_positive { ", non-positive" } else { "" }
                        ),
                        printed: piecewise.value,
                        reference: fs.value,
                    });
                }
            }
        }
        Functional::LogGamma2 => {
            let b = bounds::log_coeff_bounds(params);
            if differs(b.g2, b.g2_from_fs) {
                out.push(Discrepancy {
                    id: "D3",
                    description: "printed gamma2 bound is not half the Fekete-Szego bound at mu = 1/2".into(),
                    printed: b.g2,
                    reference: b.g2_from_fs,
                });
            }
        }
        Functional::ConvFs { mu, .. } => {
            let unit = bounds::conv_fs_complex(&FeketeSzegoInputs::new(*params, *mu))?;
            let plain = bounds::fs_complex(params, *mu).value;
            if differs(unit, plain) {
                out.push(Discrepancy {
                    id: "D4",
                    description: format!(
                        "convolution bound at p2 = p3 = 1 is {} times the plain Fekete-Szego bound",
                        fmt_sig(unit / plain, 12)
                    ),
                    printed: unit,
                    reference: plain,
                });
            }
        }
        _ => {}
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub experiment_id: String,
    pub params: ClassParams,
    pub functional: Functional,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub as_stated: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub oracle: f64,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub empirical_sup: f64,
    pub witness: CaratheodoryPoint,
    pub witness_params: SamplerParams,
    pub discrepancy_ids: Vec<&'static str>,
    pub discrepancies: Vec<Discrepancy>,
    /// `oracle - empirical_sup`
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub gap: f64,
    /// The sampled supremum is above the printed bound.
    pub as_stated_exceeded: bool,
    /// The sampled supremum is within [`SOUNDNESS_TOL`] of the oracle bound.
    pub sound: bool,
}

pub fn experiment_id(functional: &Functional, params: &ClassParams) -> String {
    format!(
        "{}@vartheta={},kappa={},varkappa={}",
        functional.label(),
        fmt_sig(params.vartheta(), 12),
        fmt_sig(params.kappa(), 12),
        fmt_sig(params.varkappa(), 12)
    )
}

pub fn run_experiment(functional: &Functional, params: &ClassParams, grid: &GridSpec) -> Result<BoundReport, VerifyError> {
    functional.validate()?;
    let (wp2, wp3) = functional.weights();
    let mapping = Mapping {
        rel: derive_relation(params)?,
        varkappa: params.varkappa(),
        wp2,
        wp3,
    };
    let eval = |p: &CaratheodoryPoint| evaluate(functional, &mapping, p);
    let coarse = brute_force_sup(eval, grid);
    let sup = refine_sup(eval, grid, &coarse, REFINE_SWEEPS);

    let oracle = oracle_bound(functional, &mapping);
    let as_stated = as_stated_bound(functional, params)?;
    let mut found = discrepancies(functional, params, as_stated, oracle)?;
    let as_stated_exceeded = sup.value > as_stated + SOUNDNESS_TOL;
    if as_stated_exceeded {
        if let Some(id) = functional.family() {
            if !found.iter().any(|d| d.id == id) {
                found.push(Discrepancy {
                    id,
                    description: "sampled supremum exceeds the printed bound".into(),
                    printed: as_stated,
                    reference: sup.value,
                });
            }
        }
    }
    let mut ids: Vec<&'static str> = found.iter().map(|d| d.id).collect();
    ids.sort_unstable();
    ids.dedup();

    Ok(BoundReport {
        experiment_id: experiment_id(functional, params),
        params: *params,
        functional: functional.clone(),
        as_stated,
        oracle,
        empirical_sup: sup.value,
        witness: sup.witness,
        witness_params: sup.params,
        discrepancy_ids: ids,
        discrepancies: found,
        gap: oracle - sup.value,
        as_stated_exceeded,
        sound: sup.value <= oracle + SOUNDNESS_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub reports: usize,
    /// Number of reports carrying each id.
    pub discrepancy_counts: BTreeMap<&'static str, usize>,
    pub as_stated_exceeded: usize,
    pub soundness_violations: usize,
    #[serde(serialize_with = "crate::report::rounded::serialize")]
    pub min_gap: f64,
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub reports: Vec<BoundReport>,
    pub summary: SweepSummary,
}

fn summarize(reports: &[BoundReport]) -> SweepSummary {
    let mut counts = BTreeMap::new();
    for r in reports {
        for id in &r.discrepancy_ids {
            *counts.entry(*id).or_insert(0) += 1;
        }
    }
    let violations = reports.iter().filter(|r| !r.sound).count();
    SweepSummary {
        reports: reports.len(),
        discrepancy_counts: counts,
        as_stated_exceeded: reports.iter().filter(|r| r.as_stated_exceeded).count(),
        soundness_violations: violations,
        min_gap: reports.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min),
        sound: violations == 0,
    }
}

/// One report per `(params, functional)` pair, ordered by
/// `(vartheta, kappa, varkappa)` and then by position in `functionals`.
pub fn sweep(param_grid: &[ClassParams], functionals: &[Functional], grid: &GridSpec) -> Result<Sweep, VerifyError> {
    if param_grid.is_empty() || functionals.is_empty() {
        return Err(VerifyError::EmptySweep);
    }
    let mut points = param_grid.to_vec();
    points.sort_by(|a, b| {
        a.vartheta()
            .total_cmp(&b.vartheta())
            .then(a.kappa().total_cmp(&b.kappa()))
            .then(a.varkappa().total_cmp(&b.varkappa()))
    });
    let mut reports = Vec::with_capacity(points.len() * functionals.len());
    for params in &points {
        for f in functionals {
            reports.push(run_experiment(f, params, grid)?);
        }
    }
    let summary = summarize(&reports);
    Ok(Sweep { reports, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Subclass presets with `a2`, `a3` and Fekete–Szegő at several `mu`.
    Remarks,
    /// The Carathéodory lemmas alone.
    Lemmas,
    /// Everything in `Remarks` plus inverse, logarithmic and convolution bounds.
    Full,
}

pub fn remark_functionals() -> Vec<Functional> {
    let mut v = vec![Functional::A2, Functional::A3];
    v.extend(REMARK_MUS.iter().map(|&mu| Functional::fs(mu)));
    v
}

pub fn lemma_functionals() -> Vec<Functional> {
    let lemma = |which, re, im| Functional::Lemma { which, v: Complex64::new(re, im) };
    let mut v: Vec<Functional> = [-1.0, 0.0, 0.5, 1.0, 2.0].iter().map(|&x| lemma(LemmaKind::One, x, 0.0)).collect();
    v.extend([(0.3, 0.4), (-0.5, 1.0), (1.2, -0.7)].iter().map(|&(re, im)| lemma(LemmaKind::Three, re, im)));
    v.extend([(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)].iter().map(|&(re, im)| lemma(LemmaKind::Four, re, im)));
    v
}

pub fn full_functionals() -> Result<Vec<Functional>, VerifyError> {
    let mut v = remark_functionals();
    v.extend([Functional::InverseD2, Functional::InverseD3]);
    v.extend(INVERSE_HBARS.iter().map(|&h| Functional::InverseFs { hbar: Complex64::new(h, 0.0) }));
    v.extend([Functional::LogGamma1, Functional::LogGamma2]);
    let half = Complex64::new(0.5, 0.0);
    v.push(Functional::ConvFs { mu: Complex64::new(0.0, 0.0), dist: Convolution::unit() });
    for kind in [
        DistributionKind::Poisson { m: 1.0 },
        DistributionKind::Borel { sigma: 0.5 },
        DistributionKind::Pascal { q: 0.5, s: 2 },
    ] {
        v.push(Functional::ConvFs { mu: half, dist: Convolution::from_kind(kind)? });
    }
    Ok(v)
}

pub fn run_suite(suite: Suite, varkappa: f64, grid: &GridSpec) -> Result<Sweep, VerifyError> {
    let presets = || -> Result<Vec<ClassParams>, VerifyError> {
        ClassPreset::remark_suite()
            .iter()
            .map(|p| p.params(varkappa).map_err(VerifyError::from))
            .collect()
    };
    match suite {
        Suite::Remarks => sweep(&presets()?, &remark_functionals(), grid),
        Suite::Lemmas => sweep(&[ClassParams::new(0.0, 0.0, varkappa)?], &lemma_functionals(), grid),
        Suite::Full => sweep(&presets()?, &full_functionals()?, grid),
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line<'a> {
    Report(&'a BoundReport),
    Summary(&'a SweepSummary),
}

/// JSON lines: one `"kind": "report"` object per report, then the summary.
pub fn to_jsonl(sweep: &Sweep) -> Result<String, VerifyError> {
    let mut out = String::new();
    for r in &sweep.reports {
        out.push_str(&serde_json::to_string(&Line::Report(r))?);
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(&Line::Summary(&sweep.summary))?);
    out.push('\n');
    Ok(out)
}

/// `dir/stem.ext` becomes `dir/stem-<unix millis>.ext`; an existing file is
/// never overwritten.
pub fn timestamped_path(requested: &Path) -> PathBuf {
    let millis = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let stem = requested.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let ext = requested.extension().and_then(|s| s.to_str()).unwrap_or("jsonl");
    requested.with_file_name(format!("{stem}-{millis}.{ext}"))
}

pub fn write_jsonl(requested: &Path, sweep: &Sweep) -> Result<PathBuf, VerifyError> {
    let body = to_jsonl(sweep)?;
    let base = timestamped_path(requested);
    let mut path = base.clone();
    for n in 1.. {
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                file.write_all(body.as_bytes())?;
                return Ok(path);
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("jsonl");
                path = base.with_file_name(format!("{stem}-{n}.{ext}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64, k: f64, x: f64) -> ClassParams {
        ClassParams::new(t, k, x).unwrap()
    }

    fn grid() -> GridSpec {
        GridSpec::uniform(16).unwrap()
    }

    #[test]
    fn a2_reports() {
        let r = run_experiment(&Functional::A2, &p(0.0, 0.0, 1.0), &grid()).unwrap();
        assert_eq!(r.as_stated, 1.0);
        assert!((r.oracle - 1.0).abs() < 1e-9);
        assert!((0.999..=1.0 + 1e-9).contains(&r.empirical_sup));
        assert!(r.discrepancy_ids.is_empty());

        let r = run_experiment(&Functional::A2, &p(1.0, 1.0, 1.0), &grid()).unwrap();
        assert_eq!(r.as_stated, 0.25);
        assert!((0.249..=0.25 + 1e-9).contains(&r.empirical_sup));
        assert!(r.sound && r.gap >= -1e-9);
    }

    #[test]
    fn starlike_a3_flags_corollary() {
        let r = run_experiment(&Functional::A3, &p(0.0, 0.0, 1.0), &grid()).unwrap();
        assert!(r.sound);
        let d = r.discrepancies.iter().find(|d| d.description.starts_with("S*")).unwrap();
        assert_eq!((d.id, d.printed, d.reference), ("D1", 1.25, 1.0));
    }

    #[test]
    fn inverse_d2_flags_factor_two() {
        let r = run_experiment(&Functional::InverseD2, &p(0.0, 0.0, 1.0), &grid()).unwrap();
        assert_eq!(r.discrepancy_ids, vec!["D2"]);
        assert!(r.as_stated_exceeded);
        assert!((r.empirical_sup - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lemma_reports_are_tight() {
        for f in lemma_functionals() {
            let r = run_experiment(&f, &p(0.0, 0.0, 1.0), &grid()).unwrap();
            assert!(r.sound, "{}", r.experiment_id);
            assert!((r.as_stated - r.oracle).abs() < 1e-12, "{}", r.experiment_id);
            assert!(r.gap < 0.05, "{} gap {}", r.experiment_id, r.gap);
        }
    }

    #[test]
    fn lemma_one_rejects_complex_v() {
        let f = Functional::Lemma { which: LemmaKind::One, v: Complex64::new(0.0, 1.0) };
        assert!(matches!(run_experiment(&f, &p(0.0, 0.0, 1.0), &grid()), Err(VerifyError::InvalidDescriptor(_))));
    }

    #[test]
    fn sweep_orders_and_counts() {
        let pts: Vec<_> = [1.0, 0.0, 0.5]
            .iter()
            .flat_map(|&t| [0.5, 1.0, 0.0].map(move |k| p(t, k, 1.0)))
            .collect();
        let s = sweep(&pts, &[Functional::A2], &GridSpec::uniform(6).unwrap()).unwrap();
        assert_eq!(s.reports.len(), 9);
        assert!(s.summary.discrepancy_counts.is_empty());
        let keys: Vec<_> = s.reports.iter().map(|r| (r.params.vartheta(), r.params.kappa())).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);

        assert!(matches!(sweep(&pts, &[], &grid()), Err(VerifyError::EmptySweep)));
        assert!(matches!(sweep(&[], &[Functional::A2], &grid()), Err(VerifyError::EmptySweep)));
    }

    #[test]
    fn jsonl_layout() {
        let s = sweep(&[p(0.0, 0.0, 1.0)], &[Functional::A2, Functional::fs(0.5)], &GridSpec::uniform(5).unwrap()).unwrap();
        let text = to_jsonl(&s).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0]["kind"], "report");
        assert_eq!(lines[1]["functional"]["name"], "fs");
        assert_eq!(lines[2]["kind"], "summary");
        assert_eq!(text, to_jsonl(&s).unwrap());
    }

    #[test]
    fn write_never_overwrites() {
        let dir = tempfile::tempdir().unwrap();
        let s = sweep(&[p(0.0, 0.0, 1.0)], &[Functional::A2], &GridSpec::uniform(3).unwrap()).unwrap();
        let a = write_jsonl(&dir.path().join("run.jsonl"), &s).unwrap();
        let b = write_jsonl(&dir.path().join("run.jsonl"), &s).unwrap();
        assert_ne!(a, b);
        assert!(a.file_name().unwrap().to_str().unwrap().starts_with("run-"));
    }
}
