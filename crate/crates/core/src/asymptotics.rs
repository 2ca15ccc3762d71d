//! Leading-order width laws and their error budgets.
//!
//! For `α < 1` the width follows `-Im z ≈ (h/2) ln|2h^{α-1} Re z|` with
//! `0 <= deviation <= (5/4) h^{3-2α} ε^{-2}`; for `α > 1` it follows
//! `-Im z ≈ (Re z)² h^{2α-1}` with
//! `|deviation| <= 7 h^{2α+1} ln²(h^{-α}) + 34 ε^{-4} h^{4α-3}`. Both hold only
//! once `h` is small enough, so violations are reported as data. `α = 1` gets
//! both curves and no verdict.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{annulus_resonances, ModelParams, Resonance};

/// Allowed undershoot of the lower inequality for `α < 1`.
pub const LOWER_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthRegime {
    SmallAlpha,
    BigAlpha,
    Transitional,
}

impl WidthRegime {
    pub fn of(alpha: f64) -> Self {
        if alpha < 1.0 {
            WidthRegime::SmallAlpha
        } else if alpha > 1.0 {
            WidthRegime::BigAlpha
        } else {
            WidthRegime::Transitional
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            WidthRegime::SmallAlpha => "small_alpha",
            WidthRegime::BigAlpha => "big_alpha",
            WidthRegime::Transitional => "transitional",
        }
    }
}

/// Which approximation curve a prediction comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthCurve {
    LogWidth,
    QuadWidth,
}

impl WidthCurve {
    pub fn as_str(&self) -> &'static str {
        match self {
            WidthCurve::LogWidth => "log_width",
            WidthCurve::QuadWidth => "quad_width",
        }
    }

    pub fn predict(&self, params: &ModelParams, re_z: f64) -> Result<f64> {
        match self {
            WidthCurve::LogWidth => width_small_alpha(params, re_z),
            WidthCurve::QuadWidth => Ok(width_big_alpha(params, re_z)),
        }
    }

    /// Signed deviation of a resonance from the curve: `-Im z - prediction`
    /// for the log law, `Im z + prediction` for the quadratic one.
    pub fn deviation(&self, params: &ModelParams, z: Complex64) -> Result<f64> {
        let pred = self.predict(params, z.re)?;
        Ok(match self {
            WidthCurve::LogWidth => -z.im - pred,
            WidthCurve::QuadWidth => z.im + pred,
        })
    }
}

/// `(h/2) ln|2 h^{α-1} Re z|`, the predicted `-Im z` for `α < 1`.
pub fn width_small_alpha(params: &ModelParams, re_z: f64) -> Result<f64> {
    if re_z == 0.0 || !re_z.is_finite() {
        return Err(Error::Domain(format!(
            "logarithmic width needs Re z != 0, got {re_z}"
        )));
    }
    let ModelParams { h, alpha, .. } = *params;
    Ok(0.5 * h * (2.0 * h.powf(alpha - 1.0) * re_z).abs().ln())
}

/// `(Re z)² h^{2α-1}`, the predicted `-Im z` for `α > 1`.
pub fn width_big_alpha(params: &ModelParams, re_z: f64) -> f64 {
    re_z * re_z * params.h.powf(2.0 * params.alpha - 1.0)
}

/// `(5/4) h^{3-2α} ε^{-2}`.
pub fn small_alpha_bound(params: &ModelParams) -> f64 {
    let ModelParams { h, alpha, eps } = *params;
    1.25 * h.powf(3.0 - 2.0 * alpha) / (eps * eps)
}

/// `7 h^{2α+1} ln²(h^{-α}) + 34 ε^{-4} h^{4α-3}`.
pub fn big_alpha_bound(params: &ModelParams) -> f64 {
    let ModelParams { h, alpha, eps } = *params;
    let log = alpha * (-h.ln());
    7.0 * h.powf(2.0 * alpha + 1.0) * log * log + 34.0 * h.powf(4.0 * alpha - 3.0) / eps.powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthApproximation {
    pub regime: WidthRegime,
    pub bound: Option<f64>,
}

impl WidthApproximation {
    pub fn new(params: &ModelParams) -> Self {
        let regime = WidthRegime::of(params.alpha);
        let bound = match regime {
            WidthRegime::SmallAlpha => Some(small_alpha_bound(params)),
            WidthRegime::BigAlpha => Some(big_alpha_bound(params)),
            WidthRegime::Transitional => None,
        };
        Self { regime, bound }
    }

    pub fn curves(&self) -> &'static [WidthCurve] {
        match self.regime {
            WidthRegime::SmallAlpha => &[WidthCurve::LogWidth],
            WidthRegime::BigAlpha => &[WidthCurve::QuadWidth],
            WidthRegime::Transitional => &[WidthCurve::LogWidth, WidthCurve::QuadWidth],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyRow {
    pub k: i64,
    pub re_z: f64,
    pub im_z: f64,
    pub curve: WidthCurve,
    pub predicted_width: f64,
    pub deviation: f64,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub params: ModelParams,
    pub regime: WidthRegime,
    pub bound: Option<f64>,
    pub rows: Vec<CertifyRow>,
}

impl CertifyReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.pass == Some(false)).count()
    }

    /// True when no row fails; the transitional regime always passes.
    pub fn all_pass(&self) -> bool {
        self.violations() == 0
    }

    /// Largest `|deviation|` per curve.
    pub fn max_deviation(&self, curve: WidthCurve) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.curve == curve)
            .map(|r| r.deviation.abs())
            .reduce(f64::max)
    }
}

fn check(regime: WidthRegime, deviation: f64, bound: f64) -> bool {
    match regime {
        WidthRegime::SmallAlpha => -LOWER_SLACK <= deviation && deviation <= bound,
        _ => deviation.abs() <= bound,
    }
}

/// Compares each in-annulus resonance (refined values) against the width law
/// of its regime. Resonances outside the annulus are skipped. For `α = 1`
/// each resonance yields a log-law row followed by a quadratic-law row, both
/// without bound or verdict.
pub fn certify_bounds(params: &ModelParams, resonances: &[Resonance]) -> Result<CertifyReport> {
    let approx = WidthApproximation::new(params);
    let mut rows = Vec::new();
    for r in resonances.iter().filter(|r| r.in_annulus) {
        let z = r.z_refined;
        for &curve in approx.curves() {
            let predicted_width = curve.predict(params, z.re)?;
            let deviation = curve.deviation(params, z)?;
            rows.push(CertifyRow {
                k: r.k,
                re_z: z.re,
                im_z: z.im,
                curve,
                predicted_width,
                deviation,
                bound: approx.bound,
                pass: approx.bound.map(|b| check(approx.regime, deviation, b)),
            });
        }
    }
    Ok(CertifyReport {
        params: *params,
        regime: approx.regime,
        bound: approx.bound,
        rows,
    })
}

/// Full pipeline: widened branch scan, annulus filter, certification.
pub fn certify(params: &ModelParams) -> Result<CertifyReport> {
    certify_bounds(params, &annulus_resonances(params)?)
}

/// Scans `hs` from largest to smallest and returns the first `h` at which
/// every in-annulus resonance meets its bound.
pub fn first_passing_h(alpha: f64, eps: f64, hs: &[f64]) -> Result<Option<f64>> {
    let mut sorted = hs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    for h in sorted {
        let params = ModelParams::new(h, alpha, eps)?;
        if certify(&params)?.all_pass() {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveDeviations {
    pub k: i64,
    pub re_z: f64,
    pub log_deviation: f64,
    pub quad_deviation: f64,
}

/// Deviations from both curves at the lowest and highest `Re z > 0` resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionalComparison {
    pub lowest: CurveDeviations,
    pub highest: CurveDeviations,
}

impl TransitionalComparison {
    /// Quadratic law closer at the low end, logarithmic law closer at the high end.
    pub fn ordering_reverses(&self) -> bool {
        self.lowest.quad_deviation.abs() < self.lowest.log_deviation.abs()
            && self.highest.log_deviation.abs() < self.highest.quad_deviation.abs()
    }
}

pub fn compare_curves(
    params: &ModelParams,
    resonances: &[Resonance],
) -> Result<Option<TransitionalComparison>> {
    let deviations = |r: &Resonance| -> Result<CurveDeviations> {
        Ok(CurveDeviations {
            k: r.k,
            re_z: r.z_refined.re,
            log_deviation: WidthCurve::LogWidth.deviation(params, r.z_refined)?,
            quad_deviation: WidthCurve::QuadWidth.deviation(params, r.z_refined)?,
        })
    };
    let mut right: Vec<&Resonance> = resonances.iter().filter(|r| r.z_refined.re > 0.0).collect();
    right.sort_by(|a, b| a.z_refined.re.total_cmp(&b.z_refined.re));
    match (right.first(), right.last()) {
        (Some(lo), Some(hi)) => Ok(Some(TransitionalComparison {
            lowest: deviations(lo)?,
            highest: deviations(hi)?,
        })),
        _ => Ok(None),
    }
}

/// `R = h^{2-2α} / (4z² + h^{2-2α})` for the barrier on the whole line.
pub fn reflection_coefficient(h: f64, alpha: f64, z: Complex64) -> Result<Complex64> {
    let strength = h.powf(2.0 - 2.0 * alpha);
    let denom = z * z * 4.0 + strength;
    if denom.norm() <= f64::EPSILON * strength || !denom.is_finite() {
        return Err(Error::Pole(z));
    }
    Ok(Complex64::new(strength, 0.0) / denom)
}
