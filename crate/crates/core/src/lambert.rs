//! Multi-branch Lambert W for large positive arguments given in log form.
//!
//! The argument `y` is never formed: it is carried as `L = ln y`, and every
//! branch value is checked through the log-form equation
//! `w + ln w = L + 2πik'` with principal `ln`. Two independent routes are
//! provided: the convergent double series in `ln σ / σ` with `σ = L + 2πik`,
//! and Halley iteration on the log-form equation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stirling::coefficient_layers;

/// Largest total weight `j + m` summed by the series.
pub const MAX_WEIGHT: usize = 40;

pub const HALLEY_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Provenance {
    ExplicitY,
    FromParams { h: f64, alpha: f64 },
}

/// `L = ln y` for the W argument `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogArgument {
    l: f64,
    provenance: Provenance,
}

impl LogArgument {
    /// Accepts `L >= 1`, i.e. `y >= e`. The closed end keeps `W_0(e) = 1`
    /// representable for the Halley path.
    pub fn new(l: f64) -> Result<Self> {
        if !l.is_finite() || l < 1.0 {
            return Err(Error::SmallArgument(l));
        }
        Ok(Self {
            l,
            provenance: Provenance::ExplicitY,
        })
    }

    /// `y = h^{-α} e^{h^{-α}}`, so `L = h^{-α} + α ln(1/h)`.
    pub fn from_params(h: f64, alpha: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite() && alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "need h > 0 and alpha > 0, got h = {h}, alpha = {alpha}"
            )));
        }
        let l = h.powf(-alpha) + alpha * (-h.ln());
        if !l.is_finite() || l < 1.0 {
            return Err(Error::SmallArgument(l));
        }
        Ok(Self {
            l,
            provenance: Provenance::FromParams { h, alpha },
        })
    }

    pub fn value(&self) -> f64 {
        self.l
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `σ_k = L + 2πik`.
    pub fn shifted(&self, k: i64) -> Complex64 {
        Complex64::new(self.l, TAU * k as f64)
    }

    /// `|ln σ_k / σ_k|`; the series is only used where this is at most 1/2.
    pub fn regime_ratio(&self, k: i64) -> f64 {
        let s = self.shifted(k);
        (s.ln() / s).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Series,
    Halley,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub max_weight: usize,
    /// A weight layer whose absolute size falls below `rel_tol * |partial sum|` ends the sum.
    pub rel_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            max_weight: MAX_WEIGHT,
            rel_tol: 1e-16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchValue {
    pub k: i64,
    /// Winding integer `k'` in `w + ln w = L + 2πik'`.
    pub winding: i64,
    pub w: Complex64,
    /// `R_k = w - σ + ln σ`.
    pub remainder: Complex64,
    /// Estimated bound on the omitted part of the remainder series.
    pub tail_bound: f64,
    /// `(max j, max m)` reached by the summation; `(0, 0)` for Halley values.
    pub terms_used: (usize, usize),
    pub method: Method,
}

/// `round((Im w + arg w) / 2π)`.
pub fn winding_number(w: Complex64) -> i64 {
    ((w.im + w.arg()) / TAU).round() as i64
}

/// `|w + ln w - (L + 2πik')|`.
pub fn log_form_residual(arg: &LogArgument, w: Complex64, winding: i64) -> f64 {
    (w + w.ln() - arg.shifted(winding)).norm()
}

/// `σ - ln σ + ln σ / σ`: the two leading terms plus the first remainder term.
pub fn default_seed(arg: &LogArgument, k: i64) -> Complex64 {
    let s = arg.shifted(k);
    let ls = s.ln();
    s - ls + ls / s
}

/// Sum `W_k = σ - ln σ + Σ_{j>=0, m>=1} c_{j,m} (ln σ)^m / σ^{j+m}` by weight
/// layers `n = j + m`.
pub fn w_series(arg: &LogArgument, k: i64, policy: TruncationPolicy) -> Result<BranchValue> {
    let s = arg.shifted(k);
    let ls = s.ln();
    let inv = s.inv();
    let b = ls * inv;
    let ratio = b.norm();
    if !(ratio <= 0.5) {
        return Err(Error::Regime { k, ratio });
    }

    let max_weight = policy.max_weight.clamp(1, MAX_WEIGHT);
    let layers = coefficient_layers(max_weight);

    let mut b_pow = vec![Complex64::new(1.0, 0.0); max_weight + 1];
    let mut a_pow = vec![Complex64::new(1.0, 0.0); max_weight + 1];
    for i in 1..=max_weight {
        b_pow[i] = b_pow[i - 1] * b;
        a_pow[i] = a_pow[i - 1] * inv;
    }

    let mut sum = Complex64::new(0.0, 0.0);
    let mut last_abs = f64::INFINITY;
    let mut weight = 0;
    for (n, coeffs) in layers.iter().enumerate().skip(1) {
        let mut layer = Complex64::new(0.0, 0.0);
        let mut layer_abs = 0.0;
        for (i, &c) in coeffs.iter().enumerate() {
            let m = i + 1;
            let term = b_pow[m] * a_pow[n - m] * c;
            layer += term;
            layer_abs += term.norm();
        }
        if n >= 3 && layer_abs > 0.0 && layer_abs >= last_abs {
            return Err(Error::SeriesDivergence { k, weight: n });
        }
        sum += layer;
        last_abs = layer_abs;
        weight = n;
        if layer_abs <= policy.rel_tol * sum.norm() {
            break;
        }
    }

    // Successive layers shrink by a factor approaching roughly 2|ln σ/σ|;
    // the majorant ratio sits halfway between that and 1.
    let q = 0.5 * (1.0 + (2.0 * ratio).min(1.0));
    let tail_bound = last_abs.max(policy.rel_tol * sum.norm()) * q / (1.0 - q);

    let w = s - ls + sum;
    Ok(BranchValue {
        k,
        winding: winding_number(w),
        w,
        remainder: sum,
        tail_bound,
        terms_used: (weight - 1, weight),
        method: Method::Series,
    })
}

/// Halley iteration on `g(w) = w + ln w - (L + 2πik')`, with `k'` fixed from
/// the seed. For this argument class the winding of `W_k` is `k` itself, so a
/// seed or iterate with any other winding is a branch jump.
pub fn w_halley(arg: &LogArgument, k: i64, seed: Complex64) -> Result<Complex64> {
    let winding = winding_number(seed);
    if winding != k {
        return Err(Error::BranchJump {
            expected: k,
            found: winding,
            w: seed,
        });
    }
    let target = arg.shifted(winding);
    let mut w = seed;
    let mut residual = f64::INFINITY;
    let mut polished = false;
    for _ in 0..HALLEY_MAX_ITER {
        if w.norm() == 0.0 || !w.is_finite() {
            break;
        }
        let g = w + w.ln() - target;
        residual = g.norm();
        if residual <= 1e-13 * (1.0 + w.norm()) {
            if polished {
                let found = winding_number(w);
                if found != winding {
                    return Err(Error::BranchJump {
                        expected: winding,
                        found,
                        w,
                    });
                }
                return Ok(w);
            }
            polished = true;
        }
        let inv = w.inv();
        let d1 = 1.0 + inv;
        let d2 = -(inv * inv);
        let newton = g / d1;
        let step = newton / (1.0 - newton * d2 / (2.0 * d1));
        w -= step;
    }
    Err(Error::NoConvergence {
        method: "Halley",
        iterations: HALLEY_MAX_ITER,
        residual,
    })
}

/// Series value where the series is admissible, otherwise Halley from the
/// default seed.
pub fn w_branch(arg: &LogArgument, k: i64) -> Result<BranchValue> {
    match w_series(arg, k, TruncationPolicy::default()) {
        Ok(v) => Ok(v),
        Err(Error::Regime { .. } | Error::SeriesDivergence { .. }) => {
            let seed = default_seed(arg, k);
            let w = w_halley(arg, k, seed)?;
            let s = arg.shifted(k);
            // a posteriori Newton error estimate
            let g = w + w.ln() - arg.shifted(winding_number(w));
            let tail_bound = 2.0 * (g / (1.0 + w.inv())).norm();
            Ok(BranchValue {
                k,
                winding: winding_number(w),
                w,
                remainder: w - s + s.ln(),
                tail_bound,
                terms_used: (0, 0),
                method: Method::Halley,
            })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub k: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub tail_bound: f64,
    pub ok: bool,
}

/// Compares `|R_k - ln σ/σ|` with `2 |ln σ/σ|^2`.
pub fn remainder_tail_check(arg: &LogArgument, k: i64) -> Result<TailCheck> {
    let v = w_series(arg, k, TruncationPolicy::default())?;
    let s = arg.shifted(k);
    let b = s.ln() / s;
    let lhs = (v.remainder - b).norm();
    let rhs = 2.0 * b.norm_sqr();
    Ok(TailCheck {
        k,
        lhs,
        rhs,
        tail_bound: v.tail_bound,
        ok: lhs <= rhs + v.tail_bound,
    })
}

/// Smallest `L` in `grid` from which on (for it and every larger grid value)
/// the tail estimate holds for all `ks`. Inputs where the series is
/// inadmissible count as failures.
pub fn tail_estimate_threshold(ks: &[i64], grid: &[f64]) -> Option<f64> {
    let mut sorted: Vec<f64> = grid.iter().copied().filter(|l| *l >= 1.0).collect();
    sorted.sort_by(f64::total_cmp);
    let holds = |l: f64| {
        let arg = match LogArgument::new(l) {
            Ok(a) => a,
            Err(_) => return false,
        };
        ks.iter()
            .all(|&k| remainder_tail_check(&arg, k).map(|c| c.ok).unwrap_or(false))
    };
    let mut threshold = None;
    for &l in sorted.iter().rev() {
        if holds(l) {
            threshold = Some(l);
        } else {
            break;
        }
    }
    threshold
}
