//! Resonances of `-h²∂ₓ² + h^{2-α}δ₁` on the half line with a Dirichlet
//! condition at the origin.
//!
//! A resonance is a nonzero root of
//! `F(z) = h^{-α} e^{2iz/h} - h^{-α} + 2iz/h`. Each root is tied to a Lambert W
//! branch `k` through `z_k = (ih/2)(W_k(y) - h^{-α})` with
//! `y = h^{-α} e^{h^{-α}}`, which is evaluated in the cancellation-free form
//! `z_k = (ih/2)(2πik - ln(σ_k h^α) + R_k)`, `σ_k h^α = 1 + h^α ln h^{-α} + 2πik h^α`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambert::{w_branch, BranchValue, LogArgument};

/// `|Im z| / h` above which `e^{2iz/h}` is refused.
pub const EXPONENT_GUARD: f64 = 300.0;
pub const NEWTON_MAX_ITER: usize = 50;
pub const NEWTON_REL_TOL: f64 = 1e-10;
pub const DEFAULT_X_MAX: f64 = 3.0;
pub const DEFAULT_STATE_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub h: f64,
    pub alpha: f64,
    pub eps: f64,
}

impl ModelParams {
    pub fn new(h: f64, alpha: f64, eps: f64) -> Result<Self> {
        let params = Self { h, alpha, eps };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParams(format!(
                "eps must lie in (0, 1), got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// Barrier strength `h^{-α}`.
    pub fn barrier(&self) -> f64 {
        self.h.powf(-self.alpha)
    }

    pub fn log_argument(&self) -> Result<LogArgument> {
        LogArgument::from_params(self.h, self.alpha)
    }

    /// Magnitude scale `h^{-α} + 2|z|/h` of the terms of `F`.
    pub fn residual_scale(&self, z: Complex64) -> f64 {
        self.barrier() + 2.0 * z.norm() / self.h
    }

    pub fn in_annulus(&self, z: Complex64) -> bool {
        let r = z.norm();
        self.eps <= r && r <= 1.0 / self.eps
    }
}

fn guard(params: &ModelParams, z: Complex64, reach: f64) -> Result<()> {
    let ratio = z.im.abs() * reach / params.h;
    if !(ratio <= EXPONENT_GUARD) {
        return Err(Error::Overflow(ratio));
    }
    Ok(())
}

/// `e^{iθ} - 1` for complex `θ`, without cancellation for small `θ`.
fn exp_i_m1(theta: Complex64) -> Complex64 {
    // θ = q + ip, e^{iθ} = e^{-p}(cos q + i sin q)
    let p = -theta.im;
    let q = theta.re;
    let half = (0.5 * q).sin();
    let re = p.exp_m1() * q.cos() - 2.0 * half * half;
    let im = p.exp() * q.sin();
    Complex64::new(re, im)
}

/// `F(z) = h^{-α}(e^{2iz/h} - 1) + 2iz/h`.
pub fn residual(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    guard(params, z, 1.0)?;
    let a = params.barrier();
    let theta = z * (2.0 / params.h);
    Ok(exp_i_m1(theta) * a + Complex64::i() * theta)
}

/// `F'(z) = (2i/h)(h^{-α} e^{2iz/h} + 1)`.
pub fn residual_derivative(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    guard(params, z, 1.0)?;
    let e = (Complex64::i() * z * (2.0 / params.h)).exp();
    Ok(Complex64::new(0.0, 2.0 / params.h) * (e * params.barrier() + 1.0))
}

/// Admissible `|k|` interval: `ceil(ε/(2πh)) <= |k| <= floor(2/(επh))`, never 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchRange {
    pub k_min: i64,
    pub k_max: i64,
}

impl BranchRange {
    pub fn contains(&self, k: i64) -> bool {
        let a = k.abs();
        k != 0 && self.k_min <= a && a <= self.k_max
    }

    /// Every admissible `k`, negative ones first, ascending.
    pub fn indices(&self) -> Vec<i64> {
        let neg = (self.k_min..=self.k_max).rev().map(|k| -k);
        neg.chain(self.k_min..=self.k_max).collect()
    }

    pub fn len(&self) -> usize {
        2 * (self.k_max - self.k_min + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn range_from_bounds(lower: f64, upper: f64) -> Result<BranchRange> {
    let k_min = (lower.ceil() as i64).max(1);
    let k_max = upper.floor() as i64;
    if k_min > k_max {
        return Err(Error::EmptyRange { k_min, k_max });
    }
    Ok(BranchRange { k_min, k_max })
}

pub fn branch_range(params: &ModelParams) -> Result<BranchRange> {
    let ModelParams { h, eps, .. } = *params;
    range_from_bounds(eps / (2.0 * PI * h), 2.0 / (eps * PI * h))
}

/// The branch range with both bounds moved outward by a factor of 2.
pub fn widened_range(params: &ModelParams) -> Result<BranchRange> {
    let ModelParams { h, eps, .. } = *params;
    range_from_bounds(eps / (4.0 * PI * h), 4.0 / (eps * PI * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub k: i64,
    pub z_series: Complex64,
    pub z_refined: Complex64,
    pub residual_series: f64,
    pub residual_refined: f64,
    pub in_annulus: bool,
    pub branch: BranchValue,
}

/// `ln(1 + δ + iβ)` with the modulus taken through `ln_1p`.
fn ln_one_plus(delta: f64, beta: f64) -> Complex64 {
    let t = delta * (2.0 + delta) + beta * beta;
    Complex64::new(0.5 * t.ln_1p(), beta.atan2(1.0 + delta))
}

/// `(ih/2)(2πik - ln(σ_k h^α) + R_k)` for a computed branch value.
pub fn branch_to_z(params: &ModelParams, branch: &BranchValue) -> Complex64 {
    let ModelParams { h, alpha, .. } = *params;
    let ha = h.powf(alpha);
    let k = branch.k as f64;
    let log_scaled = ln_one_plus(alpha * ha * (-h.ln()), TAU * k * ha);
    let inner = Complex64::new(0.0, TAU * k) - log_scaled + branch.remainder;
    Complex64::new(-inner.im, inner.re) * (0.5 * h)
}

pub fn resonance_from_branch(params: &ModelParams, k: i64) -> Result<Resonance> {
    if k == 0 {
        return Err(Error::ZeroBranch);
    }
    let wide = widened_range(params)?;
    if !wide.contains(k) {
        return Err(Error::BranchOutOfRange {
            k,
            lo: wide.k_min,
            hi: wide.k_max,
        });
    }
    let arg = params.log_argument()?;
    let branch = w_branch(&arg, k)?;
    let z_series = branch_to_z(params, &branch);
    let z_refined = newton_refine(params, z_series)?;
    Ok(Resonance {
        k,
        z_series,
        z_refined,
        residual_series: residual(params, z_series)?.norm(),
        residual_refined: residual(params, z_refined)?.norm(),
        in_annulus: params.in_annulus(z_refined),
        branch,
    })
}

/// Newton iteration on `F`, stopping once `|F| <= 1e-10 (h^{-α} + 2|z|/h)`
/// and one further polishing step has been taken.
pub fn newton_refine(params: &ModelParams, z0: Complex64) -> Result<Complex64> {
    let mut z = z0;
    let mut best = (f64::INFINITY, z0);
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let f = residual(params, z)?;
        let fnorm = f.norm();
        if fnorm < best.0 {
            best = (fnorm, z);
        }
        if fnorm <= NEWTON_REL_TOL * params.residual_scale(z) {
            if converged || fnorm == 0.0 {
                return Ok(best.1);
            }
            converged = true;
        }
        let d = residual_derivative(params, z)?;
        if d.norm() <= f64::EPSILON * params.residual_scale(z) / params.h {
            return Err(Error::DerivativeVanished(z));
        }
        z -= f / d;
    }
    if converged {
        return Ok(best.1);
    }
    Err(Error::NoConvergence {
        method: "Newton",
        iterations: NEWTON_MAX_ITER,
        residual: best.0,
    })
}

/// Every resonance from the widened branch scan, ordered by `k`.
pub fn resonances(params: &ModelParams) -> Result<Vec<Resonance>> {
    let ks = widened_range(params)?.indices();
    ks.par_iter()
        .map(|&k| resonance_from_branch(params, k))
        .collect()
}

/// Resonances of the widened scan with `ε <= |z| <= 1/ε`.
pub fn annulus_resonances(params: &ModelParams) -> Result<Vec<Resonance>> {
    Ok(resonances(params)?
        .into_iter()
        .filter(|r| r.in_annulus)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonantState {
    pub z: Complex64,
    /// `C` with `sin(z/h) = C e^{iz/h}`.
    pub matching_constant: Complex64,
    pub samples: Vec<(f64, Complex64)>,
    /// `|u'(1-) - u'(1+) + h^{-α} u(1)|`.
    pub jump_residual: f64,
}

/// Uniform grid of [`DEFAULT_STATE_SAMPLES`] points on `[0, DEFAULT_X_MAX]`.
pub fn default_state_grid() -> Vec<f64> {
    let n = DEFAULT_STATE_SAMPLES;
    (0..n)
        .map(|i| DEFAULT_X_MAX * i as f64 / (n - 1) as f64)
        .collect()
}

/// `u = sin(zx/h)` on `[0, 1]` and `C e^{izx/h}` beyond; unnormalized.
pub fn resonant_state(params: &ModelParams, z: Complex64, xs: &[f64]) -> Result<ResonantState> {
    let reach = xs.iter().fold(1.0_f64, |m, &x| m.max(x.abs()));
    guard(params, z, reach)?;
    let h = params.h;
    let i = Complex64::i();
    let phase = z / h;
    let sin1 = phase.sin();
    let c = sin1 * (-i * phase).exp();
    let samples = xs
        .iter()
        .map(|&x| {
            let u = if x <= 1.0 {
                (phase * x).sin()
            } else {
                c * (i * phase * x).exp()
            };
            (x, u)
        })
        .collect();
    let left = phase * phase.cos();
    let right = i * phase * c * (i * phase).exp();
    let jump_residual = (left - right + sin1 * params.barrier()).norm();
    Ok(ResonantState {
        z,
        matching_constant: c,
        samples,
        jump_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(h: f64, alpha: f64, eps: f64) -> ModelParams {
        ModelParams::new(h, alpha, eps).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(-1.0, 1.0, 0.3).is_err());
        assert!(ModelParams::new(0.1, 0.0, 0.3).is_err());
        assert!(ModelParams::new(0.1, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.1, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn residual_vanishes_at_origin() {
        let f = residual(&p(0.1, 0.7, 0.3), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(f, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn residual_reflection_identity() {
        let params = p(0.1, 0.7, 0.3);
        let z = Complex64::new(0.7, -0.1);
        let lhs = residual(&params, -z.conj()).unwrap();
        let rhs = residual(&params, z).unwrap().conj();
        assert!((lhs - rhs).norm() <= 1e-13 * params.residual_scale(z));
    }

    #[test]
    fn residual_matches_direct_formula() {
        let params = p(0.1, 2.0, 0.3);
        let a = params.barrier();
        for &z in &[Complex64::new(0.31, -0.001), Complex64::new(1.4, -0.2)] {
            let e = (Complex64::i() * z * 20.0).exp();
            let direct = e * a - a + Complex64::i() * z * 20.0;
            let f = residual(&params, z).unwrap();
            assert!((f - direct).norm() <= 1e-12 * params.residual_scale(z));
        }
    }

    #[test]
    fn exponent_guard() {
        let params = p(0.01, 0.7, 0.3);
        let r = residual(&params, Complex64::new(1.0, -3.5));
        assert!(matches!(r, Err(Error::Overflow(_))));
    }

    #[test]
    fn branch_range_examples() {
        assert_eq!(
            branch_range(&p(0.1, 1.0, 0.5)).unwrap(),
            BranchRange {
                k_min: 1,
                k_max: 12
            }
        );
        assert_eq!(
            branch_range(&p(0.01, 1.0, 0.5)).unwrap(),
            BranchRange {
                k_min: 8,
                k_max: 127
            }
        );
        let r = branch_range(&p(0.1, 1.0, 0.5)).unwrap();
        assert!(!r.contains(0));
        assert!(!r.indices().contains(&0));
        assert_eq!(r.indices().len(), r.len());
    }

    #[test]
    fn empty_range_for_large_h() {
        let r = branch_range(&p(10.0, 1.0, 0.5));
        assert!(matches!(r, Err(Error::EmptyRange { .. })));
    }

    #[test]
    fn zero_branch_rejected() {
        let r = resonance_from_branch(&p(0.1, 0.7, 0.3), 0);
        assert!(matches!(r, Err(Error::ZeroBranch)));
    }

    #[test]
    fn out_of_range_branch_rejected() {
        let r = resonance_from_branch(&p(0.1, 0.7, 0.3), 10_000);
        assert!(matches!(r, Err(Error::BranchOutOfRange { .. })));
    }

    #[test]
    fn refined_resonance_is_root() {
        let params = p(0.1, 0.7, 0.3);
        let r = resonance_from_branch(&params, 5).unwrap();
        assert!(r.residual_refined <= 1e-10 * params.residual_scale(r.z_refined));
        assert!((r.z_series - r.z_refined).norm() <= 0.5 * params.h * r.branch.tail_bound + 1e-9);
        assert!(r.z_refined.im < 0.0);
        // k > 0 lands in the left half plane
        assert!(r.z_refined.re < 0.0);
    }

    #[test]
    fn newton_fixed_point_and_basin() {
        let params = p(0.1, 2.0, 0.3);
        let r = resonance_from_branch(&params, 3).unwrap();
        assert!((r.z_refined - r.z_series).norm() <= 0.5 * params.h * r.branch.tail_bound + 1e-9);
        let again = newton_refine(&params, r.z_refined).unwrap();
        assert!((again - r.z_refined).norm() <= 1e-12);
        let nudged = newton_refine(&params, r.z_refined + Complex64::new(1e-3, -1e-3)).unwrap();
        assert!((nudged - r.z_refined).norm() <= 1e-12);
    }

    #[test]
    fn conjugate_pairing() {
        let params = p(0.1, 0.7, 0.3);
        for k in 1..=12 {
            let a = resonance_from_branch(&params, k).unwrap();
            let b = resonance_from_branch(&params, -k).unwrap();
            assert!((b.z_refined + a.z_refined.conj()).norm() <= 1e-10);
        }
    }

    #[test]
    fn resonant_state_conditions() {
        let params = p(0.1, 2.0, 0.3);
        let r = resonance_from_branch(&params, -3).unwrap();
        let state = resonant_state(&params, r.z_refined, &default_state_grid()).unwrap();
        assert_eq!(state.samples.len(), DEFAULT_STATE_SAMPLES);
        assert_eq!(state.samples[0].1, Complex64::new(0.0, 0.0));
        let phase = r.z_refined / params.h;
        let cont = phase.sin() - state.matching_constant * (Complex64::i() * phase).exp();
        assert!(cont.norm() <= 1e-14 * phase.sin().norm().max(1.0));
        assert!(state.jump_residual <= 1e-8 * params.barrier());
    }
}
