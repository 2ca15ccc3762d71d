//! Scattering resonances of the semiclassical delta barrier
//! `-h²∂ₓ² + h^{2-α}δ₁` on the half line.
//!
//! Resonances are computed branch by branch from a multi-branch Lambert W
//! series ([`lambert`]) and refined against the transcendental resonance
//! equation ([`model`]). [`asymptotics`] checks the logarithmic (`α < 1`) and
//! polynomial (`α > 1`) width laws with explicit error budgets, and
//! [`figure`] extracts the zero sets of `Re F` and `Im F` for plotting.

pub mod asymptotics;
pub mod error;
pub mod figure;
pub mod lambert;
pub mod model;
pub mod output;
pub mod stirling;

pub use error::{Error, Result};
pub use model::{ModelParams, Resonance};
