use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Stirling table holds p <= {limit}, requested p = {requested}")]
    Capacity { limit: usize, requested: usize },

    #[error("series coefficient requires m >= 1, got m = {0}")]
    ZeroOrder(usize),

    #[error("log argument L = {0} is outside the large-y regime (need L >= 1)")]
    SmallArgument(f64),

    #[error("series regime violated at k = {k}: |ln(s)/s| = {ratio} > 1/2")]
    Regime { k: i64, ratio: f64 },

    #[error("W series for branch {k} stopped decreasing at weight {weight}")]
    SeriesDivergence { k: i64, weight: usize },

    #[error("{method} did not converge in {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error(
        "Halley iterate left branch strip: expected winding {expected}, found {found} at w = {w}"
    )]
    BranchJump {
        expected: i64,
        found: i64,
        w: Complex64,
    },

    #[error("derivative vanished at z = {0}")]
    DerivativeVanished(Complex64),

    #[error("exponent guard: |Im z|/h = {0} exceeds 300")]
    Overflow(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no admissible branch indices: ceil bound {k_min} exceeds floor bound {k_max}")]
    EmptyRange { k_min: i64, k_max: i64 },

    #[error("branch k = 0 is excluded (it gives z = 0)")]
    ZeroBranch,

    #[error("branch k = {k} lies outside the widened scan [{lo}, {hi}]")]
    BranchOutOfRange { k: i64, lo: i64, hi: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("reflection coefficient has a pole at z = {0}")]
    Pole(Complex64),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Regime { .. }
                | Error::SeriesDivergence { .. }
                | Error::NoConvergence { .. }
                | Error::BranchJump { .. }
                | Error::DerivativeVanished(_)
                | Error::Overflow(_)
        )
    }
}
