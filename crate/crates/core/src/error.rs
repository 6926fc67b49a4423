//! Error types shared by every module.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument violates its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive quadrature stopped at the subdivision cap before reaching
    /// the requested relative tolerance.
    #[error("quadrature did not converge: achieved relative error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// Duplicate sample values collapsed a kNN distance to zero.
    #[error("degenerate sample: value {value} repeats often enough that its kNN distance is zero")]
    DegenerateSample { value: f64 },

    /// No observed sample fell inside the generated support interval.
    #[error("empty overlap: no observed sample inside the generated support [{lo}, {hi}]")]
    EmptyOverlap { lo: f64, hi: f64 },

    /// Every candidate probed by an optimizer had an empty-overlap objective.
    #[error("fit failed: the objective was -inf everywhere probed")]
    NoOverlap,

    /// Too many benchmark trials failed to produce an estimate.
    #[error("campaign failed: {failed} of {total} trials errored (over 20%)")]
    CampaignFailure { failed: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
