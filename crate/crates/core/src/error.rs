use thiserror::Error;

use crate::numerics::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension n = {n}: {reason}")]
    UnsupportedDimension { n: u32, reason: &'static str },

    #[error("dimension n = {n} outside theorem scope (n odd integer with n=5 or n>19)")]
    DimensionOutOfScope { n: u32 },

    #[error(
        "tolerance not met: best estimate {value:e} with error estimate {error_estimate:e} \
         after {evaluations} evaluations"
    )]
    ToleranceNotMet {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("divergent integral: tail ratio {tail_ratio:.3} does not shrink")]
    DivergentIntegral { tail_ratio: f64 },

    #[error("integration failure at t = {t:e}")]
    IntegrationFailure { t: f64, partial: Box<Trajectory> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("vanishing denominator risk in multiplier recurrence for n = {n}")]
    VanishingDenominator { n: u32 },

    #[error("psibar construction failed: {0}")]
    PsiBarConstruction(String),
}
