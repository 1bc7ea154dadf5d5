use thiserror::Error;

use crate::repr::BetaVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system {n1}x{n2}: {reason}")]
    InvalidSystem { n1: u32, n2: u32, reason: String },

    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors belong to different systems ({left} vs {right})")]
    SystemMismatch { left: String, right: String },

    #[error("beta_0 = {0} but a normalized state (beta_0 = 1) is required")]
    NotNormalized(f64),

    #[error("Breuer criterion is inapplicable for N1 = {0}: the map is positive only for even N1 >= 4")]
    CriterionInapplicable(u32),

    #[error("amplitudes of subsystem {subsystem} have norm {norm}, expected 1")]
    AmplitudeNorm { subsystem: u8, norm: f64 },

    #[error("operator is not rotationally invariant (residual {residual:e})")]
    NotInvariant { residual: f64, projected: BetaVector },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid half-integer: {0}")]
    InvalidSpin(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn invalid_system(n1: u32, n2: u32, reason: impl Into<String>) -> Self {
        Error::InvalidSystem { n1, n2, reason: reason.into() }
    }
}
