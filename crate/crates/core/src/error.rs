//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("invalid sphere point: {0}")]
    InvalidPoint(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not a singular point: isotropy order is {isotropy}")]
    NotSingular { isotropy: u64 },

    #[error("point is not regular: isotropy order {isotropy} exceeds generic order {generic}")]
    NotRegular { isotropy: u64, generic: u64 },

    #[error("all basis sections vanish at the point (degree {k} is not base-point free there)")]
    BasePoint { k: u64 },

    #[error("orbit distance {distance:.3e} below threshold {threshold:.3e}; decay fit ill-conditioned")]
    OrbitTooClose { distance: f64, threshold: f64 },

    #[error("fit rejected: relative residual {residual:.3e} exceeds {max:.3e}")]
    FitRejected { residual: f64, max: f64 },

    #[error("calibration failed: kappa = {kappa:.6} is not a simple rational within 0.02")]
    CalibrationFailure { kappa: f64 },

    #[error("atlas error: {0}")]
    Atlas(String),

    #[error("unsupported reduction: {0}")]
    UnsupportedReduction(String),

    #[error("moment map never vanishes: auxiliary weights all have the same sign")]
    EmptyLevelSet,

    #[error("quadrature failed to converge: {0}")]
    QuadratureDivergence(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    /// CLI exit code family: 2 for configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidWeights(_)
            | Error::InvalidPoint(_)
            | Error::InvalidConfig(_)
            | Error::NotSingular { .. }
            | Error::NotRegular { .. }
            | Error::EmptyLevelSet
            | Error::Degenerate(_) => 2,
            _ => 3,
        }
    }
}
