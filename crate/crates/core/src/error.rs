use std::path::PathBuf;

use thiserror::Error;

use crate::fock::ModeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {0} appears more than once")]
    DuplicateMode(ModeId),

    #[error("mode {mode} has truncation dimension {dim}, need at least 2")]
    InvalidDimension { mode: ModeId, dim: usize },

    #[error("total Hilbert space dimension overflows the index type")]
    DimensionOverflow,

    #[error("a Hilbert space needs at least one mode")]
    EmptySpace,

    #[error("mode {0} is not part of this space")]
    UnknownMode(ModeId),

    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,

    #[error("operator is not Hermitian: max |A - A^dagger| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("expectation of a Hermitian operator has imaginary part {imag:e}")]
    ImaginaryExpectation { imag: f64 },

    #[error("space does not match model parameters: {0}")]
    ParamsMismatch(String),

    #[error("k2 normalisation 1/(N(N-1)) is undefined for N = 1")]
    UndefinedK2,

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid state recipe: {0}")]
    InvalidRecipe(String),

    #[error("occupation {occupation} of mode {mode} exceeds truncation dimension {dim}")]
    OccupationOutOfRange {
        mode: ModeId,
        occupation: usize,
        dim: usize,
    },

    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("integration tolerance {tol:e} not reached above the minimum step {min_step:e}")]
    StepFloor { tol: f64, min_step: f64 },

    #[error("invalid decay parameters: {0}")]
    InvalidDecay(String),

    #[error("k2 time series covers [{start}, {end}] but integration needs [0, {t_max}]")]
    ClosureCoverage { start: f64, end: f64, t_max: f64 },

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("need at least 3 particle numbers for an affine fit, got {0}")]
    TooFewNValues(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("prerequisite step failed: {0}")]
    Prerequisite(String),

    #[error("malformed input {path}: {reason}")]
    Input { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Configuration problems map to exit status 2, everything else to 1.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Input { .. }
                | Error::InvalidParams(_)
                | Error::InvalidRecipe(_)
                | Error::InvalidGrid(_)
                | Error::InvalidDecay(_)
                | Error::InvalidDimension { .. }
                | Error::DuplicateMode(_)
                | Error::OccupationOutOfRange { .. }
                | Error::UndefinedK2
                | Error::TooFewNValues(_)
                | Error::ClosureCoverage { .. }
        )
    }
}
