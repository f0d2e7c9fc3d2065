use thiserror::Error;

use crate::hilbert::{FieldMode, UnitVector};

pub type Result<T, E = GleasonError> = std::result::Result<T, E>;

/// Best iterate of a sphere maximization that ran out of sweeps.
#[derive(Debug, Clone)]
pub struct NonConvergence {
    /// Index of the nested sphere (0 is the full space).
    pub stage: usize,
    pub sweeps: usize,
    pub best_vector: UnitVector,
    pub best_value: f64,
    /// Size of the last sweep's move, measured phase-invariantly.
    pub residual: f64,
}

#[derive(Debug, Error)]
pub enum GleasonError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("empty vector list")]
    EmptyInput,

    #[error("vector {index} is (numerically) linearly dependent on its predecessors")]
    RankDeficient { index: usize },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("vectors are not orthonormal: deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("basis has {found} vectors, dimension is {dim}")]
    IncompleteBasis { dim: usize, found: usize },

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("field mismatch: operation needs {expected:?} mode, got {found:?}")]
    FieldMismatch { expected: FieldMode, found: FieldMode },

    #[error("{method} requires dimension {required}, got {found}")]
    UnsupportedDimension { method: &'static str, required: usize, found: usize },

    #[error("valuation {value} outside [0, 1]")]
    InvalidValuation { value: f64 },

    #[error("no tabulated valuation for the queried vector")]
    TableMiss { vector: UnitVector },

    #[error("unknown reconstruction method `{0}`")]
    UnknownMethod(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(
        "sphere maximization did not converge at stage {} after {} sweeps (residual {:e})",
        .0.stage, .0.sweeps, .0.residual
    )]
    NonConvergence(Box<NonConvergence>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for GleasonError {
    fn from(e: serde_json::Error) -> Self {
        GleasonError::Parse(e.to_string())
    }
}
