use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("phase is undefined at the origin of the oscillator plane")]
    PhaseUndefined,

    #[error("basis evaluation failed: {0}")]
    BasisEvaluation(String),

    #[error("expected a {expected} movement, got {actual}")]
    WrongKind {
        expected: crate::MovementKind,
        actual: crate::MovementKind,
    },

    #[error("invalid demonstration: {0}")]
    InvalidDemonstration(String),

    #[error("rhythmic demonstration is not closed: |y(t1) - y(tP)| = {gap:e} exceeds tolerance {tolerance:e}")]
    OpenCurve { gap: f64, tolerance: f64 },

    #[error("regressor matrix A is identically zero")]
    ZeroRegressors,

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("integration diverged at t = {time}")]
    IntegrationDiverged { time: f64 },

    #[error("matrix is not Hurwitz (max real eigenvalue part {max_real:e}); no contraction certificate")]
    NotHurwitz { max_real: f64 },

    #[error("metric is not positive definite at r = {r}, theta = {theta} (min eigenvalue {min_eigenvalue:e})")]
    MetricNotPositiveDefinite { r: f64, theta: f64, min_eigenvalue: f64 },

    #[error("invalid activation schedule: {0}")]
    InvalidSchedule(String),

    #[error("combination is invalid:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidCombination(Vec<crate::combine::Violation>),

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("parse error in {path}: {message} (byte offset {offset})")]
    Parse {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
