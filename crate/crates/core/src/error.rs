//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by chart, curvature, model, homotopy and pipeline code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} is outside the chart domain (required margin {margin})")]
    OutsideDomain { point: Vec<f64>, margin: f64 },

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("bending schedule did not terminate after {0} bend iterations")]
    BendNotTerminating(usize),

    #[error("bending curve radius underflow: r = {0:.3e}")]
    RadiusUnderflow(f64),

    #[error("homotopy is not of positive scalar curvature: min s = {s_min:.6e} at {point:?}, t = {t}")]
    NotPositiveScalarHomotopy {
        s_min: f64,
        point: Vec<f64>,
        t: f64,
    },

    #[error("certificate failed in phase {phase}: {detail}")]
    CertificateFailure { phase: &'static str, detail: String },

    #[error("quadrature volume {quadrature:.6e} exceeds bound {bound:.6e}")]
    VolumeBoundExceeded { quadrature: f64, bound: f64 },

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("degenerate volume split: a{0} = 0 (the split tends to 0 in the limit)")]
    DegenerateSplit(usize),

    #[error("end metrics do not match: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    EndMetricMismatch { residual: f64, tolerance: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
