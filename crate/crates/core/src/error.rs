use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected S^{expected}, got S^{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector norm {norm:e} is below 1e-12 and cannot be normalized")]
    NearZeroVector { norm: f64 },

    #[error("not a unit vector: norm {norm} deviates from 1 by more than 1e-9")]
    NotUnit { norm: f64 },

    #[error("chord homotopy undefined: g(x) is the antipode of x")]
    AntipodalPair,

    #[error("unsupported dimension n={n}: {reason}")]
    UnsupportedDimension { n: usize, reason: String },

    #[error("rule `{rule}` is undefined at this profile: {reason}")]
    UndefinedAtProfile { rule: String, reason: String },

    #[error("map `{map}` is undefined at {} point(s), first at {:?}", locations.len(), locations.first())]
    UndefinedAtPoint {
        map: String,
        locations: Vec<Vec<f64>>,
    },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("bad rule parameters: {0}")]
    BadParams(String),

    #[error("twin condition requires x_i != x_j (voters {i} and {j} agree)")]
    TwinPreconditionViolated { i: usize, j: usize },

    #[error("point is not antipodal for the restricted map (residual {residual:e})")]
    NotAntipodal { residual: f64 },

    #[error("winding refinement exceeded max depth on arc [{theta_start}, {theta_end}]")]
    RefinementExceeded { theta_start: f64, theta_end: f64 },

    #[error("winding total is not an integer multiple of 2pi (residual {residual:e})")]
    NonIntegerTotal { residual: f64 },

    #[error("star condition still fails at subdivision level {level}")]
    StarConditionFailed { level: usize },

    #[error("target points disagree on the degree: {counts:?}")]
    TargetDisagreement { counts: Vec<i64> },

    #[error("degree report is incomplete: {missing} entries unavailable")]
    IncompleteReport { missing: usize },

    #[error("k={k} is not supported here (requires k >= {min})")]
    BadK { k: usize, min: usize },

    #[error("antipode search stalled: best residual {best_residual:e} above tolerance {tol:e}")]
    AntipodeSearchStalled { best_residual: f64, tol: f64 },

    #[error("certificate failed re-verification: {0}")]
    Unverified(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
