use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` out of range: {detail}")]
    ParamOutOfRange { name: &'static str, detail: String },

    #[error("integrand returned a non-finite value at {point:?}")]
    NonFiniteSample { point: Vec<f64> },

    #[error("map evaluated at its pole {point:?}")]
    EvalAtPole { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("composition leaves the domain of `{outer}` at sample {point:?}")]
    RangeEscape { outer: String, point: Vec<f64> },

    #[error("Jacobian is non-positive on {fraction:.2}% of {samples} samples")]
    DegenerateJacobian { fraction: f64, samples: usize },

    #[error("no usable boundary trace values")]
    EmptyTraces,

    #[error("curve family is empty")]
    EmptyFamily,

    #[error("boundary set is empty")]
    EmptySet,

    #[error("set measure {measure} exceeds the smallness threshold {threshold}")]
    ThresholdExceeded { measure: f64, threshold: f64 },

    #[error("no mass below M = {m}")]
    ZeroMass { m: f64 },

    #[error("discrete energy {energy} diverges")]
    EnergyDivergent { energy: f64 },

    #[error(
        "no grid value of M satisfies the tail-mass threshold (tail at last node: {tail_mass})"
    )]
    ThresholdUnreachable { tail_mass: f64 },

    #[error("s-grid starts at {first} which is not above M = {m}")]
    SGridBelowM { first: f64, m: f64 },

    #[error("unknown map id `{0}`")]
    UnknownMap(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    ConfigInvalid(Vec<String>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        Error::ParamOutOfRange {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
