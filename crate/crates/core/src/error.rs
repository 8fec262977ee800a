use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline, the simulator or the
/// file front-ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample size {n} is not a perfect {q}-th power of an integer >= 2")]
    NonGridSampleSize { n: usize, q: usize },

    #[error("sample size {n} is too large to plan exactly")]
    SampleSizeTooLarge { n: usize },

    #[error("degenerate binning: {bins_per_axis} bins per axis but only {points_per_axis} grid points")]
    DegenerateBinning {
        bins_per_axis: usize,
        points_per_axis: usize,
    },

    #[error("grid is incomplete: {0}")]
    IncompleteGrid(String),

    #[error("observation {row}: coordinate {value} on axis {axis} is not a grid point")]
    OffGridPoint { row: usize, axis: usize, value: f64 },

    #[error("empty {kind} at flat index {index}")]
    EmptyBin { kind: &'static str, index: usize },

    #[error("unknown wavelet filter `{0}`")]
    UnknownFilter(String),

    #[error("signal length {0} is not a power of two")]
    BadLength(usize),

    #[error("primary level {j0} is invalid for finest level {levels}")]
    BadPrimaryLevel { j0: u32, levels: u32 },

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("Besov exponent w = {0} must be positive")]
    BadExponent(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("covariance matrix is not symmetric positive definite")]
    BadCovariance,

    #[error("density at zero is not known analytically for {0}")]
    UnknownDensityValue(String),

    #[error("noise estimate is degenerate (clamped to {floor:e})")]
    DegenerateNoise { floor: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn bad_value(key: &str, message: impl Into<String>) -> Self {
        Error::BadValue {
            key: key.to_owned(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
