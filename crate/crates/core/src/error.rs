use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ground-state iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("ground-state iteration collapsed to zero at iteration {iteration}")]
    Collapse { iteration: usize },

    #[error("parameters outside the supported regime: {0}")]
    OutOfRegime(String),

    #[error("time window [{t1}, {t2}] not covered by the recorded series")]
    WindowOutOfRange { t1: f64, t2: f64 },

    #[error("not enough samples for a fit: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },

    #[error("bad checkpoint magic: expected \"FNLS\", found {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported checkpoint version {found} (this reader handles version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error(
        "checkpoint size mismatch: header implies {expected} bytes of field data, found {found}"
    )]
    SizeMismatch { expected: usize, found: usize },

    #[error("time series has no records")]
    EmptySeries,

    #[error("invalid scenario config: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
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
