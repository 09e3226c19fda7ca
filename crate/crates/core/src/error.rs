use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "truncation insufficient: tail mass {tail:.3e} in the top levels of n_max={n_max} exceeds {eps:.0e}; \
         increase n_max to at least {suggested}"
    )]
    TruncationInsufficient {
        n_max: usize,
        tail: f64,
        eps: f64,
        suggested: usize,
    },

    #[error("state has zero norm after construction ({0})")]
    ZeroNorm(String),

    #[error("dimension mismatch: {left} vs {right} levels")]
    DimensionMismatch { left: usize, right: usize },

    #[error(
        "moment headroom violated: mass {mass:.3e} in the top {power} levels of n_max={n_max}; \
         pad the state by at least {power} levels"
    )]
    Headroom { n_max: usize, power: usize, mass: f64 },

    #[error("unknown analytic case '{0}'")]
    UnknownCase(String),

    #[error("case {case} needs l={expected}, got l={got}")]
    CaseMismatch {
        case: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("series too short: {len} points, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("malformed state record at line {line}: {reason}")]
    StateRecord { line: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
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
