use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sample coordinate ({u}, {v})")]
    InvalidSample { u: f64, v: f64 },

    #[error("division by near-zero jet value {0:e}")]
    DegenerateDivision(f64),

    #[error("non-finite gradient at tape node {node}: {detail}")]
    NonFiniteGradient { node: usize, detail: String },

    #[error("non-finite value: {0}")]
    NonFiniteValue(String),

    #[error("spherical harmonic degree {0} is outside the supported range 0..=8")]
    UnsupportedDegree(usize),

    #[error("degenerate metric: EG - F^2 = {0:e}")]
    DegenerateMetric(f64),

    #[error("every sample in the batch had a degenerate metric ({0} samples)")]
    AllDegenerate(usize),

    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
