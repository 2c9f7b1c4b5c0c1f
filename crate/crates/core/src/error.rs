use std::path::PathBuf;

/// Errors produced anywhere in the detection pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed file: {0}")]
    Format(String),

    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),

    #[error("audio clip contains no samples")]
    EmptyClip,

    #[error("only downsampling is supported (requested {target} Hz from {source_rate} Hz)")]
    UnsupportedDirection { source_rate: u32, target: u32 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("spectral centroid undefined for an all-zero spectrum")]
    UndefinedCentroid,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("SMO did not converge after {iterations} iterations (worst KKT violation {violation:e})")]
    Convergence { iterations: usize, violation: f64 },

    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("no modality produced evidence")]
    NoEvidence,

    #[error("rate undefined: {0}")]
    UndefinedRate(String),

    #[error("i/o error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
