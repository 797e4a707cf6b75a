//! Error types shared across the crate.

use std::path::PathBuf;

/// Errors produced by the descriptor pipeline, the index, and the evaluation
/// protocols.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An operation received arguments that violate its preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A descriptor or run configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// File I/O failure, with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Image decode or encode failure, with the offending path.
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    /// Corrupt, truncated, or unsupported index file.
    #[error("index format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// An evaluation protocol cannot be computed on the given outcomes.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// Search was attempted on an index with no records.
    #[error("index is empty")]
    EmptyIndex,
}

pub type Result<T> = std::result::Result<T, Error>;
