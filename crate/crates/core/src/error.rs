//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the processing chain.
#[derive(Debug, Error)]
pub enum Error {
    /// A signal violates a structural invariant (empty, non-finite, bad rate).
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Input too short, degenerate, or otherwise unusable for the operation.
    #[error("{0}")]
    Unsupported(String),

    /// A pipeline step failed; carries the step index and name.
    #[error("pipeline step {index} ({name}) failed: {source}")]
    PipelineStep {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },

    /// File-format level problem (bad header, truncation, unknown codec).
    #[error("format error: {0}")]
    Format(String),

    /// Text parse failure with 1-based line number where applicable.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Serialized model is from an unsupported format version.
    #[error("unsupported model version: {found} (supported: {supported})")]
    ModelVersion { found: String, supported: String },

    /// Serialized model is missing or corrupts a required field.
    #[error("model field error: {0}")]
    ModelField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
