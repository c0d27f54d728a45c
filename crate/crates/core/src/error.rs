//! Crate-wide error type.
//!
//! Validators do not use this type: structural checks that are expected to
//! fail on bad input return a [`crate::report::Report`] instead. `Error` is
//! reserved for conditions that make a requested computation meaningless
//! (mismatched ambients, wrong degrees, unresolved references, malformed
//! input files).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two elements that must share an ambient structure do not.
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    /// An element fails a degree or shape precondition of an operation.
    #[error("degree error: {0}")]
    Degree(String),

    /// A name used in a workspace or schema does not resolve.
    #[error("unresolved reference: {0}")]
    Unresolved(String),

    /// Structurally malformed data (bad dimensions, unknown basis name, ...).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// The workspace file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A computation exceeded a configured bound (arity, truncation order).
    #[error("bound exceeded: {0}")]
    Bound(String),

    /// A linear system that must be solvable by theory was not; indicates a
    /// corrupted input object rather than a user error.
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
