//! Error type shared by every module of the engine.

use thiserror::Error;

/// Failure modes of exact operations.
///
/// The arithmetic here is fail-fast: an operation either returns an exact
/// result or reports why it cannot, never a silent approximation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Inversion or division of a (known) zero value.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// The requested result is not determined by the precision of the inputs.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A matrix required to be invertible is singular (possibly only to
    /// working precision, which is still fatal).
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// Coset enumeration or box refinement would exceed the configured limit.
    #[error("refinement depth limit exceeded: {0}")]
    DepthLimit(String),

    /// Input outside the operation's domain (e.g. residue of a non-integral
    /// element).
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector/matrix/function dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
