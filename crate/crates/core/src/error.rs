//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction and arithmetic routines.
///
/// Precision exhaustion in p-adic arithmetic is deliberately *not* an error:
/// it is a representable scalar state (see [`crate::padic::PadicScalar`]) so
/// that downstream checks can report an inconclusive verdict instead of
/// aborting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("coefficient is not invertible: {0}")]
    NotInvertible(String),

    #[error("series truncation order too small: {0}")]
    InsufficientTruncation(String),

    #[error("operator is not of MUM type: {0}")]
    NotMum(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid prime: {0}")]
    InvalidPrime(String),

    #[error("admissibility violated: {0}")]
    NotAdmissible(String),

    #[error("exact divisibility violated: {0}")]
    DivisibilityFailure(String),

    #[error("modulus overflow: {0}")]
    ModulusOverflow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
