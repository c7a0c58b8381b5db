//! Error type shared by every module of the workbench.

use thiserror::Error;

/// Failures reported by the library. Variants carry enough context for the
/// CLI to print a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Field construction was given an unsupported degree or a reducible modulus.
    #[error("invalid field: {0}")]
    InvalidField(String),
    /// A bit pattern does not fit in the field.
    #[error("element {bits:#x} out of range for GF(2^{b})")]
    ElementOutOfRange { bits: u32, b: u32 },
    /// Multiplicative inverse of the zero element.
    #[error("inverse of zero")]
    InverseOfZero,
    /// Polynomial division by the zero polynomial.
    #[error("division by zero polynomial")]
    DivisionByZeroPolynomial,
    /// Inputs violate an operation's documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The request exceeds what the exhaustive routines are built to handle.
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// The shared register of a Dialog build could not hold the operands.
    #[error("register overflow: {0}")]
    RegisterOverflow(String),
    /// The two inputs of a modular Dialog were not coprime.
    #[error("non-unit gcd: {0}")]
    NonUnitGcd(String),
    /// The decoder produced an inconsistent result.
    #[error("decode failure: {0}")]
    DecodeFailure(String),
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
