//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building or verifying an object.
///
/// Failed *verifications* (a certificate that does not re-check, a bound
/// that is exceeded) are ordinary `Err` values, never panics: callers such
/// as the CLI map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix shapes do not line up for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Two objects defined over different rings were combined.
    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    /// A ring or ring-with-element failed its construction invariants.
    #[error("invalid ring data: {0}")]
    InvalidRing(String),

    /// An object failed a structural invariant at construction time.
    #[error("invalid object: {0}")]
    InvalidObject(String),

    /// A precondition of an operation does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An exponent scan ran past its cap without success.
    #[error("exponent cap {cap} exceeded while measuring {what}")]
    ExponentCapExceeded { what: String, cap: u32 },

    /// A certificate, witness, or bound failed re-verification.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    /// A linear system that the theory guarantees solvable had no solution.
    /// Seeing this means a bug in the caller's reasoning, not bad user data.
    #[error("internal solve failed: {0}")]
    InternalSolve(String),

    /// A construction would exceed the configured size budget.
    #[error("size budget exceeded: {0}")]
    SizeBudget(String),

    /// A document failed to parse or refers to missing objects.
    #[error("malformed document: {0}")]
    MalformedDocument(String),

    /// Enumeration was asked for a structure with too many elements.
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
