//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by the schemes, samplers, and harness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Modulus is even, below 3, or not prime.
    InvalidModulus(String),
    /// Hash output length exceeds the number of rows available for
    /// linearly independent syndrome vectors.
    KExceedsH { k: usize, h: usize },
    /// A paper-strict parameter bound failed; the message names the bound.
    StrictViolation(String),
    /// A dimension precondition failed (n too small, h = 0, ...).
    InvalidDimension(String),
    /// Gram-Schmidt hit a column whose orthogonalized norm is below 1e-9.
    RankDeficient { column: usize },
    /// The target syndrome is outside the column space of the matrix.
    NoSolution,
    /// Input vector length does not match the expected dimension.
    LengthMismatch { expected: usize, got: usize },
    /// Rejection sampler exceeded its retry cap.
    SamplerStuck,
    /// Key generation failed after bounded retries.
    GenerationFailed(String),
    /// Delegation matrix is not orthogonal.
    NotOrthogonal,
    /// Delegation input is not a plausible basis (wrong shape).
    InvalidBasis(String),
    /// Unrecognized hash identifier byte.
    UnknownHashId(u8),
    /// Scalar coefficient is outside [0, p).
    CoefficientOutOfRange { coefficient: u64, p: u64 },
    /// Policy restricts private-key signing to single symbols.
    PolicyViolation,
    /// A claimed forgery does not verify.
    NotAForgery,
    /// Statistical distance over empty sample sets.
    EmptySamples,
    /// Adversary exceeded the signing-query budget.
    QueryBudgetExceeded { budget: usize },
    /// Adversary output is structurally invalid for the game.
    MalformedAdversaryOutput(String),
    /// A privacy-experiment functional violates the equal-output condition.
    FunctionalMismatch { functional: usize },
    /// Serialized record starts with an unknown magic.
    BadMagic([u8; 4]),
    /// Serialized record has an unsupported version.
    VersionUnsupported(u16),
    /// Serialized record ends prematurely.
    Truncated,
    /// A serialized coefficient exceeds the representable range.
    CoefficientOverflow,
    /// Two objects were built under different parameter sets.
    ParamsMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidModulus(msg) => write!(f, "invalid modulus: {msg}"),
            Error::KExceedsH { k, h } => write!(f, "k = {k} exceeds h = {h}"),
            Error::StrictViolation(msg) => write!(f, "strict-mode violation: {msg}"),
            Error::InvalidDimension(msg) => write!(f, "invalid dimension: {msg}"),
            Error::RankDeficient { column } => {
                write!(f, "rank-deficient input: column {column} collapsed")
            }
            Error::NoSolution => write!(f, "no solution: target outside column space"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::SamplerStuck => write!(f, "rejection sampler exceeded its retry cap"),
            Error::GenerationFailed(msg) => write!(f, "generation failed: {msg}"),
            Error::NotOrthogonal => write!(f, "matrix is not orthogonal"),
            Error::InvalidBasis(msg) => write!(f, "invalid basis: {msg}"),
            Error::UnknownHashId(id) => write!(f, "unknown hash id {id:#04x}"),
            Error::CoefficientOutOfRange { coefficient, p } => {
                write!(f, "coefficient {coefficient} outside [0, {p})")
            }
            Error::PolicyViolation => {
                write!(f, "policy restricts private-key signing to single symbols")
            }
            Error::NotAForgery => write!(f, "claimed forgery does not verify"),
            Error::EmptySamples => write!(f, "statistical distance over empty samples"),
            Error::QueryBudgetExceeded { budget } => {
                write!(f, "query budget of {budget} exceeded")
            }
            Error::MalformedAdversaryOutput(msg) => {
                write!(f, "malformed adversary output: {msg}")
            }
            Error::FunctionalMismatch { functional } => {
                write!(f, "functional {functional} violates the equal-output condition")
            }
            Error::BadMagic(m) => write!(
                f,
                "bad magic {:02x}{:02x}{:02x}{:02x}",
                m[0], m[1], m[2], m[3]
            ),
            Error::VersionUnsupported(v) => write!(f, "unsupported format version {v}"),
            Error::Truncated => write!(f, "record truncated"),
            Error::CoefficientOverflow => write!(f, "coefficient exceeds representable range"),
            Error::ParamsMismatch => write!(f, "objects built under different parameters"),
        }
    }
}

impl core::error::Error for Error {}
