//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Inversion of a series that is identically zero within its window.
    #[error("cannot invert a series with no nonzero term in its window")]
    ZeroLeadingTerm,

    /// A coefficient past the truncation bound was requested.
    #[error("coefficient at {what} lies at or beyond the truncation bound")]
    OutOfWindow { what: String },

    /// A discriminant outside the support of the requested object.
    #[error("unsupported discriminant {d}: {why}")]
    UnsupportedDiscriminant { d: i64, why: String },

    /// A level outside the supported set.
    #[error("unsupported level {p}: {why}")]
    UnsupportedLevel { p: i64, why: String },

    /// An expansion expected to live on the integral lattice does not.
    #[error("non-integral result in {what}")]
    NonIntegralResult { what: String },

    /// Two representations of the same discriminant gave different coefficients.
    #[error("inconsistent representations of d = {d}: {details}")]
    InconsistentRepresentations { d: i64, details: String },

    /// The linear system for a form has no solution.
    #[error("no solution: {what}")]
    NoSolution { what: String },

    /// The homogeneous system has a nontrivial kernel where uniqueness was expected.
    #[error("nontrivial kernel of dimension {dim} in {what}")]
    NonTrivialKernel { dim: usize, what: String },

    /// An inconsistent linear system.
    #[error("inconsistent linear system")]
    Inconsistent,

    /// The level-lift scan exceeded its hard cap.
    #[error("no lift of [{a},{b},{c}] to level {p} with b = {beta} mod {m} found within the scan cap")]
    LiftNotFound {
        a: i64,
        b: i64,
        c: i64,
        p: i64,
        beta: i64,
        m: i64,
    },

    /// A numerical evaluation could not close its error bound under the term cap.
    #[error("precision exceeded: {what}")]
    PrecisionExceeded { what: String },

    /// A numerically summed trace did not land near an integer.
    #[error("value {value} is not within {tol} of an integer")]
    NotNearInteger { value: String, tol: f64 },

    /// A malformed argument or precondition violation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A cache file failed validation.
    #[error("invalid cache file: {0}")]
    InvalidCache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
