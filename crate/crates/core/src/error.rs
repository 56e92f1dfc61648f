//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by symbolic and numeric computations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Polynomial order outside the supported range.
    #[error("unsupported order p = {p} (supported range 1..={max})")]
    UnsupportedOrder { p: usize, max: usize },

    /// An input outside an operation's domain (division by zero, empty data, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The interior element block is (nearly) singular: t collides with a
    /// discrete Dirichlet eigenvalue of the reference element.
    #[error("interior block near-singular at t = {t} (sigma_min/sigma_max = {ratio:.3e})")]
    EigenvalueCollision { t: f64, ratio: f64 },

    /// A bracketing root search found no sign change.
    #[error("no root found: {context}")]
    RootNotFound { context: String },

    /// A determinant expected to be real acquired a significant imaginary part.
    #[error("determinant lost Hermitian symmetry: |Im| = {im:.3e} vs scale {scale:.3e}")]
    HermitianityLoss { im: f64, scale: f64 },

    /// Order-by-order root expansion could not proceed.
    #[error("series expansion failed: {context}")]
    ExpansionFailure { context: String },

    /// A paired brute-force/closed-form identity evaluation disagreed.
    #[error("identity violated: {0}")]
    IdentityViolation(String),

    /// Direct linear solver breakdown.
    #[error("linear solver failure: {0}")]
    SolverFailure(String),

    /// A search ladder was exhausted before meeting its goal.
    #[error("resource exhausted: {0}")]
    ResourceExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
