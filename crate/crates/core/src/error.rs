//! Error type shared across the crate.

use crate::radial::Level;

/// Errors raised by constructors, operators and solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Residue-field cardinality below 2.
    #[error("residue cardinality q must be >= 2, got {q}")]
    InvalidQ { q: u32 },

    /// Fractional order outside (0, inf).
    #[error("fractional order alpha must be positive and finite, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    /// Grid bounds out of order.
    #[error("level grid requires n_min <= n_max, got [{n_min}, {n_max}]")]
    InvalidGrid { n_min: Level, n_max: Level },

    /// Value array length does not match the grid.
    #[error("value count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// Dimension of a matrix/vector value does not match the declared one.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// A stored value is NaN or infinite.
    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    /// Two functions that must share a grid do not.
    #[error("grid mismatch: {context}")]
    GridMismatch { context: String },

    /// Gamma factor evaluated at its pole (or outside the representable range).
    #[error("gamma factor has a pole / non-finite value at s = {s}")]
    GammaPole { s: f64 },

    /// `c_alpha` requested on the logarithmic branch (alpha = 1).
    #[error("c_alpha is undefined on the logarithmic branch alpha = 1")]
    LogBranch,

    /// Whole-space integral against a non-decaying tail.
    #[error("potential at zero diverges: tail model must be zero, not a nonzero constant")]
    DivergentTail,

    /// A level pivot fell below the singularity tolerance.
    #[error("singular pivot at level {level}: |pivot| = {magnitude:e} < 1e-9")]
    SingularPivot { level: Level, magnitude: f64 },

    /// Picard iteration exhausted its budget.
    #[error("no convergence after {iterations} Picard iterations (last diff {last_diff:e})")]
    NoConvergence { iterations: usize, last_diff: f64 },

    /// Serialization / document problems.
    #[error("document error: {0}")]
    Document(String),
}

/// Crate-wide result alias.
pub type Result<V> = std::result::Result<V, Error>;
