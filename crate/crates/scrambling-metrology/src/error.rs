//! Error type shared across the library and the CLI.

use thiserror::Error;

/// Everything that can go wrong when building states, evolving models,
/// evaluating bounds, or running sweeps.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside its documented domain (wrong exponent,
    /// allocation outside (0,1), non-finite matrix entries, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A probe state does not fit in the requested basis: the neglected tail
    /// mass exceeds the tolerance. Carries an estimate of the dimension that
    /// would suffice.
    #[error(
        "truncated tail mass {tail:.3e} exceeds tolerance {tolerance:.3e} at dimension {dim}; \
         an estimated dimension of {required} would suffice"
    )]
    TailMass {
        dim: usize,
        tail: f64,
        tolerance: f64,
        required: usize,
    },

    /// The adaptive dimension-doubling loop hit its cap before the monitored
    /// scalars stabilized. Names the scalar that was still moving.
    #[error(
        "truncation did not converge below max_dim {max_dim}: scalar `{scalar}` was still \
         changing by a relative {last_change:.3e} (tolerance {rtol:.3e})"
    )]
    TruncationFailure {
        scalar: &'static str,
        max_dim: usize,
        last_change: f64,
        rtol: f64,
    },

    /// Dense eigendecomposition failed to converge (reports the operator size
    /// and scrambling strength for context).
    #[error("eigendecomposition failed at dimension {dim} (gamma = {gamma})")]
    Eigendecomposition { dim: usize, gamma: f64 },

    /// The information matrix is singular (or flagged degenerate), so the
    /// requested scalar is undefined.
    #[error("degenerate model: {0}")]
    Degenerate(String),

    /// An internal consistency check failed (for example the output state
    /// depends on the second phase, which the model forbids).
    #[error("model-structure violation: {0}")]
    StructureViolation(String),

    /// Configuration file or flag parsing failed; names the offending field.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 for usage/configuration problems,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Io(_) => 1,
            Error::TailMass { .. }
            | Error::TruncationFailure { .. }
            | Error::Eigendecomposition { .. }
            | Error::Degenerate(_)
            | Error::StructureViolation(_) => 2,
        }
    }
}
