use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (negative quantum number, non-finite input, zero-mean distribution).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed validation against a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested state is the zero vector (minus superposition at r = 0).
    #[error("degenerate state: {0}")]
    Degenerate(String),

    /// A computation would exceed a hard resource bound.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A truncated Fock space was too small for the requested construction.
    #[error("truncation too small: {reason}; suggested dimension {suggested}")]
    Truncation { reason: String, suggested: usize },

    /// The adaptive integrator could not meet its tolerance.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A scan has no interior minimum to refine.
    #[error("no interior minimum: {0}")]
    NoInteriorMinimum(String),
}

impl Error {
    /// Exit code for the CLI: validation-like problems are 2, resource
    /// exhaustion 3. (Verification failures use 1, handled by the CLI.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } | Error::Truncation { .. } => 3,
            _ => 2,
        }
    }
}
