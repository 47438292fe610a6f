use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the routine that received it.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Massless model without a zero-mode regulator.
    #[error("massless model has a singular zero mode; set a zero-mode regulator")]
    SingularZeroMode,

    #[error("empty index set")]
    EmptySubset,

    #[error("index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    /// A matrix that must be positive-definite is not.
    #[error("{what} is not positive-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { what: &'static str, min_eigenvalue: f64 },

    /// The commutator Gram matrix is not the identity, so the modes are not canonical.
    #[error("modes are not canonical (max |gram - I| = {deviation:e}); orthonormalize first")]
    NotCanonical { deviation: f64 },

    /// A symplectic eigenvalue fell below 1/2 by more than the clamp tolerance.
    #[error("symplectic eigenvalue {value} violates the uncertainty bound 1/2")]
    UncertaintyViolation { value: f64 },

    #[error("Gaussian profile does not fit in the box: edge sample {edge_value:e} exceeds 1e-12")]
    ProfileTruncated { edge_value: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("rank deficient basis completion")]
    RankDeficient,

    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("effective state has vanishing norm")]
    VanishingNorm,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
