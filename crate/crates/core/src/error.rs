use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition of a formula does not hold (e.g. a
    /// half-integer that must be a positive integer).
    #[error("precondition unmet: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is singular")]
    Singular,

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("series diverges: degree contributions stopped decreasing at degree {degree}")]
    Divergence { degree: usize },

    #[error("zonal table supports degree <= {max}, requested {requested}")]
    UnsupportedDegree { requested: usize, max: usize },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("Monte Carlo estimate too noisy: relative standard error {rel_stderr:e} exceeds {threshold:e}")]
    NoisyEstimate { rel_stderr: f64, threshold: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
