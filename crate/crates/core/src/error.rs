use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sub-band frequency {sigma} outside [0, 1/{period})")]
    InvalidFrequency { sigma: f64, period: usize },

    #[error("cyclic spectrum model is inconsistent: hermitian residual {residual:e} at sigma = {sigma}")]
    ModelInconsistent { sigma: f64, residual: f64 },

    #[error("integrand is not finite at sigma = {sigma}")]
    NonFiniteIntegrand { sigma: f64 },

    #[error("quadrature needs at least {min} points per sub-band, got {got}")]
    TooFewNodes { min: usize, got: usize },

    #[error("hermitian eigensolver did not converge at sigma = {sigma}")]
    EigensolveFailure { sigma: f64 },

    #[error("matrix at sigma = {sigma} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { sigma: f64, min_eigenvalue: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("time-domain kernel only supports delta = 0, got {delta}")]
    UnsupportedDelay { delta: f64 },

    #[error("autocorrelation matrix of order {order} is not positive definite")]
    NotPositiveDefinite { order: usize },

    #[error("pulse tail energy {tail_energy:e} beyond the truncation length exceeds 1e-6")]
    TruncationError { tail_energy: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("density has zero total power")]
    ZeroPower,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
