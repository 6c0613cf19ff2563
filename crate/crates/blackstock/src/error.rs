use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("operation requires a {expected} domain")]
    InvalidBoundary { expected: &'static str },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid functions live on different domains")]
    DomainMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scenario: {0}")]
    Config(String),
    #[error("negative eigenvalue {0}")]
    NegativeEigenvalue(f64),
    #[error("zero eigenvalue present: restrict the Neumann operator to mean-zero functions")]
    ZeroEigenvalue,
    #[error("incompatible data: {0}")]
    Incompatible(String),
    #[error("Neumann problem with non-zero mean data needs the mean ODE (mean = {0:.3e})")]
    NonZeroMean(f64),
    #[error("time grid mismatch: expected {expected} samples, got {got}")]
    TimeGridMismatch { expected: usize, got: usize },
    #[error("not enough time samples: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },
    #[error("exponent p = {0} is excluded for this boundary condition")]
    ExcludedExponent(f64),
    #[error("Vandermonde system too ill-conditioned for l = {l} (condition {cond:.2e})")]
    IllConditioned { l: usize, cond: f64 },
    #[error("1 + 2k u_t = {value:.3e} below guard {guard} at t = {time:.6}, x = {location:?}")]
    GuardViolation {
        time: f64,
        value: f64,
        guard: f64,
        location: Vec<f64>,
    },
    #[error("non-finite value encountered at t = {0:.6}")]
    NonFinite(f64),
    #[error("Picard iteration diverged after {iterations} iterations (last increment {increment:.3e})")]
    Divergence { iterations: usize, increment: f64 },
    #[error("Picard iteration did not converge in {iterations} iterations (last increment {increment:.3e})")]
    NoConvergence { iterations: usize, increment: f64 },
    #[error("channel underflow: values below {floor:.1e} from t = {time:.3}; shrink the window to end before it")]
    Underflow { time: f64, floor: f64 },
    #[error("fit window holds {have} samples, need at least {needed}")]
    ShortWindow { have: usize, needed: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::GuardViolation { .. }
                | Error::NonFinite(_)
                | Error::Divergence { .. }
                | Error::NoConvergence { .. }
                | Error::Underflow { .. }
                | Error::IllConditioned { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
