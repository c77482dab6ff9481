use thiserror::Error;

/// Errors produced by the tuning library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid transfer function: {0}")]
    InvalidTransferFunction(String),

    #[error("sample time mismatch: {left} s vs {right} s")]
    SampleTimeMismatch { left: f64, right: f64 },

    #[error("discretization failed: {0}")]
    Discretization(String),

    /// Leading coefficient of a convolution operator is (numerically) zero,
    /// so the lower-triangular Toeplitz system cannot be solved.
    #[error("singular leading coefficient {leading:e} (threshold {threshold:e})")]
    Singular { leading: f64, threshold: f64 },

    #[error("algebraic loop: 1 + p0*c0 = {0:e}")]
    AlgebraicLoop(f64),

    #[error("non-finite value at step {0}")]
    NonFinite(usize),

    #[error("fractional exponent {0} outside (-1, 1); split integer part first")]
    ExponentOutOfRange(f64),

    #[error("invalid controller parameters: {0}")]
    InvalidParams(String),

    #[error("controller is not biproper after discretization (c0 = {0:e})")]
    ControllerNotBiproper(f64),

    #[error("invalid data record: {0}")]
    DataInvalid(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Every evaluated candidate hit the barrier; the search trace is attached.
    #[error("optimizer found no feasible controller in {} evaluations", trace.evaluations())]
    NoFeasible {
        trace: Box<crate::optimize::OptimizationTrace>,
    },

    #[error("{dataset} data: {source}")]
    Dataset {
        dataset: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
