use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at byte {position} near {token:?}: {message}")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("{n} components exceeds the supported maximum of {max}")]
    TooManyComponents { n: usize, max: usize },

    #[error("component ids must be 1..n without gaps; missing id {missing}")]
    NonContiguousIds { missing: usize },

    #[error("truth table has length {len}, which is not 2^n for any n <= 24")]
    BadTableLength { len: usize },

    #[error("dimension mismatch: structure has {expected} components, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("probability for component {component} is {value}, outside [0, 1]")]
    InvalidProbability { component: usize, value: f64 },

    #[error("component id {id} out of range 1..={n}")]
    BadComponent { id: usize, n: usize },

    #[error("k = {k} is out of range for a k-out-of-{n} system")]
    BadK { k: usize, n: usize },

    #[error("structure function is not coherent: {0}")]
    NotCoherent(String),

    #[error("invalid lifetime distribution: {0}")]
    InvalidDistribution(String),

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("quadrature did not reach tolerance {tolerance:e}: estimate {estimate}, error estimate {error:e}")]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("component {component} does not have an exponential lifetime")]
    NonExponential { component: usize },

    #[error("{n} components is too many for exact enumeration (limit {max})")]
    OracleTooLarge { n: usize, max: usize },

    #[error("Monte Carlo run needs at least one sample")]
    ZeroSamples,

    #[error("malformed module annotation: {0}")]
    BadAnnotation(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown measure {0:?}")]
    UnknownMeasure(String),
}
