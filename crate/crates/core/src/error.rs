use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavenumber magnitude must be positive and finite, got {0}")]
    InvalidWaveMag(f64),

    #[error("wave vector must be nonzero and finite, got {0:?}")]
    ZeroWaveVector([f64; 3]),

    #[error("real-root solver did not converge for |k| = {kmag} (bracket [{lo}, {hi}])")]
    RootNonConvergence { kmag: f64, lo: f64, hi: f64 },

    #[error("singular coefficient system for |k| = {kmag} (det = {det})")]
    SingularSystem { kmag: f64, det: f64 },

    #[error("matrix exponential failed ({reason}) for |k| = {kmag}, t = {t}")]
    Expm { reason: String, kmag: f64, t: f64 },

    #[error("initial data violates constraint: {what} residual {residual:e} exceeds {tol:e}")]
    ConstraintViolation { what: &'static str, residual: f64, tol: f64 },

    #[error("profile `{name}`: truncation tail {tail:e} exceeds tolerance (integral {integral:e}, kmax {kmax})")]
    TailBound { name: String, tail: f64, integral: f64, kmax: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match grid size {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("positivity lost at t = {time}: 1 + {field} = {value:e} at grid index {index:?}")]
    Positivity { field: &'static str, value: f64, index: [usize; 3], time: f64 },

    #[error("energy weights violate 0 < K3 < K2 < K1 < 1 with K2^(3/2) < K3: ({k1}, {k2}, {k3})")]
    InvalidWeights { k1: f64, k2: f64, k3: f64 },

    #[error("invalid time step {0}")]
    InvalidTimeStep(f64),

    #[error("fit needs at least {needed} samples in window, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("series `{label}` has nonpositive value {value} at t = {time}")]
    NonPositive { label: String, value: f64, time: f64 },

    #[error("series `{0}`: times must be strictly ascending")]
    UnsortedTimes(String),

    #[error("config: {key}: {msg}")]
    Config { key: String, msg: String },

    #[error("csv: line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
