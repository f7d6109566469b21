use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

/// Errors raised by the operator, solver and spectral routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("gradient vanishes with negative exponent alpha = {alpha}")]
    DegenerateGradient { alpha: f64 },

    #[error("point {value} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("Neumann data c = {0} must be negative for a positive solution")]
    InvalidNeumannData(f64),

    #[error("no consistent second-derivative branch at r = {r} (u = {u}, u' = {du}, rhs = {rhs})")]
    SignBranchFailure { r: f64, u: f64, du: f64, rhs: f64 },

    #[error("eigenvalue bracket not found in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("profile has no zero crossing")]
    NoZeroCrossing,

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("iteration limit {iterations} reached, last residual {residual:e}")]
    IterationLimit {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("iterate lost positivity: min value {min_value:e} at iteration {iteration}")]
    PositivityLoss { iteration: usize, min_value: f64 },

    #[error("reflected set leaves the domain at t = {t} (point ({x}, {y}))")]
    ReflectionOutOfDomain { t: f64, x: f64, y: f64 },

    #[error("coefficient blow-up at theta = {0:?}")]
    CoefficientBlowup(Vec<f64>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear solver failed: {0}")]
    LinearSolve(String),
}
