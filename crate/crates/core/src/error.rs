use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("sampled functions live on different grids")]
    GridMismatch,

    #[error("order {order} is outside the supported range {range}")]
    OrderOutOfRange { order: f64, range: &'static str },

    #[error("unsupported differintegral order {0}: |beta| must be below 2")]
    UnsupportedOrder(f64),

    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("derivative row {0} is required but was not supplied")]
    MissingDerivative(usize),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("unknown problem '{name}' (available: {available})")]
    UnknownProblem { name: String, available: String },

    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),

    #[error("boundary condition violated: {0}")]
    Boundary(String),

    #[error("no component has a free right endpoint")]
    NoFreeEndpoint,

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("no sign change of the terminal mismatch for slopes in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("step size underflow at t = {t}; the reduced system is too stiff")]
    Stiff { t: f64 },

    #[error("shooting stopped after {iterations} iterations with mismatch {mismatch:e}")]
    NoConvergence { iterations: usize, mismatch: f64 },

    #[error("Euler-Lagrange equation is degenerate at t = {t}: {reason}")]
    Degenerate { t: f64, reason: String },

    #[error("symmetry violated: dL/dx{component} = {value:e} at t = {t}")]
    SymmetryViolation { component: usize, value: f64, t: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
