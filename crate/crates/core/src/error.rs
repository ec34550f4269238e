use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),

    #[error("gate {kind} expects {expected} qubit(s), got {got}")]
    GateArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("gate {kind}: {reason}")]
    GateAngle { kind: &'static str, reason: &'static str },

    #[error("parameter slot {0} is referenced but not declared")]
    UnknownSlot(usize),

    #[error("symbolic gate applied without an angle binding")]
    UnboundParameter,

    #[error("invalid bounds for slot {slot}: lo={lo} hi={hi}")]
    InvalidBounds { slot: usize, lo: f64, hi: f64 },

    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },

    #[error("parameter {index} = {value} lies outside [{lo}, {hi}]")]
    ParamOutOfBounds {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("problem too large for this method: {0}")]
    TooLarge(String),

    #[error("Gaussian-process kernel matrix is not positive definite")]
    SingularKernel,

    #[error("insufficient budget: need at least {needed} evaluations, have {available}")]
    InsufficientBudget { needed: usize, available: usize },

    #[error("objective evaluation failed: {0}")]
    Objective(String),

    #[error("integrator became unstable at t={t}: trace drift {drift:e}")]
    Unstable { t: f64, drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
