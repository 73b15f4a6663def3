use thiserror::Error;

use crate::compiler::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("qubit {qubit} out of range for {n} qubits")]
    OutOfRange { qubit: usize, n: usize },
    #[error("gate targets must be distinct, got {0:?}")]
    DuplicateTargets(Vec<usize>),
    #[error("cannot measure the identity operator")]
    IdentityMeasurement,
    #[error("forced outcome string exhausted after {supplied} random measurement(s)")]
    OutcomesExhausted { supplied: usize },
    #[error("forced outcome string has {left} unused bit(s) out of {supplied}")]
    OutcomesUnused { supplied: usize, left: usize },
    #[error("requested measurement branch has zero probability")]
    ZeroProbability,
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("transistor size violation: {0}")]
    SizeViolation(String),
    #[error("outcome count mismatch: expected {expected}, got {got}")]
    OutcomeLength { expected: usize, got: usize },
    #[error("backend does not support {0}")]
    Capability(String),
    #[error("port error: {0}")]
    Port(String),
    #[error("netlist error: {0}")]
    Netlist(String),
    #[error("netlist schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("degenerate fit grid: {0}")]
    DegenerateGrid(String),
}
