use thiserror::Error;

/// Errors raised by state construction, protocol configuration, and attack models.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadDimension { expected: usize, got: usize },
    #[error("state dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),
    #[error("non-finite component in state or gate")]
    NonFinite,
    #[error("matrix is not unitary: max |G G† - I| = {0:.3e}")]
    NotUnitary(f64),
    #[error("qubit index {index} out of range for {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("basis index {index} out of range 0..{len}")]
    BasisIndexOutOfRange { index: usize, len: usize },
    #[error("measurement basis is not orthonormal and complete: max Gram deviation {0:.3e}")]
    BadBasis(f64),
    #[error("message value {value} out of range for {bits}-bit alphabet")]
    MessageOutOfRange { value: u8, bits: u32 },
    #[error("linear-optics measurement is defined for 2-qubit states only")]
    LinearOpticsUnsupported,
    #[error("unsupported (mode, k) combination: {0}")]
    UnsupportedCapacity(String),
    #[error("gate list has length {got}, state has {expected} qubits")]
    GateCountMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid attack specification: {0}")]
    InvalidAttack(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
