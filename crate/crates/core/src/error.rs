use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("a register needs at least one qubit")]
    NoQubits,
    #[error("qubit {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, num_qubits: usize },
    #[error("control and target are both qubit {0}")]
    ControlEqualsTarget(usize),
    #[error("CNOT requires a control qubit")]
    MissingControl,
    #[error("only CNOT takes a control qubit")]
    UnexpectedControl,
    #[error("measurement needs at least one qubit")]
    EmptyQubitList,
    #[error("qubit {0} listed twice")]
    DuplicateQubit(usize),
    #[error("amplitude vector length {0} is not a power of two ≥ 2")]
    BadLength(usize),
    #[error("state is not normalized (norm² or trace = {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("mixture weights must be nonnegative and sum to 1 (got {0})")]
    WeightSum(f64),
    #[error("empty mixture")]
    EmptyMixture,
    #[error("expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
