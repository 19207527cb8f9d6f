use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register must have at least one qubit")]
    EmptyRegister,
    #[error("register of {requested} qubits exceeds the configured maximum of {max}")]
    RegisterTooLarge { requested: usize, max: usize },
    #[error("cannot normalize zero vector")]
    ZeroNorm,
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("target qubit {0} also appears as a control")]
    TargetIsControl(usize),
    #[error("invalid qubit set: {0}")]
    InvalidRegister(String),
    #[error("postselection impossible: probability of ancilla |0> is {0:e}")]
    PostselectionImpossible(f64),
    #[error("amplification not block-encodable: damping exponent {0} is negative")]
    NegativeDamping(f64),
    #[error("damping factor exp(-{gamma}) underflows while the controlled subspace carries weight {weight:e}")]
    DampingUnderflow { gamma: f64, weight: f64 },
    #[error("shots must be at least 1")]
    InvalidShots,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unstable parameters: {0}")]
    Unstable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
