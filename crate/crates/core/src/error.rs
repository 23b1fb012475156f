use thiserror::Error;

/// Errors raised by the simulation, protocol and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gate of arity {arity} applied to {targets} target qubit(s)")]
    ArityMismatch { arity: usize, targets: usize },
    #[error("target qubit {qubit} out of range for a {num_qubits}-qubit register")]
    TargetOutOfRange { qubit: usize, num_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("control and target coincide on qubit {0}")]
    SameQubit(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unknown Pauli label '{0}'")]
    UnknownPauli(char),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("counts table is empty")]
    EmptyCounts,
    #[error("mixture weights are all zero")]
    ZeroWeights,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("counts are in device order but no device layout is available to invert")]
    BasisOrderMismatch,
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
    #[error("reference data: {0}")]
    Reference(String),
}

pub type Result<T> = std::result::Result<T, Error>;
