use thiserror::Error;

use crate::cluster::Label;
use crate::densmat::MAX_QUBITS;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}; expected a square matrix of power-of-two dimension")]
    BadShape { rows: usize, cols: usize },

    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),

    #[error("unknown qubit {qubit} in a {qubits}-qubit state (qubits are numbered from 1)")]
    UnknownQubit { qubit: usize, qubits: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Kraus set is not trace preserving (max deviation from identity {0:e})")]
    IncompleteKraus(f64),

    #[error("state vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("dephasing strength {0} is outside [0, 1]")]
    StrengthOutOfRange(f64),

    #[error("{name} must be a non-negative number, got {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("chain length {got} is outside {min}..={max}")]
    LengthOutOfRange { got: usize, min: usize, max: usize },

    #[error("chain labels and state disagree: {labels} labels for {qubits} qubits")]
    LabelCount { labels: usize, qubits: usize },

    #[error("label {0} appears more than once")]
    DuplicateLabel(Label),

    #[error("label {0} is not an endpoint of its chain")]
    NotEndpoint(Label),

    #[error("chains to be fused share label {0}")]
    OverlappingChains(Label),

    #[error("outcome list has no failure branch")]
    NoFailureBranch,

    #[error("failure branches come from different fusion calls")]
    MixedFusionCalls,

    #[error("scenario {scenario} requires strength {interval}")]
    MissingStrength {
        scenario: &'static str,
        interval: &'static str,
    },

    #[error("chain bookkeeping violated: expected length {expected}, got {actual}")]
    Bookkeeping { expected: usize, actual: usize },

    #[error("the requested fusion branch has zero probability")]
    ZeroProbability,

    #[error("unknown {kind} `{value}`")]
    UnknownName { kind: &'static str, value: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
