use thiserror::Error;

/// Errors raised by layout construction, decoding and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("code distance must be odd and at least 3, got {0}")]
    InvalidDistance(u32),

    #[error("ancillas of different generator types cannot be connected by a single-type chain")]
    MixedGeneratorTypes,

    #[error("ancilla index {index} out of range ({count} ancillas)")]
    AncillaOutOfRange { index: usize, count: usize },

    #[error("pauli error has length {got}, layout has {expected} data qubits")]
    LengthMismatch { expected: usize, got: usize },

    #[error("a perfect matching needs an even vertex count, got {0}")]
    OddVertexCount(usize),

    /// The tree matching procedure met a shape it is not defined for.
    #[error("tree matching invariant violated: {0}")]
    Structural(String),

    #[error("matching graph has {vertices} vertices, exact matcher cap is {cap}")]
    Capacity { vertices: usize, cap: usize },

    #[error("graph has no perfect matching over its finite edges")]
    NoPerfectMatching,

    #[error(
        "exhaustive enumeration needs {patterns} patterns, budget is {budget}; use sampling mode"
    )]
    BudgetExceeded { patterns: u128, budget: u128 },

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
