use alloc::string::String;
use thiserror::Error;

/// Errors produced by state construction, witness evaluation and sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{requested} qubits exceeds the dense cap of {cap}")]
    CapacityExceeded { requested: usize, cap: usize },

    #[error("qubit count must be between 1 and {max}, got {requested}")]
    QubitCountOutOfRange { requested: usize, max: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("degree-of-freedom index {j} outside 1..={n_dofs}")]
    DofIndexOutOfRange { j: usize, n_dofs: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("witness kind incompatible with system: {0}")]
    KindSystemMismatch(String),

    #[error("state not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("restart count must be positive")]
    ZeroRestarts,

    #[error("no sample record for setting {0}")]
    MissingSetting(String),

    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },

    #[error("internal consistency failure: {0}")]
    ConsistencyFailure(String),
}

impl Error {
    /// True for errors caused by a size limit rather than bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::CapacityExceeded { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
