use alloc::string::String;
use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Variants are grouped into input problems (bad device, graph, plan, or
/// argument) and numerical failures; [`WeaveError::is_numerical`] tells them
/// apart so callers can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeaveError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero detuning for {0}")]
    ZeroDetuning(&'static str),

    #[error("catalan index {0} out of range (maximum 100)")]
    CatalanOutOfRange(u32),

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("time grids of compared results differ")]
    GridMismatch,

    #[error("negative duration {0} us")]
    NegativeDuration(f64),

    #[error("edge ({0}, {1}) is not a coupler of the device")]
    InvalidEdge(usize, usize),

    #[error("subspace assignment is ambiguous: overlaps {kept:.3e} and {rejected:.3e} tie at the selection boundary")]
    AmbiguousAssignment { kept: f64, rejected: f64 },

    #[error("assembled matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("target has {vertices} vertices but the device only {qubits} qubits")]
    Capacity { vertices: usize, qubits: usize },

    #[error("infeasible embedding: edge ({0}, {1}) cannot be routed")]
    Infeasible(usize, usize),

    #[error("embedding search exceeded its budget of {0} node expansions")]
    SearchBudget(usize),

    #[error("unschedulable: {0}")]
    Unschedulable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl WeaveError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        WeaveError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            WeaveError::NonHermitian(_)
                | WeaveError::Numerical(_)
                | WeaveError::AmbiguousAssignment { .. }
                | WeaveError::SearchBudget(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, WeaveError>;
