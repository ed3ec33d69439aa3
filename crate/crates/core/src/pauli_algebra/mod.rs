//! Symplectic Pauli arithmetic, stabilizer groups and a stabilizer tableau.
//!
//! Operators carry a ±1 sign only. The bit pattern `x = z = 1` stands for `Y`,
//! which keeps every operator Hermitian; products of commuting operators stay
//! exact under this convention, and that is all the group code relies on.

mod group;
mod pauli;
mod tableau;

pub use group::{group_intersection, groups_equal, pauli_frame_between, spans_equal, StabilizerGroup};
pub use pauli::{commutes, multiply, Pauli1, PauliOperator};
pub use tableau::{conjugate, Clifford, MeasurementRecord, StabilizerState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PauliError {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("generators {0} and {1} anticommute")]
    NotCommuting(usize, usize),
    #[error("generators are linearly dependent")]
    Dependent,
    #[error("generators produce -I")]
    MinusIdentity,
    #[error("forced outcome {forced} contradicts deterministic value {actual}")]
    Contradiction { forced: i8, actual: i8 },
    #[error("measurement outcome must be +1 or -1, got {0}")]
    InvalidOutcome(i8),
    #[error("qubit {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("two-qubit gate on a single qubit {0}")]
    SameQubit(usize),
    #[error("stabilizer and destabilizer rows do not pair up")]
    InvalidTableau,
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}
