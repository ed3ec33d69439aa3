//! The synchronous fusion network on a periodic honeycomb foliated over layers,
//! its primal and dual syndrome graphs, and a tableau check of the check structure.

mod honeycomb;
mod network;
mod syndrome;
mod verify;

pub use honeycomb::{Colour, HexEdge, HexVertex, Honeycomb, Plaquette, COLOUR_NAMES};
pub use network::{build_sffcc_network, build_sffcc_network_with_layers, TIME_PERIOD, decompose_foliated, foliated_lattice, layer_colour, FoliatedLattice, FusionNetwork, NetworkFusion, QubitCoord, ResourceChain, ROUND};
pub use syndrome::{check_sector, derive_syndrome_graph, slot_id, slot_sector, Check, Direction, LogicalOperator, SectorGraph, SectorSlot, SlotKind, SyndromeGraph};
pub use verify::{check_fingerprint, check_structure, slot_operator, translation_violations, verify_small_instance, CheckMismatch, Fingerprint, MismatchTarget, SmallInstanceReport, ORACLE_MAX_QUBITS};

use crate::graph_rewrite::RewriteError;
use crate::pauli_algebra::PauliError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice size {0} must be even and at least 2")]
    InvalidSize(usize),
    #[error("layer count {0} must be a positive multiple of six")]
    InvalidLayers(usize),
    #[error("{0} qubits exceed the oracle cap")]
    TooLarge(usize),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}
