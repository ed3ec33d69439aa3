//! Graph states with Hadamard flags, the edge-split and node-split rules,
//! the X-measurement rewrite, and a tableau check of rule equivalence.

mod graph;
mod rules;
mod verify;

pub use graph::{GraphState, VertexId};
pub use rules::{
    edge_split, measure_x_rewrite, measure_x_rewrite_with_pivot, node_split, x_measurement_frame, DecompositionResult, FusionBasis, FusionSpec, Side,
    SplitOrigin,
};
pub use verify::{
    check_equivalence, random_graph, verify_equivalence, verify_rule_corpus, BranchRecord, CorpusFailure, CorpusReport, EquivalenceReport, MeasuredGraph, RuleMutation,
};

use crate::pauli_algebra::PauliError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("vertex {0} not in graph")]
    MissingVertex(VertexId),
    #[error("edge ({0}, {1}) not in graph")]
    MissingEdge(VertexId, VertexId),
    #[error("self-loop on {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} appears twice")]
    DuplicateVertex(VertexId),
    #[error("partition does not split the neighbourhood of {0}")]
    InvalidPartition(VertexId),
    #[error("vertex {0} carries a Hadamard flag")]
    FlaggedVertex(VertexId),
    #[error("fusion of {0} with itself")]
    SelfFusion(VertexId),
    #[error("virtual qubit {0} is also fused")]
    VirtualInFusion(VertexId),
    #[error("rewrite of {0} disagrees with the tableau")]
    RuleMismatch(VertexId),
    #[error("graph JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}
