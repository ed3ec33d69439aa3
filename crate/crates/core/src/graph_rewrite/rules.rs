use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GraphState, RewriteError, VertexId};
use crate::pauli_algebra::{pauli_frame_between, Pauli1, PauliOperator, StabilizerGroup};

/// Two-qubit fusion bases. The second operator of each pair survives a failed fusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FusionBasis {
    /// `{X⊗Z, Z⊗X}`, failure keeps `Z⊗X`.
    XzZx,
    /// `{X⊗X, Z⊗Z}`, failure keeps `Z⊗Z`.
    XxZz,
    /// Rotated `{Z⊗Z, X⊗X}`, failure keeps `X⊗X`.
    ZzXx,
}

impl FusionBasis {
    /// Single-qubit factors `[(a, b); 2]` of the measured operators.
    pub fn factors(self) -> [(Pauli1, Pauli1); 2] {
        use Pauli1::*;
        match self {
            FusionBasis::XzZx => [(X, Z), (Z, X)],
            FusionBasis::XxZz => [(X, X), (Z, Z)],
            FusionBasis::ZzXx => [(Z, Z), (X, X)],
        }
    }

    /// Index into [`factors`](Self::factors) of the operator kept on failure.
    pub const FAILURE_KEPT: usize = 1;

    /// Basis seen after Hadamards on the flagged inputs.
    pub fn conjugated(self, h_a: bool, h_b: bool) -> Option<FusionBasis> {
        let swap = |p: Pauli1, h: bool| if h { match p { Pauli1::X => Pauli1::Z, Pauli1::Z => Pauli1::X, o => o } } else { p };
        let f = self.factors();
        let g = [(swap(f[0].0, h_a), swap(f[0].1, h_b)), (swap(f[1].0, h_a), swap(f[1].1, h_b))];
        [FusionBasis::XzZx, FusionBasis::XxZz, FusionBasis::ZzXx].into_iter().find(|b| b.factors() == g)
    }
}

/// A fusion between two qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionSpec {
    pub a: VertexId,
    pub b: VertexId,
    pub basis: FusionBasis,
}

impl FusionSpec {
    pub fn new(a: VertexId, b: VertexId, basis: FusionBasis) -> Result<Self, RewriteError> {
        if a == b {
            return Err(RewriteError::SelfFusion(a));
        }
        Ok(FusionSpec { a, b, basis })
    }

    /// The two measured operators on an `n`-qubit register.
    pub fn operators(&self, index: &BTreeMap<VertexId, usize>, n: usize) -> [PauliOperator; 2] {
        let (ia, ib) = (index[&self.a], index[&self.b]);
        self.basis.factors().map(|(pa, pb)| PauliOperator::from_sparse(n, &[(ia, pa), (ib, pb)]))
    }
}

/// Which side of a split a new vertex came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Provenance of a vertex created by a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOrigin {
    pub parent: VertexId,
    pub side: Side,
}

/// Output of a decomposition rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionResult {
    /// Connected pieces of the rewritten graph.
    pub resource_graphs: Vec<GraphState>,
    pub fusions: Vec<FusionSpec>,
    pub virtual_x_measurements: Vec<VertexId>,
    /// Vertices of the original graph measured in X on the left-hand side of the identity.
    pub replaces: Vec<VertexId>,
    pub provenance: BTreeMap<VertexId, SplitOrigin>,
}

impl DecompositionResult {
    fn from_graph(g: GraphState, fusions: Vec<FusionSpec>, replaces: Vec<VertexId>, provenance: BTreeMap<VertexId, SplitOrigin>) -> Self {
        DecompositionResult { resource_graphs: g.connected_components(), fusions, virtual_x_measurements: Vec::new(), replaces, provenance }
    }

    /// All resource graphs as one graph.
    pub fn combined_graph(&self) -> GraphState {
        self.resource_graphs.iter().fold(GraphState::new(), |acc, g| acc.union(g).expect("disjoint resource graphs"))
    }

    pub fn validate(&self) -> Result<(), RewriteError> {
        let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (i, g) in self.resource_graphs.iter().enumerate() {
            for v in g.vertices() {
                if owner.insert(v, i).is_some() {
                    return Err(RewriteError::DuplicateVertex(v));
                }
            }
        }
        let virt: BTreeSet<VertexId> = self.virtual_x_measurements.iter().copied().collect();
        let mut used = BTreeSet::new();
        for f in &self.fusions {
            for v in [f.a, f.b] {
                if !owner.contains_key(&v) {
                    return Err(RewriteError::MissingVertex(v));
                }
                if virt.contains(&v) {
                    return Err(RewriteError::VirtualInFusion(v));
                }
                if !used.insert(v) {
                    return Err(RewriteError::DuplicateVertex(v));
                }
            }
        }
        Ok(())
    }
}

fn require_unflagged(g: &GraphState, v: VertexId) -> Result<(), RewriteError> {
    if !g.contains(v) {
        return Err(RewriteError::MissingVertex(v));
    }
    if g.has_hadamard(v) {
        return Err(RewriteError::FlaggedVertex(v));
    }
    Ok(())
}

/// Replaces edge `(1, 2)` by an `{XZ, ZX}` fusion between fresh qubits `1'` and `2'`.
///
/// `1'` inherits `N(1) \ {2}` and `2'` inherits `N(2) \ {1}`; the identity holds
/// against measuring `X` on both endpoints of the original graph.
pub fn edge_split(g: &GraphState, e: (VertexId, VertexId)) -> Result<DecompositionResult, RewriteError> {
    let (v1, v2) = e;
    if !g.contains(v1) || !g.contains(v2) || !g.has_edge(v1, v2) {
        return Err(RewriteError::MissingEdge(v1, v2));
    }
    require_unflagged(g, v1)?;
    require_unflagged(g, v2)?;
    let n1: Vec<VertexId> = g.neighbors(v1).iter().copied().filter(|&u| u != v2).collect();
    let n2: Vec<VertexId> = g.neighbors(v2).iter().copied().filter(|&u| u != v1).collect();
    let mut h = g.clone();
    h.remove_vertex(v1);
    h.remove_vertex(v2);
    let p1 = g.next_free_id();
    let p2 = VertexId(p1.0 + 1);
    h.add_vertex(p1);
    h.add_vertex(p2);
    for u in n1 {
        h.add_edge(p1, u)?;
    }
    for u in n2 {
        h.add_edge(p2, u)?;
    }
    let provenance = BTreeMap::from([(p1, SplitOrigin { parent: v1, side: Side::A }), (p2, SplitOrigin { parent: v2, side: Side::B })]);
    Ok(DecompositionResult::from_graph(h, vec![FusionSpec::new(p1, p2, FusionBasis::XzZx)?], vec![v1, v2], provenance))
}

/// Replaces `v` by fresh qubits `v_a ~ N_a` and `v_b ~ N_b` joined by an `{XX, ZZ}` fusion.
///
/// The identity holds against measuring `X` on `v`.
pub fn node_split(g: &GraphState, v: VertexId, partition: (&[VertexId], &[VertexId])) -> Result<DecompositionResult, RewriteError> {
    require_unflagged(g, v)?;
    let (na, nb) = partition;
    let sa: BTreeSet<VertexId> = na.iter().copied().collect();
    let sb: BTreeSet<VertexId> = nb.iter().copied().collect();
    if sa.len() != na.len() || sb.len() != nb.len() || !sa.is_disjoint(&sb) {
        return Err(RewriteError::InvalidPartition(v));
    }
    let union: BTreeSet<VertexId> = sa.union(&sb).copied().collect();
    if &union != g.neighbors(v) {
        return Err(RewriteError::InvalidPartition(v));
    }
    let mut h = g.clone();
    h.remove_vertex(v);
    let va = g.next_free_id();
    let vb = VertexId(va.0 + 1);
    h.add_vertex(va);
    h.add_vertex(vb);
    for &u in &sa {
        h.add_edge(va, u)?;
    }
    for &u in &sb {
        h.add_edge(vb, u)?;
    }
    let provenance = BTreeMap::from([(va, SplitOrigin { parent: v, side: Side::A }), (vb, SplitOrigin { parent: v, side: Side::B })]);
    Ok(DecompositionResult::from_graph(h, vec![FusionSpec::new(va, vb, FusionBasis::XxZz)?], vec![v], provenance))
}

/// Graph and flags after measuring `X` on `v` with outcome `+1`, up to a Pauli frame.
///
/// A flagged `v` amounts to a `Z` measurement and is simply deleted. Otherwise,
/// with a pivot neighbour `w` (the newest leaf when one exists), the graph becomes
/// `τ_w(τ_v(τ_w(G)) − v)` and the flag on `w` toggles. For a leaf `w` this is
/// "delete `v`, join `w` to the other neighbours, put a Hadamard on `w`".
pub fn measure_x_rewrite(g: &GraphState, v: VertexId) -> Result<GraphState, RewriteError> {
    if !g.contains(v) {
        return Err(RewriteError::MissingVertex(v));
    }
    let mut h = g.clone();
    if g.has_hadamard(v) || g.degree(v) == 0 {
        h.remove_vertex(v);
        return Ok(h);
    }
    let nbrs = g.neighbors(v);
    let pivot = nbrs.iter().rev().copied().find(|&u| g.degree(u) == 1).unwrap_or(*nbrs.iter().next().unwrap());
    measure_x_rewrite_with_pivot(g, v, pivot)
}

/// [`measure_x_rewrite`] with an explicit pivot neighbour `w` of an unflagged `v`.
pub fn measure_x_rewrite_with_pivot(g: &GraphState, v: VertexId, w: VertexId) -> Result<GraphState, RewriteError> {
    require_unflagged(g, v)?;
    if !g.has_edge(v, w) {
        return Err(RewriteError::MissingEdge(v, w));
    }
    let mut h = g.clone();
    let nbrs = g.neighbors(v);
    if g.degree(w) == 1 {
        let others: Vec<VertexId> = nbrs.iter().copied().filter(|&u| u != w).collect();
        h.remove_vertex(v);
        for u in others {
            h.add_edge(w, u)?;
        }
        h.toggle_hadamard(w);
        return Ok(h);
    }
    h.local_complement(w);
    h.local_complement(v);
    h.remove_vertex(v);
    h.local_complement(w);
    h.toggle_hadamard(w);
    Ok(h)
}

/// Pauli frame `P` with `P · (state after X_v = +1) = state of measure_x_rewrite(g, v)`,
/// computed by tableau comparison. Only suitable for small graphs.
pub fn x_measurement_frame(g: &GraphState, v: VertexId) -> Result<BTreeMap<VertexId, Pauli1>, RewriteError> {
    let rewritten = measure_x_rewrite(g, v)?;
    let order = g.qubit_order();
    let vi = order.iter().position(|&u| u == v).unwrap();
    let mut state = g.to_state(&order);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    state.measure_pauli(&PauliOperator::single(order.len(), vi, Pauli1::X), Some(1), &mut rng).map_err(RewriteError::Pauli)?;
    let keep: Vec<usize> = (0..order.len()).filter(|&i| i != vi).collect();
    let kept_ids: Vec<VertexId> = keep.iter().map(|&i| order[i]).collect();
    let actual = state.group().restrict_to(&keep);
    let target = StabilizerGroup::new(kept_ids.len(), rewritten.stabilizer_generators(&kept_ids)).map_err(RewriteError::Pauli)?;
    let frame = pauli_frame_between(&actual, &target).ok_or(RewriteError::RuleMismatch(v))?;
    Ok(kept_ids.iter().enumerate().filter(|(i, _)| frame.get(*i) != Pauli1::I).map(|(i, &id)| (id, frame.get(i))).collect())
}
