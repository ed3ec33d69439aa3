use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::RewriteError;
use crate::pauli_algebra::{conjugate, Clifford, Pauli1, PauliOperator, StabilizerState};

/// Stable qubit identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Graph state `H_F ∏_{(u,v)∈E} CZ_{uv} |+⟩^V`, with `F` the set of Hadamard-flagged vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphJson", try_from = "GraphJson")]
pub struct GraphState {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    hadamards: BTreeSet<VertexId>,
}

impl GraphState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Vertices `0..n` and no edges.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Self::new();
        for v in 0..n {
            g.add_vertex(VertexId(v));
        }
        g
    }

    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<Self, RewriteError> {
        let mut g = Self::with_vertices(n);
        for &(a, b) in edges {
            g.add_edge(VertexId(a), VertexId(b))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        if self.adj.contains_key(&v) {
            return false;
        }
        self.adj.insert(v, BTreeSet::new());
        true
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), RewriteError> {
        if a == b {
            return Err(RewriteError::SelfLoop(a));
        }
        for v in [a, b] {
            if !self.contains(v) {
                return Err(RewriteError::MissingVertex(v));
            }
        }
        self.adj.get_mut(&a).unwrap().insert(b);
        self.adj.get_mut(&b).unwrap().insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: VertexId, b: VertexId) -> bool {
        let had = self.adj.get_mut(&a).is_some_and(|n| n.remove(&b));
        if had {
            self.adj.get_mut(&b).unwrap().remove(&a);
        }
        had
    }

    pub fn toggle_edge(&mut self, a: VertexId, b: VertexId) {
        if !self.remove_edge(a, b) {
            self.add_edge(a, b).expect("valid vertices");
        }
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn neighbors(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.adj[&v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |n| n.len())
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> bool {
        let Some(nbrs) = self.adj.remove(&v) else { return false };
        for u in nbrs {
            self.adj.get_mut(&u).unwrap().remove(&v);
        }
        self.hadamards.remove(&v);
        true
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Edges as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().flat_map(|(&a, n)| n.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn has_hadamard(&self, v: VertexId) -> bool {
        self.hadamards.contains(&v)
    }

    pub fn hadamards(&self) -> &BTreeSet<VertexId> {
        &self.hadamards
    }

    pub fn set_hadamard(&mut self, v: VertexId, on: bool) {
        if on {
            self.hadamards.insert(v);
        } else {
            self.hadamards.remove(&v);
        }
    }

    pub fn toggle_hadamard(&mut self, v: VertexId) {
        if !self.hadamards.remove(&v) {
            self.hadamards.insert(v);
        }
    }

    /// Smallest id larger than every id in use.
    pub fn next_free_id(&self) -> VertexId {
        VertexId(self.adj.keys().next_back().map_or(0, |v| v.0 + 1))
    }

    /// Local complementation `τ_v`: complements the subgraph induced on `N(v)`.
    pub fn local_complement(&mut self, v: VertexId) {
        let n: Vec<VertexId> = self.neighbors(v).iter().copied().collect();
        for i in 0..n.len() {
            for j in i + 1..n.len() {
                self.toggle_edge(n[i], n[j]);
            }
        }
    }

    /// Disjoint union; fails on shared ids.
    pub fn union(&self, other: &GraphState) -> Result<GraphState, RewriteError> {
        let mut g = self.clone();
        for v in other.vertices() {
            if !g.add_vertex(v) {
                return Err(RewriteError::DuplicateVertex(v));
            }
        }
        for (a, b) in other.edges() {
            g.add_edge(a, b)?;
        }
        g.hadamards.extend(other.hadamards.iter().copied());
        Ok(g)
    }

    pub fn connected_components(&self) -> Vec<GraphState> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = GraphState::new();
            let mut stack = vec![start];
            comp.add_vertex(start);
            while let Some(v) = stack.pop() {
                for &u in self.neighbors(v) {
                    if seen.insert(u) {
                        comp.add_vertex(u);
                        stack.push(u);
                    }
                }
            }
            let members: Vec<VertexId> = comp.vertices().collect();
            for &v in &members {
                for &u in self.neighbors(v) {
                    if v < u {
                        comp.add_edge(v, u).unwrap();
                    }
                }
                if self.has_hadamard(v) {
                    comp.hadamards.insert(v);
                }
            }
            out.push(comp);
        }
        out
    }

    /// Sorted vertex order used for tableau indices.
    pub fn qubit_order(&self) -> Vec<VertexId> {
        self.vertices().collect()
    }

    /// Stabilizer generators `H_F K_v H_F` on qubits indexed by `order`.
    pub fn stabilizer_generators(&self, order: &[VertexId]) -> Vec<PauliOperator> {
        let index: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = order.len();
        self.vertices()
            .map(|v| {
                let mut terms = vec![(index[&v], Pauli1::X)];
                terms.extend(self.neighbors(v).iter().map(|u| (index[u], Pauli1::Z)));
                let mut k = PauliOperator::from_sparse(n, &terms);
                for h in &self.hadamards {
                    conjugate(&mut k, Clifford::H(index[h]));
                }
                k
            })
            .collect()
    }

    /// Tableau of the state on qubits indexed by `order` (which may list extra, unused ids in `|+⟩`).
    pub fn to_state(&self, order: &[VertexId]) -> StabilizerState {
        let index: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = order.len();
        let mut stabs = Vec::with_capacity(n);
        let mut destabs = Vec::with_capacity(n);
        for (i, &v) in order.iter().enumerate() {
            let mut terms = vec![(i, Pauli1::X)];
            if self.contains(v) {
                terms.extend(self.neighbors(v).iter().map(|u| (index[u], Pauli1::Z)));
            }
            let mut k = PauliOperator::from_sparse(n, &terms);
            let mut d = PauliOperator::single(n, i, Pauli1::Z);
            for h in &self.hadamards {
                conjugate(&mut k, Clifford::H(index[h]));
                conjugate(&mut d, Clifford::H(index[h]));
            }
            stabs.push(k);
            destabs.push(d);
        }
        StabilizerState::from_tableau(stabs, destabs).expect("graph tableau is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, RewriteError> {
        serde_json::from_str(s).map_err(|e| RewriteError::Json(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    #[serde(default)]
    hadamards: Vec<VertexId>,
}

impl From<GraphState> for GraphJson {
    fn from(g: GraphState) -> Self {
        GraphJson {
            vertices: g.vertices().collect(),
            edges: g.edges().collect(),
            hadamards: g.hadamards.iter().copied().collect(),
        }
    }
}

impl TryFrom<GraphJson> for GraphState {
    type Error = RewriteError;

    fn try_from(j: GraphJson) -> Result<Self, Self::Error> {
        let mut g = GraphState::new();
        for v in j.vertices {
            g.add_vertex(v);
        }
        for (a, b) in j.edges {
            g.add_edge(a, b)?;
        }
        for h in j.hadamards {
            if !g.contains(h) {
                return Err(RewriteError::MissingVertex(h));
            }
            g.hadamards.insert(h);
        }
        Ok(g)
    }
}
