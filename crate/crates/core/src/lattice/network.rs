use serde::Serialize;

use super::honeycomb::{Colour, Honeycomb};
use super::LatticeError;
use crate::graph_rewrite::{FusionBasis, GraphState, VertexId};

/// Layers per schedule round (green, red, blue).
pub const ROUND: usize = 3;

/// Colour of the edges fused at layer `t`.
pub fn layer_colour(t: usize) -> Colour {
    (t % ROUND) as Colour
}

/// Position of a network qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QubitCoord {
    pub cell_x: usize,
    pub cell_y: usize,
    pub layer: usize,
    /// Chain within the unit cell, `0..6`.
    pub chain: usize,
}

/// A fusion between the qubits of two neighbouring chains on one layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NetworkFusion {
    pub a: usize,
    pub b: usize,
    /// Hardware basis applied to the photons as emitted.
    pub basis: FusionBasis,
    pub layer: usize,
    pub edge: usize,
}

/// An emitter chain: the qubits of one honeycomb vertex on every layer, closed in time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceChain {
    pub vertex: usize,
    pub cell: (usize, usize),
    pub chain: usize,
    pub qubits: Vec<usize>,
}

/// The synchronous fusion network on an `L × L` torus of unit cells, periodic in time.
///
/// Each honeycomb vertex carries a linear chain through time. At layer `t` the
/// edges of colour `t mod 3` are fused, so every fusion joins qubits of one layer and
/// each chain meets its three neighbours in turn. Chain qubits carry a Hadamard flag,
/// left behind by the X measurements of the foliated lattice, and fusions are
/// `{XX, ZZ}` on the flagged qubits: in the frame of the plain chains that is the
/// rotated fusion whose failure keeps `XX`.
#[derive(Clone, Debug, Serialize)]
pub struct FusionNetwork {
    honeycomb: Honeycomb,
    layers: usize,
    hadamard: Vec<bool>,
    fusions: Vec<NetworkFusion>,
    #[serde(skip)]
    by_layer_edge: Vec<usize>,
}

impl FusionNetwork {
    pub fn l(&self) -> usize {
        self.honeycomb.l()
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn honeycomb(&self) -> &Honeycomb {
        &self.honeycomb
    }

    pub fn n_chains(&self) -> usize {
        self.honeycomb.vertices().len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_chains() * self.layers
    }

    pub fn qubit(&self, layer: usize, vertex: usize) -> usize {
        layer * self.n_chains() + vertex
    }

    /// Layer and honeycomb vertex of a qubit.
    pub fn qubit_position(&self, q: usize) -> (usize, usize) {
        (q / self.n_chains(), q % self.n_chains())
    }

    pub fn coord(&self, q: usize) -> QubitCoord {
        let (layer, v) = self.qubit_position(q);
        let hv = &self.honeycomb.vertices()[v];
        QubitCoord { cell_x: hv.cell.0, cell_y: hv.cell.1, layer, chain: hv.chain }
    }

    pub fn qubit_id(&self, c: QubitCoord) -> Option<usize> {
        let l = self.l();
        (c.cell_x < l && c.cell_y < l && c.layer < self.layers && c.chain < 6).then(|| self.qubit(c.layer, (c.cell_x * l + c.cell_y) * 6 + c.chain))
    }

    /// Flat id of photon `k` of the `m`-photon encoding of qubit `q`.
    pub fn photon_id(q: usize, k: usize, m: usize) -> usize {
        assert!(k < m);
        q * m + k
    }

    pub fn fusions(&self) -> &[NetworkFusion] {
        &self.fusions
    }

    pub fn fusion_at(&self, layer: usize, edge: usize) -> Option<usize> {
        let f = self.by_layer_edge[layer * self.honeycomb.edges().len() + edge];
        (f != usize::MAX).then_some(f)
    }

    pub fn has_hadamard(&self, q: usize) -> bool {
        self.hadamard[q]
    }

    pub fn set_hadamard(&mut self, q: usize, on: bool) {
        self.hadamard[q] = on;
    }

    pub fn set_fusion_basis(&mut self, f: usize, basis: FusionBasis) {
        self.fusions[f].basis = basis;
    }

    /// Basis in the frame of the plain chains, `None` if the flags make it a non-standard pair.
    pub fn effective_basis(&self, f: usize) -> Option<FusionBasis> {
        let fu = &self.fusions[f];
        fu.basis.conjugated(self.hadamard[fu.a], self.hadamard[fu.b])
    }

    pub fn is_rotated(&self, f: usize) -> bool {
        self.effective_basis(f) == Some(FusionBasis::ZzXx)
    }

    pub fn chains(&self) -> Vec<ResourceChain> {
        self.honeycomb
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, hv)| ResourceChain { vertex: v, cell: hv.cell, chain: hv.chain, qubits: (0..self.layers).map(|t| self.qubit(t, v)).collect() })
            .collect()
    }

    /// Fusions of the qubits of vertex `v` in layers `[3k, 3k + 3)`.
    pub fn block_fusions(&self, v: usize, block: usize) -> Vec<usize> {
        (ROUND * block..ROUND * (block + 1))
            .map(|t| self.fusion_at(t, self.honeycomb.vertices()[v].edges[layer_colour(t) as usize]).expect("every qubit is fused"))
            .collect()
    }

    /// Chain edges `(q, q')` between consecutive layers of each vertex.
    pub fn chain_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.layers).flat_map(move |t| (0..self.n_chains()).map(move |v| (self.qubit(t, v), self.qubit((t + 1) % self.layers, v))))
    }

    /// The resource state as one graph on vertex ids equal to qubit ids.
    pub fn to_graph_state(&self) -> GraphState {
        let mut g = GraphState::with_vertices(self.n_qubits() as u32);
        for (a, b) in self.chain_edges() {
            g.add_edge(VertexId(a as u32), VertexId(b as u32)).expect("distinct chain qubits");
        }
        for (q, &h) in self.hadamard.iter().enumerate() {
            g.set_hadamard(VertexId(q as u32), h);
        }
        g
    }
}

/// Layers in one period of the check pattern: three colours times two sectors.
pub const TIME_PERIOD: usize = 2 * ROUND;

/// Builds the network for even `L ≥ 2` with `L` time periods of six layers.
pub fn build_sffcc_network(l: usize) -> Result<FusionNetwork, LatticeError> {
    build_sffcc_network_with_layers(l, TIME_PERIOD * l)
}

/// Builds the network with an explicit layer count, a positive multiple of six.
pub fn build_sffcc_network_with_layers(l: usize, layers: usize) -> Result<FusionNetwork, LatticeError> {
    if l < 2 || l % 2 != 0 {
        return Err(LatticeError::InvalidSize(l));
    }
    if layers == 0 || layers % TIME_PERIOD != 0 {
        return Err(LatticeError::InvalidLayers(layers));
    }
    let honeycomb = Honeycomb::new(l);
    let n_edges = honeycomb.edges().len();
    let n_chains = honeycomb.vertices().len();
    let mut fusions = Vec::with_capacity(layers * n_chains / 2);
    let mut by_layer_edge = vec![usize::MAX; layers * n_edges];
    for t in 0..layers {
        for (e, edge) in honeycomb.edges().iter().enumerate() {
            if edge.colour == layer_colour(t) {
                by_layer_edge[t * n_edges + e] = fusions.len();
                fusions.push(NetworkFusion { a: t * n_chains + edge.ends[0], b: t * n_chains + edge.ends[1], basis: FusionBasis::XxZz, layer: t, edge: e });
            }
        }
    }
    Ok(FusionNetwork { honeycomb, layers, hadamard: vec![true; layers * n_chains], fusions, by_layer_edge })
}

/// The foliated lattice before decomposition: data qubits on chains plus one check
/// qubit per fused edge and layer, joined to both data qubits.
#[derive(Clone, Debug)]
pub struct FoliatedLattice {
    pub graph: GraphState,
    /// Check qubit of each network fusion, in network fusion order.
    pub check_qubits: Vec<VertexId>,
}

pub fn foliated_lattice(net: &FusionNetwork) -> FoliatedLattice {
    let mut graph = GraphState::with_vertices(net.n_qubits() as u32);
    for (a, b) in net.chain_edges() {
        graph.add_edge(VertexId(a as u32), VertexId(b as u32)).expect("distinct chain qubits");
    }
    let mut check_qubits = Vec::with_capacity(net.fusions().len());
    for f in net.fusions() {
        let c = VertexId((net.n_qubits() + check_qubits.len()) as u32);
        graph.add_vertex(c);
        graph.add_edge(c, VertexId(f.a as u32)).expect("fresh check qubit");
        graph.add_edge(c, VertexId(f.b as u32)).expect("fresh check qubit");
        check_qubits.push(c);
    }
    FoliatedLattice { graph, check_qubits }
}

/// Decomposes the foliated lattice with the node-split rule on every check qubit and
/// the X-measurement rewrite on every data qubit. Returns the resource graph and the
/// fusions, with each data qubit's replacement relabelled to the data qubit's id.
pub fn decompose_foliated(net: &FusionNetwork) -> Result<(GraphState, Vec<(usize, usize, FusionBasis)>), LatticeError> {
    use crate::graph_rewrite::{measure_x_rewrite, node_split};
    let FoliatedLattice { mut graph, check_qubits } = foliated_lattice(net);
    let mut halves = Vec::with_capacity(check_qubits.len());
    let mut replacement = vec![VertexId(u32::MAX); net.n_qubits()];
    for (f, &c) in net.fusions().iter().zip(&check_qubits) {
        let (a, b) = (VertexId(f.a as u32), VertexId(f.b as u32));
        let d = node_split(&graph, c, (&[a], &[b]))?;
        let spec = d.fusions[0];
        graph = d.combined_graph();
        replacement[f.a] = spec.a;
        replacement[f.b] = spec.b;
        halves.push(spec);
    }
    for q in 0..net.n_qubits() {
        graph = measure_x_rewrite(&graph, VertexId(q as u32))?;
    }
    let mut back = std::collections::BTreeMap::new();
    for (q, &r) in replacement.iter().enumerate() {
        back.insert(r, q);
    }
    let mut out = GraphState::with_vertices(net.n_qubits() as u32);
    for (u, v) in graph.edges() {
        out.add_edge(VertexId(back[&u] as u32), VertexId(back[&v] as u32))?;
    }
    for v in graph.hadamards() {
        out.set_hadamard(VertexId(back[v] as u32), true);
    }
    let fusions = halves.iter().map(|s| (back[&s.a], back[&s.b], s.basis)).collect();
    Ok((out, fusions))
}
