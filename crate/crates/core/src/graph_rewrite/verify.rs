use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::Serialize;

use super::{edge_split, node_split, DecompositionResult, FusionBasis, GraphState, VertexId};
use crate::pauli_algebra::{groups_equal, pauli_frame_between, spans_equal, Pauli1, PauliOperator, StabilizerGroup, StabilizerState};

/// A graph state followed by single-qubit Pauli measurements.
#[derive(Clone, Debug)]
pub struct MeasuredGraph {
    pub graph: GraphState,
    pub measurements: Vec<(VertexId, Pauli1)>,
}

impl MeasuredGraph {
    pub fn x_measured(graph: GraphState, vertices: &[VertexId]) -> Self {
        MeasuredGraph { graph, measurements: vertices.iter().map(|&v| (v, Pauli1::X)).collect() }
    }

    /// Left-hand side of the identity that `rhs` claims.
    pub fn lhs_of(graph: &GraphState, rhs: &DecompositionResult) -> Self {
        Self::x_measured(graph.clone(), &rhs.replaces)
    }
}

/// One outcome branch of the decomposed side.
#[derive(Clone, Debug)]
pub struct BranchRecord {
    /// Outcomes of the random measurements, in measurement order.
    pub outcomes: Vec<i8>,
    /// Pauli frame on the surviving qubits taking this branch to the all-`+1` left-hand branch.
    pub frame: BTreeMap<VertexId, Pauli1>,
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub surviving: Vec<VertexId>,
    pub lhs_branches: usize,
    pub rhs_branches: Vec<BranchRecord>,
    pub reason: Option<String>,
}

fn fail(surviving: Vec<VertexId>, reason: impl Into<String>) -> EquivalenceReport {
    EquivalenceReport { equivalent: false, surviving, lhs_branches: 0, rhs_branches: Vec::new(), reason: Some(reason.into()) }
}

/// Every outcome branch: (random outcomes, restricted signed group).
fn branches(state: StabilizerState, ops: &[PauliOperator], keep: &[usize]) -> Vec<(Vec<i8>, StabilizerGroup)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut stack = vec![(state, 0usize, Vec::new())];
    while let Some((s, k, outcomes)) = stack.pop() {
        if k == ops.len() {
            out.push((outcomes, s.group().restrict_to(keep)));
            continue;
        }
        if s.deterministic_value(&ops[k]).is_some() {
            let mut t = s;
            t.measure_pauli(&ops[k], None, &mut rng).expect("deterministic");
            stack.push((t, k + 1, outcomes));
        } else {
            for o in [-1i8, 1] {
                let mut t = s.clone();
                t.measure_pauli(&ops[k], Some(o), &mut rng).expect("random outcome can be forced");
                let mut oc = outcomes.clone();
                oc.push(o);
                stack.push((t, k + 1, oc));
            }
        }
    }
    out.reverse();
    out
}

/// Compares surviving stabilizer groups over every outcome branch of both sides.
///
/// The sides are equivalent when every branch of either side has the same
/// unsigned group and the branches with all random outcomes `+1` agree exactly.
/// Every other decomposed branch then differs from that reference by the Pauli
/// frame recorded for it.
pub fn check_equivalence(lhs: &MeasuredGraph, rhs: &DecompositionResult) -> EquivalenceReport {
    if let Err(e) = rhs.validate() {
        return fail(Vec::new(), format!("invalid decomposition: {e}"));
    }
    let measured_l: BTreeSet<VertexId> = lhs.measurements.iter().map(|m| m.0).collect();
    let surv_l: Vec<VertexId> = lhs.graph.vertices().filter(|v| !measured_l.contains(v)).collect();
    let g = rhs.combined_graph();
    let mut consumed: BTreeSet<VertexId> = rhs.virtual_x_measurements.iter().copied().collect();
    for f in &rhs.fusions {
        consumed.insert(f.a);
        consumed.insert(f.b);
    }
    let surv_r: Vec<VertexId> = g.vertices().filter(|v| !consumed.contains(v)).collect();
    if surv_l != surv_r {
        return fail(surv_l, "surviving qubit sets differ");
    }

    let order_l = lhs.graph.qubit_order();
    let idx_l: BTreeMap<VertexId, usize> = order_l.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ops_l: Vec<PauliOperator> = lhs.measurements.iter().map(|&(v, p)| PauliOperator::single(order_l.len(), idx_l[&v], p)).collect();
    let keep_l: Vec<usize> = surv_l.iter().map(|v| idx_l[v]).collect();
    let lhs_br = branches(lhs.graph.to_state(&order_l), &ops_l, &keep_l);

    let order_r = g.qubit_order();
    let idx_r: BTreeMap<VertexId, usize> = order_r.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut ops_r: Vec<PauliOperator> =
        rhs.virtual_x_measurements.iter().map(|v| PauliOperator::single(order_r.len(), idx_r[v], Pauli1::X)).collect();
    for f in &rhs.fusions {
        ops_r.extend(f.operators(&idx_r, order_r.len()));
    }
    let keep_r: Vec<usize> = surv_r.iter().map(|v| idx_r[v]).collect();
    let rhs_br = branches(g.to_state(&order_r), &ops_r, &keep_r);

    let reference = &lhs_br[0].1;
    for (_, grp) in lhs_br.iter().chain(&rhs_br) {
        if !spans_equal(grp, reference) {
            return fail(surv_l, "surviving stabilizer spans differ");
        }
    }
    let all_plus = |o: &Vec<i8>| o.iter().all(|&x| x == 1);
    let (Some(plus_l), Some(plus_r)) = (lhs_br.iter().find(|b| all_plus(&b.0)), rhs_br.iter().find(|b| all_plus(&b.0))) else {
        return fail(surv_l, "no all-positive branch");
    };
    if !groups_equal(&plus_l.1, &plus_r.1) {
        return fail(surv_l, "all-positive branches differ in sign");
    }
    let plus = &plus_l.1;
    let mut records = Vec::new();
    for (outcomes, grp) in &rhs_br {
        let frame = pauli_frame_between(grp, plus).expect("equal spans admit a frame");
        debug_assert!(groups_equal(&conjugated(grp, &frame), plus));
        let frame = surv_r.iter().enumerate().filter(|(i, _)| frame.get(*i) != Pauli1::I).map(|(i, &v)| (v, frame.get(i))).collect();
        records.push(BranchRecord { outcomes: outcomes.clone(), frame });
    }
    EquivalenceReport { equivalent: true, surviving: surv_l, lhs_branches: lhs_br.len(), rhs_branches: records, reason: None }
}

fn conjugated(g: &StabilizerGroup, frame: &PauliOperator) -> StabilizerGroup {
    let gens = g
        .generators()
        .iter()
        .map(|x| if x.commutes(frame) { x.clone() } else { x.negated() })
        .collect();
    StabilizerGroup::new(g.n_qubits(), gens).expect("conjugation preserves validity")
}

pub fn verify_equivalence(lhs: &MeasuredGraph, rhs: &DecompositionResult) -> bool {
    check_equivalence(lhs, rhs).equivalent
}

/// Deliberate corruption of the rule output, for negative controls of the corpus check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleMutation {
    #[default]
    None,
    /// Swap the fusion basis of every decomposition (`{XZ, ZX}` ↔ `{XX, ZZ}`).
    SwapBasis,
}

/// A failed equivalence check of the corpus.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusFailure {
    pub rule: &'static str,
    pub graph: String,
    pub target: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub graphs: usize,
    pub edge_split_cases: usize,
    pub node_split_cases: usize,
    pub failures: Vec<CorpusFailure>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random graph on 2 to `max_qubits` vertices with edge probability 0.45.
pub fn random_graph<R: Rng + ?Sized>(max_qubits: u32, rng: &mut R) -> GraphState {
    let n = rng.random_range(2..=max_qubits.max(2));
    let mut g = GraphState::with_vertices(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.45) {
                g.add_edge(VertexId(a), VertexId(b)).expect("distinct vertices");
            }
        }
    }
    g
}

/// Checks the edge-split rule on every edge and the node-split rule on every vertex (random
/// neighbour partition) of `n_graphs` random graphs.
pub fn verify_rule_corpus(n_graphs: usize, max_qubits: u32, seed: u64, mutation: RuleMutation) -> CorpusReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CorpusReport { graphs: n_graphs, edge_split_cases: 0, node_split_cases: 0, failures: Vec::new() };
    let mutate = |rhs: &mut DecompositionResult| {
        if mutation == RuleMutation::SwapBasis {
            for f in &mut rhs.fusions {
                f.basis = match f.basis {
                    FusionBasis::XzZx => FusionBasis::XxZz,
                    _ => FusionBasis::XzZx,
                };
            }
        }
    };
    for _ in 0..n_graphs {
        let g = random_graph(max_qubits, &mut rng);
        let check = |rule: &'static str, target: String, rhs: Result<DecompositionResult, super::RewriteError>, report: &mut CorpusReport| {
            let reason = match rhs {
                Ok(mut rhs) => {
                    mutate(&mut rhs);
                    let r = check_equivalence(&MeasuredGraph::lhs_of(&g, &rhs), &rhs);
                    (!r.equivalent).then(|| r.reason.unwrap_or_else(|| "not equivalent".into()))
                }
                Err(e) => Some(e.to_string()),
            };
            if let Some(reason) = reason {
                report.failures.push(CorpusFailure { rule, graph: g.to_json(), target, reason });
            }
        };
        for e in g.edges().collect::<Vec<_>>() {
            report.edge_split_cases += 1;
            check("edge_split", format!("{}-{}", e.0, e.1), edge_split(&g, e), &mut report);
        }
        for x in g.vertices().collect::<Vec<_>>() {
            let mut nbrs: Vec<VertexId> = g.neighbors(x).iter().copied().collect();
            nbrs.shuffle(&mut rng);
            let k = rng.random_range(0..=nbrs.len());
            report.node_split_cases += 1;
            check("node_split", x.to_string(), node_split(&g, x, (&nbrs[..k], &nbrs[k..])), &mut report);
        }
    }
    report
}
