use std::collections::BTreeMap;

use serde::Serialize;

use super::network::FusionNetwork;
use super::syndrome::{Direction, SlotKind, SyndromeGraph};
use super::LatticeError;
use crate::gf2::BitMatrix;
use crate::graph_rewrite::{FusionBasis, VertexId};
use crate::pauli_algebra::{group_intersection, PauliOperator, StabilizerGroup};

/// Qubit cap for the tableau oracle.
pub const ORACLE_MAX_QUBITS: usize = 1200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MismatchTarget {
    Check { index: usize, plaquette: usize, layer: usize },
    Logical(Direction),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckMismatch {
    pub sector: usize,
    pub target: MismatchTarget,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallInstanceReport {
    pub l: usize,
    pub n_qubits: usize,
    pub n_checks: [usize; 2],
    pub n_logicals: [usize; 2],
    /// Rank of `C = R ∩ F`.
    pub surviving_rank: usize,
    /// Rank of the derived checks and logicals, as Pauli operators.
    pub derived_rank: usize,
    pub structure_violations: Vec<String>,
    pub mismatches: Vec<CheckMismatch>,
    /// Eigenvalue sign of each check on the ideal network.
    pub check_signs: [Vec<i8>; 2],
    pub passed: bool,
}

/// Measured operator of a slot on the network's qubits.
pub fn slot_operator(net: &FusionNetwork, fusion: usize, kind: SlotKind) -> PauliOperator {
    let f = &net.fusions()[fusion];
    let (pa, pb) = f.basis.factors()[match kind {
        SlotKind::Xx => FusionBasis::FAILURE_KEPT,
        SlotKind::Zz => 1 - FusionBasis::FAILURE_KEPT,
    }];
    PauliOperator::from_sparse(net.n_qubits(), &[(f.a, pa), (f.b, pb)])
}

/// Degree and incidence assertions that hold for any `L`.
pub fn check_structure(sg: &SyndromeGraph) -> Vec<String> {
    let mut out = Vec::new();
    for (k, sec) in sg.sectors.iter().enumerate() {
        let mut incidence = vec![0usize; sec.n_slots()];
        for (c, check) in sec.checks.iter().enumerate() {
            let xx = check.slots.iter().filter(|&&s| sec.slots[s as usize].kind == SlotKind::Xx).count();
            let zz = check.slots.len() - xx;
            if (xx, zz) != (6, 6) {
                out.push(format!("sector {k} check {c}: {xx} XX and {zz} ZZ slots"));
            }
            let mut distinct = check.slots.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() != check.slots.len() {
                out.push(format!("sector {k} check {c}: repeated slot"));
            }
            for &s in &check.slots {
                incidence[s as usize] += 1;
            }
        }
        for (s, &n) in incidence.iter().enumerate() {
            if n != 2 {
                out.push(format!("sector {k} slot {s} is in {n} checks"));
            }
        }
        if 12 * sec.n_checks() != 2 * sec.n_slots() {
            out.push(format!("sector {k}: 12 * {} checks != 2 * {} slots", sec.n_checks(), sec.n_slots()));
        }
    }
    let total: usize = sg.sectors.iter().map(|s| s.n_slots()).sum();
    if total != sg.n_slots() {
        out.push(format!("{total} sector slots for {} fusion outcomes", sg.n_slots()));
    }
    out
}

/// Checks every derived check against the surviving stabilizer group `C = R ∩ F`
/// of the network, and that checks plus logicals generate `C`.
pub fn verify_small_instance(net: &FusionNetwork, sg: &SyndromeGraph) -> Result<SmallInstanceReport, LatticeError> {
    let n = net.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(LatticeError::TooLarge(n));
    }
    let order: Vec<VertexId> = (0..n as u32).map(VertexId).collect();
    let r = StabilizerGroup::new(n, net.to_graph_state().stabilizer_generators(&order))?;
    let mut f_ops = Vec::with_capacity(2 * net.fusions().len());
    for f in 0..net.fusions().len() {
        for kind in [SlotKind::Xx, SlotKind::Zz] {
            f_ops.push(slot_operator(net, f, kind));
        }
    }
    let f = StabilizerGroup::from_spanning(n, f_ops.clone())?;
    let c = group_intersection(&r, &f)?;

    let product = |slots: &mut dyn Iterator<Item = usize>| {
        let mut op = PauliOperator::identity(n);
        for g in slots {
            op.mul_assign_commuting(&f_ops[g]);
        }
        op
    };
    let mut mismatches = Vec::new();
    let mut derived = BitMatrix::new(2 * n);
    let mut check_signs: [Vec<i8>; 2] = [Vec::new(), Vec::new()];
    for (k, sec) in sg.sectors.iter().enumerate() {
        for (ci, check) in sec.checks.iter().enumerate() {
            let op = product(&mut check.slots.iter().map(|&s| sec.slots[s as usize].slot));
            derived.push_row(op.symplectic_row());
            match c.membership_sign(&op) {
                Some(neg) => check_signs[k].push(if neg == op.is_negative() { 1 } else { -1 }),
                None => {
                    check_signs[k].push(0);
                    mismatches.push(CheckMismatch {
                        sector: k,
                        target: MismatchTarget::Check { index: ci, plaquette: check.plaquette, layer: check.layer },
                        reason: "not in the surviving stabilizer group".into(),
                    });
                }
            }
        }
        for lg in &sec.logicals {
            let op = product(&mut lg.slots.iter().map(|&s| sec.slots[s as usize].slot));
            derived.push_row(op.symplectic_row());
            if !c.contains_unsigned(&op) {
                mismatches.push(CheckMismatch { sector: k, target: MismatchTarget::Logical(lg.direction), reason: "not in the surviving stabilizer group".into() });
            }
        }
    }
    let derived_rank = derived.rank();
    let structure_violations = check_structure(sg);
    let passed = mismatches.is_empty() && structure_violations.is_empty() && derived_rank == c.rank();
    Ok(SmallInstanceReport {
        l: net.l(),
        n_qubits: n,
        n_checks: [sg.sectors[0].n_checks(), sg.sectors[1].n_checks()],
        n_logicals: [sg.sectors[0].logicals.len(), sg.sectors[1].logicals.len()],
        surviving_rank: c.rank(),
        derived_rank,
        structure_violations,
        mismatches,
        check_signs,
        passed,
    })
}

/// Incidence pattern of a check relative to its plaquette's cell and layer.
pub type Fingerprint = Vec<(SlotKind, usize, usize, usize, usize, usize)>;

pub fn check_fingerprint(net: &FusionNetwork, sg: &SyndromeGraph, sector: usize, check: usize) -> Fingerprint {
    let sec = &sg.sectors[sector];
    let q = &sec.checks[check];
    let (cx, cy) = net.honeycomb().plaquettes()[q.plaquette].cell;
    let l = net.l();
    let mut fp: Fingerprint = q
        .slots
        .iter()
        .map(|&s| {
            let slot = &sec.slots[s as usize];
            let f = &net.fusions()[slot.fusion];
            let (ca, cb) = (net.coord(f.a), net.coord(f.b));
            let dt = (f.layer + net.layers() - q.layer) % net.layers();
            let (mut ea, mut eb) = ((ca.chain, (ca.cell_x + l - cx) % l, (ca.cell_y + l - cy) % l), (cb.chain, (cb.cell_x + l - cx) % l, (cb.cell_y + l - cy) % l));
            if eb < ea {
                std::mem::swap(&mut ea, &mut eb);
            }
            (slot.kind, dt, ea.0 * 64 + eb.0, ea.1 * l + ea.2, eb.1 * l + eb.2, 0)
        })
        .collect();
    fp.sort_by_key(|e| (e.0.index(), e.1, e.2, e.3, e.4));
    fp
}

/// Classes of `(plaquette colour, layer mod 6)` whose checks do not all share one fingerprint.
pub fn translation_violations(net: &FusionNetwork, sg: &SyndromeGraph) -> Vec<(usize, u8, usize)> {
    let mut classes: BTreeMap<(usize, u8, usize), Fingerprint> = BTreeMap::new();
    let mut bad = Vec::new();
    for (k, sec) in sg.sectors.iter().enumerate() {
        for (ci, q) in sec.checks.iter().enumerate() {
            let key = (k, net.honeycomb().plaquettes()[q.plaquette].colour, q.layer % 6);
            let fp = check_fingerprint(net, sg, k, ci);
            match classes.get(&key) {
                Some(prev) if *prev != fp => bad.push(key),
                Some(_) => {}
                None => {
                    classes.insert(key, fp);
                }
            }
        }
    }
    bad.sort_unstable();
    bad.dedup();
    bad
}
