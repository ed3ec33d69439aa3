use super::{PauliError, PauliOperator};
use crate::gf2::{BitMatrix, BitVec};

/// Abelian group generated by independent, commuting Hermitian Paulis not containing `-I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n_qubits: usize,
    generators: Vec<PauliOperator>,
}

impl StabilizerGroup {
    /// Validates commutation and independence.
    pub fn new(n_qubits: usize, generators: Vec<PauliOperator>) -> Result<Self, PauliError> {
        for g in &generators {
            if g.n_qubits() != n_qubits {
                return Err(PauliError::Dimension { expected: n_qubits, found: g.n_qubits() });
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes(&generators[j]) {
                    return Err(PauliError::NotCommuting(i, j));
                }
            }
        }
        let group = StabilizerGroup { n_qubits, generators };
        if group.symplectic_matrix().rank() != group.generators.len() {
            return Err(PauliError::Dependent);
        }
        Ok(group)
    }

    /// Builds a group from a possibly redundant list, dropping dependent elements.
    ///
    /// Fails if the list does not commute or generates `-I`.
    pub fn from_spanning(n_qubits: usize, elements: Vec<PauliOperator>) -> Result<Self, PauliError> {
        for i in 0..elements.len() {
            for j in i + 1..elements.len() {
                if !elements[i].commutes(&elements[j]) {
                    return Err(PauliError::NotCommuting(i, j));
                }
            }
        }
        let m = BitMatrix::from_rows(2 * n_qubits, elements.iter().map(|p| p.symplectic_row()).collect());
        let red = m.reduce();
        for combo in &red.combos[red.rank()..] {
            if product_of(n_qubits, &elements, combo).is_negative() {
                return Err(PauliError::MinusIdentity);
            }
        }
        let generators = red.combos[..red.rank()].iter().map(|c| product_of(n_qubits, &elements, c)).collect();
        Ok(StabilizerGroup { n_qubits, generators })
    }

    pub fn trivial(n_qubits: usize) -> Self {
        StabilizerGroup { n_qubits, generators: Vec::new() }
    }

    pub(crate) fn from_raw(n_qubits: usize, generators: Vec<PauliOperator>) -> Self {
        StabilizerGroup { n_qubits, generators }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn into_generators(self) -> Vec<PauliOperator> {
        self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn symplectic_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(2 * self.n_qubits, self.generators.iter().map(|g| g.symplectic_row()).collect())
    }

    /// Product of the generators selected by `combo`.
    pub fn element(&self, combo: &BitVec) -> PauliOperator {
        product_of(self.n_qubits, &self.generators, combo)
    }

    /// Sign with which `p` (ignoring its own sign) belongs to the group, if it does.
    pub fn membership_sign(&self, p: &PauliOperator) -> Option<bool> {
        let combo = self.symplectic_matrix().solve_left(&p.symplectic_row())?;
        Some(self.element(&combo).is_negative())
    }

    /// Signed membership.
    pub fn contains(&self, p: &PauliOperator) -> bool {
        self.membership_sign(p) == Some(p.is_negative())
    }

    /// Membership of `p` or `-p`.
    pub fn contains_unsigned(&self, p: &PauliOperator) -> bool {
        self.membership_sign(p).is_some()
    }

    pub fn is_subgroup_of(&self, other: &StabilizerGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Every group element, in Gray-code order. Only for small ranks.
    pub fn enumerate(&self) -> Vec<PauliOperator> {
        assert!(self.rank() <= 20, "enumeration of a rank-{} group", self.rank());
        let mut out = vec![PauliOperator::identity(self.n_qubits)];
        let mut cur = PauliOperator::identity(self.n_qubits);
        for k in 1u64..(1u64 << self.rank()) {
            let bit = k.trailing_zeros() as usize;
            cur.mul_assign_commuting(&self.generators[bit]);
            out.push(cur.clone());
        }
        out
    }

    /// Canonical generating set: reduced row echelon form with columns ordered X block then Z block.
    pub fn canonical_generators(&self) -> Vec<PauliOperator> {
        let red = self.symplectic_matrix().reduce();
        red.combos[..red.rank()].iter().map(|c| self.element(c)).collect()
    }

    /// Subgroup of elements acting trivially on every qubit in `qubits`.
    pub fn trivial_on(&self, qubits: &[usize]) -> StabilizerGroup {
        let mut cols = BitMatrix::new(2 * qubits.len());
        for g in &self.generators {
            let mut row = BitVec::zeros(2 * qubits.len());
            for (k, &q) in qubits.iter().enumerate() {
                row.set(k, g.x_bits().get(q));
                row.set(qubits.len() + k, g.z_bits().get(q));
            }
            cols.push_row(row);
        }
        let red = cols.reduce();
        let generators = red.combos[red.rank()..].iter().map(|c| self.element(c)).collect();
        StabilizerGroup { n_qubits: self.n_qubits, generators }
    }

    /// Drops to the listed qubits. Elements must act trivially elsewhere.
    pub fn project(&self, keep: &[usize]) -> StabilizerGroup {
        let generators = self.generators.iter().map(|g| g.restrict(keep)).collect();
        StabilizerGroup { n_qubits: keep.len(), generators }
    }

    /// Subgroup supported on `keep`, expressed on those qubits only.
    pub fn restrict_to(&self, keep: &[usize]) -> StabilizerGroup {
        let keep_set: std::collections::BTreeSet<usize> = keep.iter().copied().collect();
        let others: Vec<usize> = (0..self.n_qubits).filter(|q| !keep_set.contains(q)).collect();
        self.trivial_on(&others).project(keep)
    }
}

pub(crate) fn product_of(n: usize, elements: &[PauliOperator], combo: &BitVec) -> PauliOperator {
    let mut acc = PauliOperator::identity(n);
    for i in combo.iter_ones() {
        acc.mul_assign_commuting(&elements[i]);
    }
    acc
}

/// Signed intersection `A ∩ B`.
///
/// The unsigned intersection of the spans comes from the left kernel of the
/// stacked generator matrix. On that subgroup, `a ↦ sign(a)·sign(b)` for the
/// matching elements `a ∈ A`, `b ∈ B` is a character; its kernel is the signed
/// intersection.
pub fn group_intersection(a: &StabilizerGroup, b: &StabilizerGroup) -> Result<StabilizerGroup, PauliError> {
    if a.n_qubits != b.n_qubits {
        return Err(PauliError::Dimension { expected: a.n_qubits, found: b.n_qubits });
    }
    let n = a.n_qubits;
    let ka = a.rank();
    let mut stacked = BitMatrix::new(2 * n);
    for g in a.generators.iter().chain(&b.generators) {
        stacked.push_row(g.symplectic_row());
    }
    let mut pairs: Vec<(PauliOperator, bool)> = Vec::new();
    for combo in stacked.left_kernel() {
        let ca = BitVec::from_indices(ka, combo.iter_ones().filter(|&i| i < ka));
        let cb = BitVec::from_indices(b.rank(), combo.iter_ones().filter(|&i| i >= ka).map(|i| i - ka));
        let ea = a.element(&ca);
        let eb = b.element(&cb);
        debug_assert_eq!(ea.unsigned(), eb.unsigned());
        pairs.push((ea.clone(), ea.is_negative() != eb.is_negative()));
    }
    // Kernel of the sign-mismatch character.
    let pivot = pairs.iter().position(|(_, mismatch)| *mismatch);
    let mut generators = Vec::with_capacity(pairs.len());
    for (i, (elem, mismatch)) in pairs.iter().enumerate() {
        match pivot {
            Some(p) if i == p => continue,
            Some(p) if *mismatch => {
                let mut e = elem.clone();
                e.mul_assign_commuting(&pairs[p].0);
                generators.push(e);
            }
            _ => generators.push(elem.clone()),
        }
    }
    Ok(StabilizerGroup { n_qubits: n, generators })
}

/// Equality of signed groups via canonical row reduction.
pub fn groups_equal(a: &StabilizerGroup, b: &StabilizerGroup) -> bool {
    a.n_qubits == b.n_qubits && a.rank() == b.rank() && a.canonical_generators() == b.canonical_generators()
}

/// Equality of the unsigned spans.
pub fn spans_equal(a: &StabilizerGroup, b: &StabilizerGroup) -> bool {
    let ua: Vec<_> = a.canonical_generators().iter().map(|g| g.unsigned()).collect();
    let ub: Vec<_> = b.canonical_generators().iter().map(|g| g.unsigned()).collect();
    a.n_qubits == b.n_qubits && ua == ub
}

/// A Pauli `P` with `P·actual·P = target`, for groups with identical unsigned spans.
///
/// Solves the GF(2) system "P anticommutes with generator i iff its signs differ".
pub fn pauli_frame_between(actual: &StabilizerGroup, target: &StabilizerGroup) -> Option<PauliOperator> {
    let n = target.n_qubits;
    let mut rows = BitMatrix::new(2 * n);
    let mut rhs = Vec::new();
    for g in target.generators() {
        let sign = actual.membership_sign(g)?;
        // Symplectic pairing <P, g> = P_x·g_z + P_z·g_x, so the row is [g_z | g_x].
        rows.push_row(g.z_bits().concat(g.x_bits()));
        rhs.push(sign != g.is_negative());
    }
    if actual.rank() != target.rank() {
        return None;
    }
    // Solve rows · P = rhs: transpose so that P is a row combination.
    let t = rows.transpose();
    let target_vec = BitVec::from_bools(&rhs);
    let combo = t.solve_left(&target_vec)?;
    Some(PauliOperator::from_symplectic_row(&combo, false))
}
