use rand::Rng;

use super::{PauliError, PauliOperator, StabilizerGroup};

/// Clifford gates understood by [`StabilizerState::apply_clifford`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clifford {
    H(usize),
    S(usize),
    Cz(usize, usize),
    Cnot(usize, usize),
    /// Pauli gates only change signs.
    X(usize),
    Y(usize),
    Z(usize),
}

/// Record of a single measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub observable: PauliOperator,
    /// `+1` or `-1`.
    pub outcome: i8,
    pub deterministic: bool,
}

/// Full stabilizer tableau on `n` qubits with destabilizers.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    stabilizers: Vec<PauliOperator>,
    destabilizers: Vec<PauliOperator>,
    record: Vec<MeasurementRecord>,
}

impl StabilizerState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let stabilizers = (0..n).map(|q| PauliOperator::single(n, q, super::Pauli1::Z)).collect();
        let destabilizers = (0..n).map(|q| PauliOperator::single(n, q, super::Pauli1::X)).collect();
        StabilizerState { stabilizers, destabilizers, record: Vec::new() }
    }

    /// `|+…+⟩`.
    pub fn plus(n: usize) -> Self {
        let mut s = Self::zero(n);
        for q in 0..n {
            s.apply_clifford(Clifford::H(q)).expect("in range");
        }
        s
    }

    /// State from explicit stabilizer and destabilizer lists.
    pub fn from_tableau(stabilizers: Vec<PauliOperator>, destabilizers: Vec<PauliOperator>) -> Result<Self, PauliError> {
        let n = stabilizers.len();
        if destabilizers.len() != n {
            return Err(PauliError::Dimension { expected: n, found: destabilizers.len() });
        }
        for (i, s) in stabilizers.iter().enumerate() {
            for (j, d) in destabilizers.iter().enumerate() {
                if s.commutes(d) == (i == j) {
                    return Err(PauliError::InvalidTableau);
                }
            }
        }
        StabilizerGroup::new(n, stabilizers.clone())?;
        Ok(StabilizerState { stabilizers, destabilizers, record: Vec::new() })
    }

    pub fn n_qubits(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    pub fn group(&self) -> StabilizerGroup {
        StabilizerGroup::from_raw(self.n_qubits(), self.stabilizers.clone())
    }

    pub fn record(&self) -> &[MeasurementRecord] {
        &self.record
    }

    fn check(&self, q: usize) -> Result<(), PauliError> {
        if q >= self.n_qubits() {
            Err(PauliError::QubitOutOfRange(q, self.n_qubits()))
        } else {
            Ok(())
        }
    }

    pub fn apply_clifford(&mut self, gate: Clifford) -> Result<(), PauliError> {
        match gate {
            Clifford::H(q) | Clifford::S(q) | Clifford::X(q) | Clifford::Y(q) | Clifford::Z(q) => self.check(q)?,
            Clifford::Cz(a, b) | Clifford::Cnot(a, b) => {
                self.check(a)?;
                self.check(b)?;
                if a == b {
                    return Err(PauliError::SameQubit(a));
                }
            }
        }
        for row in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            conjugate(row, gate);
        }
        Ok(())
    }

    /// Measures `p`. A deterministic outcome leaves the state unchanged.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        p: &PauliOperator,
        forced: Option<i8>,
        rng: &mut R,
    ) -> Result<i8, PauliError> {
        if p.n_qubits() != self.n_qubits() {
            return Err(PauliError::Dimension { expected: self.n_qubits(), found: p.n_qubits() });
        }
        let observable = p.unsigned();
        let flip = p.is_negative();
        if let Some(v) = self.deterministic_value(&observable) {
            let outcome = if flip { -v } else { v };
            if let Some(f) = forced {
                if f != outcome {
                    return Err(PauliError::Contradiction { forced: f, actual: outcome });
                }
            }
            self.record.push(MeasurementRecord { observable: p.clone(), outcome, deterministic: true });
            return Ok(outcome);
        }
        let pivot = self.stabilizers.iter().position(|s| !s.commutes(&observable)).expect("random outcome has an anticommuting stabilizer");
        let outcome = match forced {
            Some(f) if f == 1 || f == -1 => f,
            Some(f) => return Err(PauliError::InvalidOutcome(f)),
            None => {
                if rng.random::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
        let pivot_row = self.stabilizers[pivot].clone();
        for (i, s) in self.stabilizers.iter_mut().enumerate() {
            if i != pivot && !s.commutes(&observable) {
                s.mul_assign_commuting(&pivot_row);
            }
        }
        for (i, d) in self.destabilizers.iter_mut().enumerate() {
            if i != pivot && !d.commutes(&observable) {
                d.mul_assign_commuting(&pivot_row);
            }
        }
        self.destabilizers[pivot] = pivot_row;
        let mut new_row = observable;
        // Eigenvalue of the unsigned observable.
        new_row.set_negative((outcome == -1) != flip);
        self.stabilizers[pivot] = new_row;
        self.record.push(MeasurementRecord { observable: p.clone(), outcome, deterministic: false });
        Ok(outcome)
    }

    /// Eigenvalue of `p` if the state is an eigenstate, else `None`.
    pub fn deterministic_value(&self, p: &PauliOperator) -> Option<i8> {
        if self.stabilizers.iter().any(|s| !s.commutes(p)) {
            return None;
        }
        let mut acc = PauliOperator::identity(self.n_qubits());
        for (d, s) in self.destabilizers.iter().zip(&self.stabilizers) {
            if !d.commutes(p) {
                acc.mul_assign_commuting(s);
            }
        }
        debug_assert_eq!(acc.unsigned(), p.unsigned());
        Some(if acc.is_negative() == p.is_negative() { 1 } else { -1 })
    }
}

/// Conjugates `p ↦ U p U†` in place.
pub fn conjugate(p: &mut PauliOperator, gate: Clifford) {
    use super::Pauli1::*;
    match gate {
        Clifford::H(q) => {
            let l = p.get(q);
            if l == Y {
                p.negate();
            }
            p.set(q, match l {
                X => Z,
                Z => X,
                other => other,
            });
        }
        Clifford::S(q) => {
            // S X S† = Y, S Y S† = -X
            let l = p.get(q);
            match l {
                X => p.set(q, Y),
                Y => {
                    p.set(q, X);
                    p.negate();
                }
                _ => {}
            }
        }
        Clifford::X(q) => {
            if p.get(q).has_z() {
                p.negate();
            }
        }
        Clifford::Z(q) => {
            if p.get(q).has_x() {
                p.negate();
            }
        }
        Clifford::Y(q) => {
            if matches!(p.get(q), X | Z) {
                p.negate();
            }
        }
        Clifford::Cnot(c, t) => {
            let (xc, zc) = p.get(c).bits();
            let (xt, zt) = p.get(t).bits();
            if xc && zt && (xt == zc) {
                p.negate();
            }
            p.set(c, super::Pauli1::from_bits(xc, zc ^ zt));
            p.set(t, super::Pauli1::from_bits(xt ^ xc, zt));
        }
        Clifford::Cz(a, b) => {
            conjugate(p, Clifford::H(b));
            conjugate(p, Clifford::Cnot(a, b));
            conjugate(p, Clifford::H(b));
        }
    }
}
