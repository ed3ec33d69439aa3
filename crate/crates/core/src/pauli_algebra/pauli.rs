use std::fmt;

use serde::{Deserialize, Serialize};

use super::PauliError;
use crate::gf2::BitVec;

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn has_x(self) -> bool {
        self.bits().0
    }

    pub fn has_z(self) -> bool {
        self.bits().1
    }

    /// Group product ignoring phase.
    pub fn compose(self, other: Pauli1) -> Pauli1 {
        let (a, b) = self.bits();
        let (c, d) = other.bits();
        Pauli1::from_bits(a ^ c, b ^ d)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

/// Hermitian Pauli string `±P_1 ⊗ … ⊗ P_n` in symplectic form.
///
/// A qubit with both bits set denotes `Y` (not `XZ`), so every operator is
/// Hermitian and only a ±1 sign is carried. Products of anticommuting
/// operators are not Hermitian; [`multiply`] drops the resulting factor of
/// `i` and [`PauliOperator::mul_with_phase`] reports it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    x: BitVec,
    z: BitVec,
    negative: bool,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { x: BitVec::zeros(n), z: BitVec::zeros(n), negative: false }
    }

    pub fn from_bits(x: BitVec, z: BitVec, negative: bool) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::Dimension { expected: x.len(), found: z.len() });
        }
        Ok(PauliOperator { x, z, negative })
    }

    /// Builds `P` acting as `label` on each listed qubit.
    pub fn from_sparse(n: usize, terms: &[(usize, Pauli1)]) -> Self {
        let mut p = Self::identity(n);
        for &(q, label) in terms {
            p.set(q, p.get(q).compose(label));
        }
        p
    }

    pub fn single(n: usize, q: usize, label: Pauli1) -> Self {
        Self::from_sparse(n, &[(q, label)])
    }

    /// Parses strings such as `"+XZI"`, `"-YY"` or `"ZZ"`.
    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        let mut p = Self::identity(n);
        for (i, c) in body.chars().enumerate() {
            let label = match c {
                'I' | '_' => Pauli1::I,
                'X' => Pauli1::X,
                'Y' => Pauli1::Y,
                'Z' => Pauli1::Z,
                _ => return Err(PauliError::Parse(s.to_string())),
            };
            p.set(i, label);
        }
        p.negative = negative;
        Ok(p)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Sign as ±1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn negate(&mut self) {
        self.negative = !self.negative;
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.negate();
        p
    }

    /// Same operator with sign forced to `+`.
    pub fn unsigned(&self) -> Self {
        PauliOperator { x: self.x.clone(), z: self.z.clone(), negative: false }
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, label: Pauli1) {
        let (x, z) = label.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x.words().iter().zip(self.z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&q| self.get(q) != Pauli1::I).collect()
    }

    /// Concatenated `[x | z]` row used for GF(2) linear algebra.
    pub fn symplectic_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic_row(row: &BitVec, negative: bool) -> Self {
        let n = row.len() / 2;
        PauliOperator { x: row.slice(0, n), z: row.slice(n, 2 * n), negative }
    }

    pub fn commutes(&self, other: &PauliOperator) -> bool {
        debug_assert_eq!(self.n_qubits(), other.n_qubits());
        let mut acc = 0u64;
        for i in 0..self.x.words().len() {
            acc ^= (self.x.words()[i] & other.z.words()[i]) ^ (self.z.words()[i] & other.x.words()[i]);
        }
        acc.count_ones() & 1 == 0
    }

    /// Product `self · other` together with the exponent `k` of the leading `i^k`.
    ///
    /// The Hermitian result satisfies `self · other = i^k · result` with `k ∈ {0, 1}`;
    /// `k = 1` exactly when the factors anticommute.
    pub fn mul_with_phase(&self, other: &PauliOperator) -> Result<(PauliOperator, u8), PauliError> {
        if self.n_qubits() != other.n_qubits() {
            return Err(PauliError::Dimension { expected: self.n_qubits(), found: other.n_qubits() });
        }
        let mut plus = 0u32;
        let mut minus = 0u32;
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        for i in 0..x.words().len() {
            let (x1, z1, x2, z2) = (self.x.words()[i], self.z.words()[i], other.x.words()[i], other.z.words()[i]);
            // XY = iZ, YZ = iX, ZX = iY and the reverses give -i.
            let p = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & !z1 & !x2 & z2) | (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            x.words_mut()[i] ^= x2;
            z.words_mut()[i] ^= z2;
        }
        let mut e = (plus + 3 * minus) % 4;
        if self.negative ^ other.negative {
            e = (e + 2) % 4;
        }
        let negative = e >= 2;
        Ok((PauliOperator { x, z, negative }, (e % 2) as u8))
    }

    /// In-place `self ← self · other` for commuting operators.
    pub fn mul_assign_commuting(&mut self, other: &PauliOperator) {
        let (p, k) = self.mul_with_phase(other).expect("dimension mismatch");
        debug_assert_eq!(k, 0, "product of anticommuting Paulis");
        *self = p;
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        PauliOperator {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            negative: self.negative ^ other.negative,
        }
    }

    /// Restriction to a subset of qubits (sign kept).
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        let mut p = PauliOperator::identity(qubits.len());
        for (k, &q) in qubits.iter().enumerate() {
            p.set(k, self.get(q));
        }
        p.negative = self.negative;
        p
    }

    /// Embeds into `n` qubits: qubit `k` of `self` lands on `positions[k]`.
    pub fn embed(&self, n: usize, positions: &[usize]) -> PauliOperator {
        let mut p = PauliOperator::identity(n);
        for (k, &q) in positions.iter().enumerate() {
            p.set(q, self.get(k));
        }
        p.negative = self.negative;
        p
    }
}

/// Hermitian part of the product `p · q`.
///
/// For commuting inputs this is the exact product. For anticommuting inputs
/// the true product is `i` times the returned operator.
pub fn multiply(p: &PauliOperator, q: &PauliOperator) -> Result<PauliOperator, PauliError> {
    p.mul_with_phase(q).map(|(r, _)| r)
}

pub fn commutes(p: &PauliOperator, q: &PauliOperator) -> bool {
    p.commutes(q)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}
