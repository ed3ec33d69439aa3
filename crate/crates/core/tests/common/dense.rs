//! Dense state-vector reference used to cross-check the tableau.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use sffcc::pauli_algebra::{Clifford, Pauli1, PauliOperator};

#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amp: Vec<C>,
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        amp[0] = C::new(1.0, 0.0);
        Dense { n, amp }
    }

    pub fn apply_pauli(&self, p: &PauliOperator) -> Dense {
        let mut out = vec![C::new(0.0, 0.0); self.amp.len()];
        for (b, &a) in self.amp.iter().enumerate() {
            let mut target = b;
            let mut phase = C::new(if p.is_negative() { -1.0 } else { 1.0 }, 0.0);
            for q in 0..self.n {
                let bit = (b >> q) & 1;
                match p.get(q) {
                    Pauli1::I => {}
                    Pauli1::X => target ^= 1 << q,
                    Pauli1::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                    Pauli1::Y => {
                        // Y|b> = i(-1)^b |b^1>
                        phase *= C::new(0.0, 1.0);
                        if bit == 1 {
                            phase = -phase;
                        }
                        target ^= 1 << q;
                    }
                }
            }
            out[target] += phase * a;
        }
        Dense { n: self.n, amp: out }
    }

    pub fn apply(&mut self, g: Clifford) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match g {
            Clifford::H(q) => {
                for b in 0..self.amp.len() {
                    if (b >> q) & 1 == 0 {
                        let (a0, a1) = (self.amp[b], self.amp[b | 1 << q]);
                        self.amp[b] = (a0 + a1) * s;
                        self.amp[b | 1 << q] = (a0 - a1) * s;
                    }
                }
            }
            Clifford::S(q) => {
                for b in 0..self.amp.len() {
                    if (b >> q) & 1 == 1 {
                        self.amp[b] *= C::new(0.0, 1.0);
                    }
                }
            }
            Clifford::Cz(a, c) => {
                for b in 0..self.amp.len() {
                    if (b >> a) & 1 == 1 && (b >> c) & 1 == 1 {
                        self.amp[b] = -self.amp[b];
                    }
                }
            }
            Clifford::Cnot(c, t) => {
                for b in 0..self.amp.len() {
                    if (b >> c) & 1 == 1 && (b >> t) & 1 == 0 {
                        self.amp.swap(b, b | 1 << t);
                    }
                }
            }
            Clifford::X(q) => *self = self.apply_pauli(&PauliOperator::single(self.n, q, Pauli1::X)),
            Clifford::Y(q) => *self = self.apply_pauli(&PauliOperator::single(self.n, q, Pauli1::Y)),
            Clifford::Z(q) => *self = self.apply_pauli(&PauliOperator::single(self.n, q, Pauli1::Z)),
        }
    }

    pub fn norm2(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of outcome +1 for `p`.
    pub fn prob_plus(&self, p: &PauliOperator) -> f64 {
        let pp = self.apply_pauli(p);
        let ev: C = self.amp.iter().zip(&pp.amp).map(|(a, b)| a.conj() * b).sum();
        (1.0 + ev.re) / 2.0
    }

    /// Projects onto the `outcome` eigenspace of `p` and renormalizes.
    pub fn project(&mut self, p: &PauliOperator, outcome: i8) {
        let pp = self.apply_pauli(p);
        let sgn = outcome as f64;
        for (a, b) in self.amp.iter_mut().zip(&pp.amp) {
            *a = (*a + *b * sgn) * 0.5;
        }
        let n = self.norm2().sqrt();
        for a in &mut self.amp {
            *a /= n;
        }
    }

    /// `p|ψ⟩ = |ψ⟩` within tolerance.
    pub fn stabilized_by(&self, p: &PauliOperator) -> bool {
        let pp = self.apply_pauli(p);
        self.amp.iter().zip(&pp.amp).all(|(a, b)| (a - b).norm() < 1e-9)
    }
}

/// Dense matrix of a Pauli operator, row-major `2^n × 2^n`.
pub fn pauli_matrix(p: &PauliOperator) -> Vec<Vec<C>> {
    let n = p.n_qubits();
    let dim = 1 << n;
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let mut e = Dense { n, amp: vec![C::new(0.0, 0.0); dim] };
        e.amp[col] = C::new(1.0, 0.0);
        let out = e.apply_pauli(p);
        for row in 0..dim {
            m[row][col] = out.amp[row];
        }
    }
    m
}

pub fn matmul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let d = a.len();
    let mut out = vec![vec![C::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}
