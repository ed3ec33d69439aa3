//! Single-emitter generation of (encoded) linear chains and spin-noise propagation.
//!
//! The spin is the last qubit of the register, photons are numbered in emission
//! order. Every photon is emitted by a CNOT from the spin onto a fresh `|0⟩`;
//! the spin gets a Hadamard after each `m`-photon block and is measured in `Z`
//! at the end. Spin noise enters through one slot before every emission plus
//! one slot just before the terminal measurement.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph_rewrite::{GraphState, VertexId};
use crate::pauli_algebra::{pauli_frame_between, Clifford, Pauli1, PauliOperator, StabilizerGroup, StabilizerState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmitterError {
    #[error("chain sizes must be positive, got n = {n}, m = {m}")]
    InvalidSize { n: usize, m: usize },
    #[error("invalid spin noise probabilities ({0}, {1}, {2})")]
    InvalidNoise(f64, f64, f64),
    #[error("coherence time must be positive, got {0}")]
    Domain(f64),
    #[error("noise slot {0} out of range ({1} slots)")]
    SlotOutOfRange(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Emit(usize),
    SpinHadamard,
    SpinMeasureZ,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationCircuit {
    steps: Vec<Step>,
    m: usize,
    n_encoded: usize,
}

/// Circuit for a chain of `n_encoded` qubits, each in an `m`-photon repetition code.
pub fn build_chain_circuit(n_encoded: usize, m: usize) -> Result<GenerationCircuit, EmitterError> {
    if n_encoded == 0 || m == 0 {
        return Err(EmitterError::InvalidSize { n: n_encoded, m });
    }
    let mut steps = Vec::with_capacity(n_encoded * (m + 1) + 1);
    for b in 0..n_encoded {
        steps.extend((0..m).map(|k| Step::Emit(b * m + k)));
        steps.push(Step::SpinHadamard);
    }
    steps.push(Step::SpinMeasureZ);
    Ok(GenerationCircuit { steps, m, n_encoded })
}

impl GenerationCircuit {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_encoded(&self) -> usize {
        self.n_encoded
    }

    pub fn n_photons(&self) -> usize {
        self.m * self.n_encoded
    }

    /// Register index of the spin.
    pub fn spin(&self) -> usize {
        self.n_photons()
    }

    /// Slot `k < n_photons` precedes emission of photon `k`; the last slot precedes the measurement.
    pub fn noise_slots(&self) -> usize {
        self.n_photons() + 1
    }

    pub fn block_of(&self, photon: usize) -> usize {
        photon / self.m
    }

    /// First photon of each encoded qubit, which carries `Z̄`.
    pub fn block_head(&self, block: usize) -> usize {
        block * self.m
    }

    /// Graph state the noiseless circuit produces for measurement outcome `+1`:
    /// block heads form a path, the other photons hang off their head with a Hadamard flag.
    pub fn target_graph(&self) -> GraphState {
        let mut g = GraphState::new();
        for p in 0..self.n_photons() {
            g.add_vertex(VertexId(p as u32));
        }
        for b in 0..self.n_encoded {
            let h = VertexId(self.block_head(b) as u32);
            if b + 1 < self.n_encoded {
                g.add_edge(h, VertexId(self.block_head(b + 1) as u32)).expect("fresh edge");
            }
            for k in 1..self.m {
                let leaf = VertexId((self.block_head(b) + k) as u32);
                g.add_edge(h, leaf).expect("fresh edge");
                g.set_hadamard(leaf, true);
            }
        }
        g
    }

    /// Runs the noiseless circuit on a tableau and returns the photon state for the
    /// given spin outcome (random when `None`) together with that outcome.
    pub fn simulate(&self, outcome: Option<i8>, injected: &[SpinError], seed: u64) -> (StabilizerGroup, i8) {
        let n = self.n_photons();
        let s = self.spin();
        let mut state = StabilizerState::zero(n + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        state.apply_clifford(Clifford::H(s)).expect("in range");
        let inject = |state: &mut StabilizerState, slot: usize| {
            for e in injected.iter().filter(|e| e.slot == slot) {
                let gate = match e.pauli {
                    Pauli1::I => continue,
                    Pauli1::X => Clifford::X(s),
                    Pauli1::Y => Clifford::Y(s),
                    Pauli1::Z => Clifford::Z(s),
                };
                state.apply_clifford(gate).expect("in range");
            }
        };
        let mut value = 1;
        for step in &self.steps {
            match *step {
                Step::Emit(p) => {
                    inject(&mut state, p);
                    state.apply_clifford(Clifford::Cnot(s, p)).expect("in range");
                }
                Step::SpinHadamard => state.apply_clifford(Clifford::H(s)).expect("in range"),
                Step::SpinMeasureZ => {
                    inject(&mut state, n);
                    value = state.measure_pauli(&PauliOperator::single(n + 1, s, Pauli1::Z), outcome, &mut rng).expect("spin outcome is random");
                }
            }
        }
        let keep: Vec<usize> = (0..n).collect();
        (state.group().restrict_to(&keep), value)
    }
}

impl fmt::Display for GenerationCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Emit(p) => format!("E{p}"),
                Step::SpinHadamard => "H".to_string(),
                Step::SpinMeasureZ => "Mz".to_string(),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Per-slot spin Pauli probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinNoiseParams {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl SpinNoiseParams {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self, EmitterError> {
        let ok = [p_x, p_y, p_z].iter().all(|p| p.is_finite() && *p >= 0.0) && p_x + p_y + p_z <= 1.0 + 1e-12;
        if !ok {
            return Err(EmitterError::InvalidNoise(p_x, p_y, p_z));
        }
        Ok(SpinNoiseParams { p_x, p_y, p_z })
    }

    pub fn noiseless() -> Self {
        SpinNoiseParams { p_x: 0.0, p_y: 0.0, p_z: 0.0 }
    }

    /// `X`, `Y`, `Z` each with probability `p / 3`.
    pub fn depolarizing(p: f64) -> Result<Self, EmitterError> {
        Self::new(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn dephasing(p_z: f64) -> Result<Self, EmitterError> {
        Self::new(0.0, 0.0, p_z)
    }

    /// Depolarizing channel of a Markovian spin with coherence time `t2` over one photon time `tau`.
    pub fn markov(tau: f64, t2: f64) -> Result<Self, EmitterError> {
        Self::depolarizing(markov_p_from_t2(tau, t2)?)
    }

    pub fn total(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    pub fn is_noiseless(&self) -> bool {
        self.total() == 0.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli1 {
        let u: f64 = rng.random();
        if u < self.p_x {
            Pauli1::X
        } else if u < self.p_x + self.p_y {
            Pauli1::Y
        } else if u < self.total() {
            Pauli1::Z
        } else {
            Pauli1::I
        }
    }
}

/// `p = (3/4)(1 − e^{−τ/T₂})`.
pub fn markov_p_from_t2(tau: f64, t2: f64) -> Result<f64, EmitterError> {
    if !(t2 > 0.0) {
        return Err(EmitterError::Domain(t2));
    }
    if !(tau >= 0.0) {
        return Err(EmitterError::Domain(tau));
    }
    Ok(0.75 * -(-tau / t2).exp_m1())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinError {
    pub slot: usize,
    pub pauli: Pauli1,
}

/// One independent draw per noise slot; identity draws are omitted.
pub fn sample_spin_errors<R: Rng + ?Sized>(circuit: &GenerationCircuit, params: &SpinNoiseParams, rng: &mut R) -> Vec<SpinError> {
    if params.is_noiseless() {
        return Vec::new();
    }
    (0..circuit.noise_slots())
        .filter_map(|slot| match params.sample(rng) {
            Pauli1::I => None,
            pauli => Some(SpinError { slot, pauli }),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhotonErrorVector(pub Vec<Pauli1>);

impl PhotonErrorVector {
    pub fn identity(n: usize) -> Self {
        PhotonErrorVector(vec![Pauli1::I; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|p| **p != Pauli1::I).count()
    }

    pub fn to_operator(&self) -> PauliOperator {
        let terms: Vec<(usize, Pauli1)> = self.0.iter().copied().enumerate().collect();
        PauliOperator::from_sparse(self.len(), &terms)
    }

    pub fn from_operator(p: &PauliOperator) -> Self {
        PhotonErrorVector((0..p.n_qubits()).map(|q| p.get(q)).collect())
    }

    pub fn compose(&self, other: &PhotonErrorVector) -> PhotonErrorVector {
        PhotonErrorVector(self.0.iter().zip(&other.0).map(|(a, b)| a.compose(*b)).collect())
    }
}

impl fmt::Display for PhotonErrorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

/// Result of pushing spin errors through the circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatedError {
    /// Canonical photon error, excluding the terminal flip.
    pub photons: PhotonErrorVector,
    /// The spin carried `X` into the terminal measurement, so the outcome-dependent
    /// correction is applied for the wrong branch.
    pub terminal_flip: bool,
}

/// Precomputed stabilizer data of one circuit for repeated propagation.
#[derive(Clone, Debug)]
pub struct Propagator {
    circuit: GenerationCircuit,
    group: StabilizerGroup,
    terminal_correction: PauliOperator,
}

impl Propagator {
    pub fn new(circuit: &GenerationCircuit) -> Self {
        let (plus, _) = circuit.simulate(Some(1), &[], 0);
        let (minus, _) = circuit.simulate(Some(-1), &[], 0);
        let terminal_correction = canonical_error(&plus, &pauli_frame_between(&minus, &plus).expect("branches share a span"));
        Propagator { circuit: circuit.clone(), group: plus, terminal_correction }
    }

    pub fn circuit(&self) -> &GenerationCircuit {
        &self.circuit
    }

    /// Photon stabilizers of the resource state for spin outcome `+1`.
    pub fn resource_group(&self) -> &StabilizerGroup {
        &self.group
    }

    /// Photon Pauli that maps the `−1` measurement branch onto the `+1` branch.
    pub fn terminal_correction(&self) -> &PauliOperator {
        &self.terminal_correction
    }

    /// Error on spin and photons right before the terminal measurement, unreduced.
    pub fn raw(&self, errors: &[SpinError]) -> Result<PauliOperator, EmitterError> {
        let c = &self.circuit;
        let (n, s) = (c.n_photons(), c.spin());
        let slots = c.noise_slots();
        let mut by_slot = vec![Pauli1::I; slots];
        for e in errors {
            if e.slot >= slots {
                return Err(EmitterError::SlotOutOfRange(e.slot, slots));
            }
            by_slot[e.slot] = by_slot[e.slot].compose(e.pauli);
        }
        let mut err = PauliOperator::identity(n + 1);
        let inject = |err: &mut PauliOperator, slot: usize| {
            if by_slot[slot] != Pauli1::I {
                let cur = err.get(s);
                err.set(s, cur.compose(by_slot[slot]));
            }
        };
        for step in c.steps() {
            match *step {
                Step::Emit(p) => {
                    inject(&mut err, p);
                    crate::pauli_algebra::conjugate(&mut err, Clifford::Cnot(s, p));
                }
                Step::SpinHadamard => crate::pauli_algebra::conjugate(&mut err, Clifford::H(s)),
                Step::SpinMeasureZ => inject(&mut err, n),
            }
        }
        err.set_negative(false);
        Ok(err)
    }

    pub fn propagate(&self, errors: &[SpinError]) -> Result<PropagatedError, EmitterError> {
        let raw = self.raw(errors)?;
        let n = self.circuit.n_photons();
        let flip = raw.get(n).has_x();
        let photons = raw.restrict(&(0..n).collect::<Vec<_>>());
        Ok(PropagatedError { photons: PhotonErrorVector::from_operator(&canonical_error(&self.group, &photons)), terminal_flip: flip })
    }

    /// Photon error including the terminal correction, in canonical form.
    pub fn effective(&self, e: &PropagatedError) -> PhotonErrorVector {
        let mut op = e.photons.to_operator();
        if e.terminal_flip {
            op = unsigned_product(&op, &self.terminal_correction);
        }
        PhotonErrorVector::from_operator(&canonical_error(&self.group, &op))
    }

    /// Syndrome of a photon error against the resource generators, as anticommutation bits.
    pub fn syndrome(&self, e: &PhotonErrorVector) -> Vec<bool> {
        let op = e.to_operator();
        self.group.generators().iter().map(|g| !g.commutes(&op)).collect()
    }
}

pub fn propagate_errors(circuit: &GenerationCircuit, spin_errors: &[SpinError]) -> Result<PropagatedError, EmitterError> {
    Propagator::new(circuit).propagate(spin_errors)
}

fn unsigned_product(a: &PauliOperator, b: &PauliOperator) -> PauliOperator {
    let mut row = a.symplectic_row();
    row.xor_assign(&b.symplectic_row());
    PauliOperator::from_symplectic_row(&row, false)
}

const EXHAUSTIVE_RANK: usize = 20;

type ErrorKey = (usize, Vec<usize>, Vec<u64>);

fn error_key(x: &[u64], z: &[u64], n: usize) -> ErrorKey {
    let support: Vec<usize> = (0..n).filter(|&q| (x[q / 64] | z[q / 64]) >> (q % 64) & 1 == 1).collect();
    let mut labels = x.to_vec();
    labels.extend_from_slice(z);
    (support.len(), support, labels)
}

/// Minimum-weight representative of `err · group`, ties broken towards lower photon indices.
///
/// Exhaustive over the group for rank up to 20, greedy single-generator descent otherwise;
/// both are idempotent.
pub fn canonical_error(group: &StabilizerGroup, err: &PauliOperator) -> PauliOperator {
    let n = err.n_qubits();
    let gens = group.canonical_generators();
    let mut x: Vec<u64> = err.x_bits().words().to_vec();
    let mut z: Vec<u64> = err.z_bits().words().to_vec();
    let gx: Vec<&[u64]> = gens.iter().map(|g| g.x_bits().words()).collect();
    let gz: Vec<&[u64]> = gens.iter().map(|g| g.z_bits().words()).collect();
    let weight = |x: &[u64], z: &[u64]| x.iter().zip(z).map(|(a, b)| (a | b).count_ones() as usize).sum::<usize>();
    let apply = |x: &mut [u64], z: &mut [u64], i: usize| {
        for (w, v) in x.iter_mut().zip(gx[i]) {
            *w ^= v;
        }
        for (w, v) in z.iter_mut().zip(gz[i]) {
            *w ^= v;
        }
    };
    let (bx, bz) = if gens.len() <= EXHAUSTIVE_RANK {
        let mut best = (x.clone(), z.clone());
        let mut best_key = error_key(&x, &z, n);
        for k in 1u64..(1u64 << gens.len()) {
            apply(&mut x, &mut z, k.trailing_zeros() as usize);
            if weight(&x, &z) <= best_key.0 {
                let key = error_key(&x, &z, n);
                if key < best_key {
                    best_key = key;
                    best = (x.clone(), z.clone());
                }
            }
        }
        best
    } else {
        let mut key = error_key(&x, &z, n);
        loop {
            let mut improved = None;
            for i in 0..gens.len() {
                apply(&mut x, &mut z, i);
                let k = error_key(&x, &z, n);
                if k < key && improved.as_ref().is_none_or(|(_, b): &(usize, ErrorKey)| k < *b) {
                    improved = Some((i, k));
                }
                apply(&mut x, &mut z, i);
            }
            match improved {
                Some((i, k)) => {
                    apply(&mut x, &mut z, i);
                    key = k;
                }
                None => break,
            }
        }
        (x, z)
    };
    let mut out = PauliOperator::identity(n);
    for q in 0..n {
        let (xb, zb) = ((bx[q / 64] >> (q % 64)) & 1 == 1, (bz[q / 64] >> (q % 64)) & 1 == 1);
        out.set(q, Pauli1::from_bits(xb, zb));
    }
    out
}

/// Photon errors on one emitted block of photons under the per-photon rules: a spin `Z`
/// before emission `k` lands on photon `k`; a spin `X` lands on photon `k` and every later
/// photon of the block; `Y` does both. Returns the block errors and whether a `Z` is
/// carried onto the first photon of the next block.
pub fn block_photon_errors(slot_errors: &[Pauli1]) -> (Vec<Pauli1>, bool) {
    let mut carry_x = false;
    let mut out = Vec::with_capacity(slot_errors.len());
    for &e in slot_errors {
        carry_x ^= e.has_x();
        out.push(Pauli1::from_bits(carry_x, e.has_z()));
    }
    (out, carry_x)
}

/// Draws slot errors for a block of `n` emissions and maps them with [`block_photon_errors`].
pub fn sample_block_photon_errors<R: Rng + ?Sized>(n: usize, params: &SpinNoiseParams, rng: &mut R) -> Vec<Pauli1> {
    if params.is_noiseless() {
        return vec![Pauli1::I; n];
    }
    let slots: Vec<Pauli1> = (0..n).map(|_| params.sample(rng)).collect();
    block_photon_errors(&slots).0
}

/// Whole-chain photon errors under the per-photon rules of [`block_photon_errors`],
/// with inter-block `Z` carries and a pre-measurement `X` mapped to the terminal correction.
/// The carry out of the last block reaches the measurement as `Z` and drops out.
pub fn local_photon_errors(p: &Propagator, errors: &[SpinError]) -> Result<PhotonErrorVector, EmitterError> {
    let c = p.circuit();
    let slots = c.noise_slots();
    let mut by_slot = vec![Pauli1::I; slots];
    for e in errors {
        if e.slot >= slots {
            return Err(EmitterError::SlotOutOfRange(e.slot, slots));
        }
        by_slot[e.slot] = by_slot[e.slot].compose(e.pauli);
    }
    let mut out = Vec::with_capacity(c.n_photons());
    let mut carry_z = false;
    for b in 0..c.n_encoded() {
        let range = c.block_head(b)..c.block_head(b) + c.m();
        let (mut block, carry) = block_photon_errors(&by_slot[range]);
        if carry_z {
            block[0] = block[0].compose(Pauli1::Z);
        }
        carry_z = carry;
        out.extend(block);
    }
    let mut op = PhotonErrorVector(out).to_operator();
    if by_slot[c.n_photons()].has_x() {
        op = unsigned_product(&op, p.terminal_correction());
    }
    Ok(PhotonErrorVector::from_operator(&op))
}
