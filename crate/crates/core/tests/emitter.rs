use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sffcc::emitter::*;
use sffcc::pauli_algebra::{groups_equal, Pauli1, PauliOperator, StabilizerGroup};

use Pauli1::{I, X, Y, Z};

fn err(slot: usize, pauli: Pauli1) -> SpinError {
    SpinError { slot, pauli }
}

fn pv(s: &str) -> PhotonErrorVector {
    PhotonErrorVector::from_operator(&PauliOperator::parse(&format!("+{s}")).unwrap())
}

fn equivalent(p: &Propagator, a: &PhotonErrorVector, b: &PhotonErrorVector) -> bool {
    let mut row = a.to_operator().symplectic_row();
    row.xor_assign(&b.to_operator().symplectic_row());
    p.resource_group().contains_unsigned(&PauliOperator::from_symplectic_row(&row, false))
}

#[test]
fn circuit_shapes() {
    let c = build_chain_circuit(4, 1).unwrap();
    assert_eq!(c.to_string(), "E0 H E1 H E2 H E3 H Mz");
    let c = build_chain_circuit(1, 3).unwrap();
    assert_eq!(c.to_string(), "E0 E1 E2 H Mz");
    let c = build_chain_circuit(2, 2).unwrap();
    assert_eq!(c.to_string(), "E0 E1 H E2 E3 H Mz");
    let c = build_chain_circuit(6, 5).unwrap();
    assert_eq!(c.steps().iter().filter(|s| matches!(s, Step::Emit(_))).count(), 30);
    assert_eq!(c.steps().iter().filter(|s| matches!(s, Step::SpinMeasureZ)).count(), 1);
    assert_eq!(c.steps().last(), Some(&Step::SpinMeasureZ));
    assert!(build_chain_circuit(0, 2).is_err());
    assert!(build_chain_circuit(3, 0).is_err());
}

#[test]
fn noiseless_circuit_makes_encoded_chain() {
    for (n, m) in [(1, 1), (4, 1), (1, 3), (2, 2), (3, 3), (4, 2)] {
        let c = build_chain_circuit(n, m).unwrap();
        let (group, _) = c.simulate(Some(1), &[], 7);
        let g = c.target_graph();
        let order: Vec<_> = g.qubit_order();
        let target = StabilizerGroup::new(c.n_photons(), g.stabilizer_generators(&order)).unwrap();
        assert!(groups_equal(&group, &target), "n={n} m={m}");
        for b in 0..n {
            let head = c.block_head(b);
            let mut xbar = Vec::new();
            for j in 0..m {
                xbar.push((head + j, X));
                if j > 0 {
                    let zz = PauliOperator::from_sparse(c.n_photons(), &[(head, Z), (head + j, Z)]);
                    assert!(group.contains(&zz));
                }
            }
            // X̄_b Z̄_{b-1} Z̄_{b+1}
            if b > 0 {
                xbar.push((c.block_head(b - 1), Z));
            }
            if b + 1 < n {
                xbar.push((c.block_head(b + 1), Z));
            }
            assert!(group.contains(&PauliOperator::from_sparse(c.n_photons(), &xbar)));
        }
    }
}

#[test]
fn markov_probability() {
    assert!(markov_p_from_t2(1.0, 1e300).unwrap() < 1e-299);
    assert_eq!(markov_p_from_t2(0.0, 3.0).unwrap(), 0.0);
    let t2 = 2.5;
    assert!((markov_p_from_t2(t2 * 2f64.ln(), t2).unwrap() - 0.375).abs() < 1e-15);
    let p = markov_p_from_t2(1.0, 500.0).unwrap();
    assert!((p - 0.0015).abs() < 5e-6, "{p}");
    assert!((p - 0.75 * (1.0 - (-0.002f64).exp())).abs() < 1e-15);
    assert!(markov_p_from_t2(1.0, 0.0).is_err());
    assert!(markov_p_from_t2(1.0, -2.0).is_err());
    let d = SpinNoiseParams::markov(1.0, 500.0).unwrap();
    assert!((d.total() - p).abs() < 1e-15);
}

#[test]
fn noise_params_validation() {
    assert!(SpinNoiseParams::new(0.5, 0.4, 0.2).is_err());
    assert!(SpinNoiseParams::new(-0.1, 0.0, 0.0).is_err());
    assert!(SpinNoiseParams::new(f64::NAN, 0.0, 0.0).is_err());
    assert!(SpinNoiseParams::depolarizing(1.0).is_ok());
}

#[test]
fn sampling_statistics() {
    let c = build_chain_circuit(4, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        assert!(sample_spin_errors(&c, &SpinNoiseParams::noiseless(), &mut rng).is_empty());
    }

    let full = SpinNoiseParams::depolarizing(1.0).unwrap();
    let mut counts = [0usize; 3];
    let mut draws = 0usize;
    while draws < 100_000 {
        let e = sample_spin_errors(&c, &full, &mut rng);
        assert_eq!(e.len(), c.noise_slots());
        assert!(e.iter().enumerate().all(|(i, x)| x.slot == i));
        for x in e {
            counts[match x.pauli {
                X => 0,
                Y => 1,
                Z => 2,
                I => unreachable!(),
            }] += 1;
        }
        draws += c.noise_slots();
    }
    let sigma = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    for k in counts {
        assert!((k as f64 - draws as f64 / 3.0).abs() < 3.0 * sigma, "{counts:?}");
    }

    let p = SpinNoiseParams::depolarizing(0.3).unwrap();
    let (mut hits, mut slots) = (0usize, 0usize);
    while slots < 100_000 {
        hits += sample_spin_errors(&c, &p, &mut rng).len();
        slots += c.noise_slots();
    }
    let sigma = (slots as f64 * 0.3 * 0.7).sqrt();
    assert!((hits as f64 - 0.3 * slots as f64).abs() < 3.0 * sigma);

    let a = sample_spin_errors(&c, &p, &mut ChaCha8Rng::seed_from_u64(5));
    let b = sample_spin_errors(&c, &p, &mut ChaCha8Rng::seed_from_u64(5));
    assert_eq!(a, b);
}

#[test]
fn spin_flip_after_first_photon() {
    // Two encoded qubits of two photons; X strikes between photon 1 and photon 2.
    let c = build_chain_circuit(2, 2).unwrap();
    let p = Propagator::new(&c);
    // Heisenberg picture: X copied onto photon 2, then the spin carries Z into the
    // second block, becomes X after the last Hadamard and flips the measurement.
    let raw = p.raw(&[err(1, X)]).unwrap();
    assert_eq!(raw.to_string(), "+IXIIX");
    let out = p.propagate(&[err(1, X)]).unwrap();
    assert!(out.terminal_flip);
    assert_eq!(p.effective(&out), pv("XIII"));
    assert_eq!(local_photon_errors(&p, &[err(1, X)]).unwrap(), pv("IXZI"));
}

#[test]
fn spin_z_before_emission_is_single_photon_z() {
    let c = build_chain_circuit(3, 3).unwrap();
    let p = Propagator::new(&c);
    for slot in 0..c.n_photons() {
        let out = p.propagate(&[err(slot, Z)]).unwrap();
        let eff = p.effective(&out);
        let mut expect = PhotonErrorVector::identity(c.n_photons());
        expect.0[slot] = Z;
        assert!(equivalent(&p, &eff, &expect), "slot {slot}: {eff}");
        assert_eq!(eff.weight(), 1);
        if slot == c.block_head(c.block_of(slot)) {
            assert_eq!(eff, expect);
        }
    }
}

#[test]
fn spin_y_before_emission() {
    let c = build_chain_circuit(2, 3).unwrap();
    let p = Propagator::new(&c);
    // Y before photon 0: Y on photon 0, X on photons 1 and 2, Z on the next head.
    let local = local_photon_errors(&p, &[err(0, Y)]).unwrap();
    assert_eq!(local, pv("YXXZII"));
    let eff = p.effective(&p.propagate(&[err(0, Y)]).unwrap());
    assert!(equivalent(&p, &eff, &local));
    let raw = p.raw(&[err(0, Y)]).unwrap();
    assert_eq!(raw.restrict(&[0, 1, 2]).to_string(), "+XXX");
}

#[test]
fn terminal_slot_flips_frame() {
    let c = build_chain_circuit(3, 2).unwrap();
    let p = Propagator::new(&c);
    let corr = p.terminal_correction();
    assert_eq!(*corr, PauliOperator::single(c.n_photons(), c.block_head(2), Z));
    let out = p.propagate(&[err(c.n_photons(), X)]).unwrap();
    assert!(out.terminal_flip);
    assert_eq!(out.photons.weight(), 0);
    let out = p.propagate(&[err(c.n_photons(), Z)]).unwrap();
    assert!(!out.terminal_flip);
    assert_eq!(out.photons.weight(), 0);
}

/// Tableau run with injected spin Paulis, outcome-dependent correction, then signs of the
/// resource generators.
fn tableau_syndrome(p: &Propagator, errors: &[SpinError], seed: u64) -> Vec<bool> {
    let (group, outcome) = p.circuit().simulate(None, errors, seed);
    let corr = p.terminal_correction();
    p.resource_group()
        .generators()
        .iter()
        .map(|g| {
            let neg = group.membership_sign(g).expect("same span");
            let flipped = outcome == -1 && !g.commutes(corr);
            neg ^ flipped ^ g.is_negative()
        })
        .collect()
}

#[test]
fn propagation_matches_tableau() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (n, m) in [(1, 1), (2, 1), (4, 1), (1, 4), (2, 2), (2, 3), (3, 2), (4, 2), (2, 4), (1, 8)] {
        let c = build_chain_circuit(n, m).unwrap();
        let p = Propagator::new(&c);
        for slot in 0..c.noise_slots() {
            for pauli in [X, Y, Z] {
                let e = [err(slot, pauli)];
                let eff = p.effective(&p.propagate(&e).unwrap());
                assert_eq!(p.syndrome(&eff), tableau_syndrome(&p, &e, rng.random()), "n={n} m={m} {e:?}");
                assert_eq!(p.syndrome(&local_photon_errors(&p, &e).unwrap()), p.syndrome(&eff));
            }
        }
        let params = SpinNoiseParams::new(0.1, 0.15, 0.2).unwrap();
        for _ in 0..50 {
            let e = sample_spin_errors(&c, &params, &mut rng);
            let eff = p.effective(&p.propagate(&e).unwrap());
            assert_eq!(p.syndrome(&eff), tableau_syndrome(&p, &e, rng.random()), "n={n} m={m} {e:?}");
            assert!(equivalent(&p, &local_photon_errors(&p, &e).unwrap(), &eff));
        }
    }
}

#[test]
fn greedy_reduction_on_long_chain() {
    let c = build_chain_circuit(6, 4).unwrap();
    let p = Propagator::new(&c);
    assert!(p.resource_group().rank() > 20);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = SpinNoiseParams::depolarizing(0.3).unwrap();
    for _ in 0..30 {
        let e = sample_spin_errors(&c, &params, &mut rng);
        let out = p.propagate(&e).unwrap();
        let raw = p.raw(&e).unwrap().restrict(&(0..c.n_photons()).collect::<Vec<_>>());
        let raw = PhotonErrorVector::from_operator(&raw);
        assert!(equivalent(&p, &out.photons, &raw));
        assert!(out.photons.weight() <= raw.weight());
        let again = canonical_error(p.resource_group(), &out.photons.to_operator());
        assert_eq!(PhotonErrorVector::from_operator(&again), out.photons);
    }
}

fn arb_errors(slots: usize) -> impl Strategy<Value = Vec<SpinError>> {
    prop::collection::vec((0..slots, 1u8..4), 0..6).prop_map(|v| {
        v.into_iter().map(|(slot, k)| err(slot, [I, X, Y, Z][k as usize])).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]
    #[test]
    fn propagation_is_linear(a in arb_errors(9), b in arb_errors(9)) {
        let c = build_chain_circuit(4, 2).unwrap();
        let p = Propagator::new(&c);
        let pa = p.propagate(&a).unwrap();
        let pb = p.propagate(&b).unwrap();
        let ab: Vec<SpinError> = a.iter().chain(&b).copied().collect();
        let pab = p.propagate(&ab).unwrap();
        let sum = canonical_error(p.resource_group(), &pa.photons.compose(&pb.photons).to_operator());
        prop_assert_eq!(PhotonErrorVector::from_operator(&sum), pab.photons);
        prop_assert_eq!(pa.terminal_flip ^ pb.terminal_flip, pab.terminal_flip);
    }

    #[test]
    fn reduction_is_idempotent(a in arb_errors(10)) {
        let c = build_chain_circuit(3, 3).unwrap();
        let p = Propagator::new(&c);
        let once = p.propagate(&a).unwrap().photons;
        let twice = canonical_error(p.resource_group(), &once.to_operator());
        prop_assert_eq!(PhotonErrorVector::from_operator(&twice), once);
    }
}
