use std::collections::VecDeque;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sffcc::decoder::*;
use sffcc::gf2::{BitMatrix, BitVec};
use sffcc::lattice::{build_sffcc_network, derive_syndrome_graph, SectorGraph, SyndromeGraph};

fn graph(l: usize) -> SyndromeGraph {
    derive_syndrome_graph(&build_sffcc_network(l).unwrap())
}

fn random_assignment(sg: &SyndromeGraph, p_flip: f64, p_erase: f64, rng: &mut ChaCha8Rng) -> OutcomeAssignment {
    let n = sg.n_slots();
    OutcomeAssignment { flipped: (0..n).map(|_| rng.random_bool(p_flip)).collect(), erased: (0..n).map(|_| rng.random_bool(p_erase)).collect() }
}

fn local_erased(sec: &SectorGraph, a: &OutcomeAssignment) -> Vec<bool> {
    sec.slots.iter().map(|s| a.erased[s.slot]).collect()
}

fn local_flips(sec: &SectorGraph, a: &OutcomeAssignment) -> Vec<u32> {
    (0..sec.n_slots() as u32).filter(|&s| a.flipped[sec.slots[s as usize].slot] && !a.erased[sec.slots[s as usize].slot]).collect()
}

/// Logicals with no erasure-free representative, by rank over the erased columns.
fn erased_logicals_by_rank(sec: &SectorGraph, erased: &[bool]) -> u8 {
    let cols: Vec<usize> = (0..sec.n_slots()).filter(|&s| erased[s]).collect();
    let pos = |s: usize| cols.binary_search(&s).ok();
    let restrict = |slots: &[u32]| BitVec::from_indices(cols.len(), slots.iter().filter_map(|&s| pos(s as usize)));
    let h = BitMatrix::from_rows(cols.len(), sec.checks.iter().map(|c| restrict(&c.slots)).collect());
    let base = h.rank();
    let mut out = 0;
    for (k, lg) in sec.logicals.iter().enumerate() {
        let mut m = h.clone();
        m.push_row(restrict(&lg.slots));
        if m.rank() > base {
            out |= 1 << k;
        }
    }
    out
}

fn brute_min_matching(dist: &[Vec<u32>]) -> Option<u64> {
    fn go(dist: &[Vec<u32>], used: &mut Vec<bool>) -> Option<u64> {
        let Some(i) = used.iter().position(|&u| !u) else { return Some(0) };
        used[i] = true;
        let mut best: Option<u64> = None;
        for j in i + 1..dist.len() {
            if !used[j] && dist[i][j] != u32::MAX {
                used[j] = true;
                if let Some(rest) = go(dist, used) {
                    let total = rest + dist[i][j] as u64;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                used[j] = false;
            }
        }
        used[i] = false;
        best
    }
    go(dist, &mut vec![false; dist.len()])
}

/// Supercell distances by plain BFS on the quotient graph.
fn quotient_distances(sec: &SectorGraph, sc: &SupercellGraph, defects: &[usize]) -> Vec<Vec<u32>> {
    let n = sec.n_checks();
    let mut adj = vec![Vec::new(); n];
    for s in sc.surviving_slots(sec) {
        let [a, b] = sec.slots[s].checks.map(|c| sc.root(c as usize));
        adj[a].push(b);
        adj[b].push(a);
    }
    defects
        .iter()
        .map(|&src| {
            let mut d = vec![u32::MAX; n];
            d[src] = 0;
            let mut q = VecDeque::from([src]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if d[v] == u32::MAX {
                        d[v] = d[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            defects.iter().map(|&t| d[t]).collect()
        })
        .collect()
}

#[test]
fn no_erasures_leave_graph_unchanged() {
    let sg = graph(2);
    for sec in &sg.sectors {
        let sc = merge_supercells(sec, &vec![false; sec.n_slots()]).unwrap();
        assert_eq!(sc.n_supercells(), sec.n_checks());
        assert_eq!(sc.surviving_slots(sec).count(), sec.n_slots());
        for k in 0..sec.logicals.len() {
            assert_eq!(sc.remapped_logical(sec, k), sec.logicals[k].slots);
        }
    }
}

#[test]
fn all_erased_is_logical_erasure() {
    let sg = graph(2);
    let a = OutcomeAssignment { flipped: vec![false; sg.n_slots()], erased: vec![true; sg.n_slots()] };
    for sec in &sg.sectors {
        assert_eq!(merge_supercells(sec, &local_erased(sec, &a)).unwrap_err(), LogicalErasure { logicals: 0b111 });
    }
    assert_eq!(Decoder::new(&sg).decode(&a).unwrap(), Verdict::LogicalErasure);
}

#[test]
fn single_erasure_merges_two_checks() {
    let sg = graph(2);
    for sec in &sg.sectors {
        for s in [0, 7, sec.n_slots() - 1] {
            let mut erased = vec![false; sec.n_slots()];
            erased[s] = true;
            let sc = merge_supercells(sec, &erased).unwrap();
            let [a, b] = sec.slots[s].checks.map(|c| c as usize);
            let r = sc.root(a);
            assert_eq!(sc.root(b), r);
            assert_eq!(sc.members(r), { let mut m = vec![a, b]; m.sort(); m });
            assert_eq!(sc.boundary(sec, r).len(), 22);
            assert_eq!(sc.n_supercells(), sec.n_checks() - 1);
            for k in 0..3 {
                assert!(!sc.remapped_logical(sec, k).contains(&(s as u32)));
            }
            // Parity of the merged cell is the sum of the two check parities.
            let flips: Vec<u32> = sec.checks[a].slots.iter().copied().filter(|&x| x as usize != s).take(3).collect();
            let orig = sec.syndrome(&flips);
            assert_eq!(sc.syndrome(sec, &flips)[r], orig[a] ^ orig[b]);
        }
    }
}

#[test]
fn logical_erasure_matches_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sg = graph(2);
    let mut seen = [0usize; 2];
    for trial in 0..600 {
        let p = [0.1, 0.3, 0.5, 0.7][trial % 4];
        for sec in &sg.sectors {
            let erased: Vec<bool> = (0..sec.n_slots()).map(|_| rng.random_bool(p)).collect();
            let expect = erased_logicals_by_rank(sec, &erased);
            match merge_supercells(sec, &erased) {
                Ok(sc) => {
                    assert_eq!(expect, 0);
                    for k in 0..3 {
                        assert!(sc.remapped_logical(sec, k).iter().all(|&s| !erased[s as usize]));
                    }
                    seen[0] += 1;
                }
                Err(e) => {
                    assert_eq!(e.logicals, expect);
                    seen[1] += 1;
                }
            }
        }
    }
    assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
}

#[test]
fn empty_syndrome_gives_empty_correction() {
    let sg = graph(4);
    let mut dec = Decoder::new(&sg);
    let sc = merge_supercells(&sg.sectors[0], &vec![false; sg.sectors[0].n_slots()]).unwrap();
    assert!(dec.mwpm_decode(0, &sc, &[]).unwrap().is_empty());
    let d = dec.decode_sector(1, &OutcomeAssignment::ideal(sg.n_slots())).unwrap();
    assert_eq!(d.verdict, Verdict::Success);
    assert!(d.correction.is_empty() && d.defects.is_empty());
}

#[test]
fn single_flip_is_corrected_with_weight_one() {
    for l in [2, 4] {
        let sg = graph(l);
        let mut dec = Decoder::new(&sg);
        for g in 0..sg.n_slots() {
            let mut a = OutcomeAssignment::ideal(sg.n_slots());
            a.flipped[g] = true;
            let (k, local) = sg.slot_location[g];
            let d = dec.decode_sector(k as usize, &a).unwrap();
            assert_eq!(d.defects.len(), 2);
            assert_eq!(d.correction.len(), 1, "L={l} slot {g}");
            assert_eq!(sg.sectors[k as usize].slots[d.correction[0] as usize].checks, sg.sectors[k as usize].slots[local as usize].checks);
            assert_eq!(dec.decode(&a).unwrap(), Verdict::Success, "L={l} slot {g}");
        }
    }
}

#[test]
fn correction_clears_the_syndrome() {
    let sg = graph(4);
    let mut dec = Decoder::new(&sg);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..2 {
        let sec = &sg.sectors[k];
        for _ in 0..20 {
            let mut flips: Vec<u32> = (0..50).map(|_| rng.random_range(0..sec.n_slots() as u32)).collect();
            flips.sort_unstable();
            flips.dedup();
            let sc = merge_supercells(sec, &vec![false; sec.n_slots()]).unwrap();
            let corr = dec.decode_with(k, &sc, &flips).unwrap();
            let mut both = flips.clone();
            both.extend(&corr);
            assert!(sec.syndrome(&both).iter().all(|&s| !s));
        }
    }
}

#[test]
fn correction_clears_supercell_syndrome_under_erasure() {
    let sg = graph(4);
    let mut dec = Decoder::new(&sg);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let a = random_assignment(&sg, 0.03, 0.08, &mut rng);
        for k in 0..2 {
            let sec = &sg.sectors[k];
            let Ok(sc) = merge_supercells(sec, &local_erased(sec, &a)) else { continue };
            let flips = local_flips(sec, &a);
            let corr = dec.decode_with(k, &sc, &flips).unwrap();
            assert!(corr.iter().all(|&s| !sc.is_erased(s as usize)));
            let mut both = flips.clone();
            both.extend(&corr);
            assert!(sc.syndrome(sec, &both).iter().all(|&s| !s));
        }
    }
}

#[test]
fn matching_is_minimum_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let n = 2 * rng.random_range(1..=5);
        let mut d = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = if rng.random_bool(0.1) { u32::MAX } else { rng.random_range(1..30) };
                d[i][j] = w;
                d[j][i] = w;
            }
        }
        let best = brute_min_matching(&d);
        match match_defects(&d) {
            Ok(pairs) => {
                assert_eq!(pairs.len(), n / 2);
                let total: u64 = pairs.iter().map(|&(i, j)| d[i][j] as u64).sum();
                assert_eq!(Some(total), best);
            }
            Err(_) => assert_eq!(best, None),
        }
    }
}

#[test]
fn matching_on_graph_distances_is_minimum_weight() {
    let sg = graph(4);
    let mut dec = Decoder::new(&sg);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    while checked < 100 {
        let a = random_assignment(&sg, 0.004, 0.05, &mut rng);
        let sec = &sg.sectors[checked % 2];
        let Ok(sc) = merge_supercells(sec, &local_erased(sec, &a)) else { continue };
        let flips = local_flips(sec, &a);
        let syn = sc.syndrome(sec, &flips);
        let defects: Vec<usize> = (0..syn.len()).filter(|&c| syn[c]).collect();
        if defects.is_empty() || defects.len() > 10 {
            continue;
        }
        let dm = quotient_distances(sec, &sc, &defects);
        let best = brute_min_matching(&dm).unwrap();
        let pairs = match_defects(&dm).unwrap();
        assert_eq!(pairs.iter().map(|&(i, j)| dm[i][j] as u64).sum::<u64>(), best);
        let corr = dec.mwpm_decode(checked % 2, &sc, &defects).unwrap();
        assert!(corr.len() as u64 <= best);
        checked += 1;
    }
}

#[test]
fn odd_component_is_reported() {
    assert!(matches!(match_defects(&[vec![0, u32::MAX], vec![u32::MAX, 0]]), Err(DecodeError::OddComponent(_))));
    let d = vec![vec![0, 1, u32::MAX], vec![1, 0, u32::MAX], vec![u32::MAX, u32::MAX, 0]];
    assert!(matches!(match_defects(&d), Err(DecodeError::OddComponent(2))));
    let sg = graph(2);
    assert!(matches!(Decoder::new(&sg).decode(&OutcomeAssignment::ideal(3)), Err(DecodeError::LengthMismatch { .. })));
}

#[test]
fn adjudication_examples() {
    let sg = graph(2);
    for sec in &sg.sectors {
        let sc = merge_supercells(sec, &vec![false; sec.n_slots()]).unwrap();
        let some: Vec<u32> = vec![1, 5, 9];
        assert_eq!(adjudicate(sec, &sc, &some, &some), 0);
        for (k, lg) in sec.logicals.iter().enumerate() {
            let cycle = sec.winding_cycle(lg.direction).unwrap();
            assert!(sec.syndrome(&cycle).iter().all(|&s| !s));
            assert_eq!(adjudicate(sec, &sc, &[], &cycle), 1 << k);
        }
        // Two windings of the same class differ by a trivial cycle.
        for lg in &sec.logicals {
            let c = sec.n_checks() / 2 + 1;
            let mut on = vec![false; sec.n_slots()];
            for s in sec.winding_cycle(lg.direction).unwrap().into_iter().chain(sec.winding_cycle_from(c, lg.direction).unwrap()) {
                on[s as usize] ^= true;
            }
            let trivial: Vec<u32> = (0..sec.n_slots() as u32).filter(|&s| on[s as usize]).collect();
            assert!(!trivial.is_empty());
            assert!(sec.syndrome(&trivial).iter().all(|&s| !s));
            assert_eq!(adjudicate(sec, &sc, &[], &trivial), 0);
        }
    }
}

#[test]
fn winding_error_is_a_logical_error() {
    let sg = graph(4);
    let mut dec = Decoder::new(&sg);
    for k in 0..2 {
        let sec = &sg.sectors[k];
        for lg in &sec.logicals {
            let mut a = OutcomeAssignment::ideal(sg.n_slots());
            for s in sec.winding_cycle(lg.direction).unwrap() {
                a.flipped[sec.slots[s as usize].slot] = true;
            }
            let d = dec.decode_sector(k, &a).unwrap();
            assert!(d.defects.is_empty());
            assert_eq!(d.verdict, Verdict::LogicalError);
        }
    }
}

#[test]
fn erasure_keeps_adjudication_well_defined() {
    // With erasures the rerouted logical still detects a winding residual.
    let sg = graph(4);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..2 {
        let sec = &sg.sectors[k];
        for lg in &sec.logicals {
            let cycle = sec.winding_cycle(lg.direction).unwrap();
            let erased: Vec<bool> = (0..sec.n_slots()).map(|s| !cycle.contains(&(s as u32)) && rng.random_bool(0.05)).collect();
            let Ok(sc) = merge_supercells(sec, &erased) else { continue };
            let bit = 1u8 << sec.logicals.iter().position(|x| x.direction == lg.direction).unwrap();
            assert_eq!(adjudicate(sec, &sc, &[], &cycle) & bit, bit);
        }
    }
}

#[test]
fn erasure_only_channel_percolates() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let rate = |l: usize, p: f64, trials: usize, rng: &mut ChaCha8Rng| {
        let sg = graph(l);
        let mut dec = Decoder::new(&sg);
        let fails = (0..trials).filter(|_| dec.decode(&random_assignment(&sg, 0.0, p, rng)).unwrap() == Verdict::LogicalErasure).count();
        fails as f64 / trials as f64
    };
    let high4 = rate(4, 0.5, 200, &mut rng);
    let high8 = rate(8, 0.5, 100, &mut rng);
    assert!(high8 >= high4 && high8 > 0.95, "{high4} {high8}");
    assert_eq!(rate(6, 0.05, 300, &mut rng), 0.0);
}

#[test]
fn verdict_combination() {
    use Verdict::*;
    assert_eq!(Success.combine(Success), Success);
    assert_eq!(Success.combine(LogicalError), LogicalError);
    assert_eq!(LogicalError.combine(LogicalErasure), LogicalErasure);
    assert!(!Success.is_failure() && LogicalError.is_failure());
    let v = [OutcomeValue::Plus, OutcomeValue::Minus, OutcomeValue::Erased];
    let a = OutcomeAssignment::from_values(&v);
    assert_eq!((0..3).map(|s| a.value(s)).collect::<Vec<_>>(), v);
}

#[test]
fn dump_is_json() {
    let sg = graph(2);
    let mut dec = Decoder::new(&sg);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_assignment(&sg, 0.05, 0.05, &mut rng);
    let v: serde_json::Value = serde_json::from_str(&dec.dump(0, &a).unwrap()).unwrap();
    assert!(v["verdict"].is_string());
    assert!(v["correction"].is_array() && v["erased"].is_array() && v["flipped"].is_array());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn single_slot_errors_always_succeed(l in prop::sample::select(vec![2usize, 4, 6, 8]), pick in any::<prop::sample::Index>()) {
        let sg = graph(l);
        let mut a = OutcomeAssignment::ideal(sg.n_slots());
        a.flipped[pick.index(sg.n_slots())] = true;
        prop_assert_eq!(Decoder::new(&sg).decode(&a).unwrap(), Verdict::Success);
    }

    #[test]
    fn decoding_is_deterministic(seed in any::<u64>()) {
        let sg = graph(4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_assignment(&sg, 0.01, 0.05, &mut rng);
        let mut d1 = Decoder::new(&sg);
        let mut d2 = Decoder::new(&sg);
        for k in 0..2 {
            let (x, y) = (d1.decode_sector(k, &a).unwrap(), d2.decode_sector(k, &a).unwrap());
            prop_assert_eq!(x.verdict, y.verdict);
            prop_assert_eq!(x.correction, y.correction);
        }
    }
}

/// Supercell parity is the sum of constituent check parities.
#[test]
fn supercell_parity_conservation() {
    let sg = graph(2);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checked = 0;
    for _ in 0..10_000 {
        let a = random_assignment(&sg, 0.2, 0.08, &mut rng);
        for sec in &sg.sectors {
            let Ok(sc) = merge_supercells(sec, &local_erased(sec, &a)) else { continue };
            let all: Vec<u32> = (0..sec.n_slots() as u32).filter(|&s| a.flipped[sec.slots[s as usize].slot]).collect();
            let per_check = sec.syndrome(&all);
            let merged = sc.syndrome(sec, &all);
            let mut sum = vec![false; sec.n_checks()];
            for c in 0..sec.n_checks() {
                sum[sc.root(c)] ^= per_check[c];
            }
            for c in 0..sec.n_checks() {
                if sc.root(c) == c {
                    assert_eq!(merged[c], sum[c]);
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 5000);
}
