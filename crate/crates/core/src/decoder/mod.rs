//! Erasure-aware minimum-weight perfect matching on the two sector graphs.
//!
//! Erased slots merge their checks into supercells. Each logical is rerouted off
//! the erased slots by multiplying in checks, which is tracked as a parity
//! potential in the union-find; a cycle of erased slots with odd potential means no
//! erasure-free representative exists. The remaining defects are matched with unit
//! slot weights and the residual is tested against the rerouted logicals.

use std::collections::VecDeque;

use serde::Serialize;

use crate::lattice::{SectorGraph, SyndromeGraph};

/// Value of one fusion outcome relative to its ideal value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutcomeValue {
    Plus,
    Minus,
    Erased,
}

/// Per-slot outcomes over the global slot ids of a [`SyndromeGraph`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeAssignment {
    pub flipped: Vec<bool>,
    pub erased: Vec<bool>,
}

impl OutcomeAssignment {
    pub fn ideal(n_slots: usize) -> Self {
        Self { flipped: vec![false; n_slots], erased: vec![false; n_slots] }
    }

    pub fn from_values(values: &[OutcomeValue]) -> Self {
        Self {
            flipped: values.iter().map(|&v| v == OutcomeValue::Minus).collect(),
            erased: values.iter().map(|&v| v == OutcomeValue::Erased).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.flipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flipped.is_empty()
    }

    pub fn value(&self, slot: usize) -> OutcomeValue {
        if self.erased[slot] {
            OutcomeValue::Erased
        } else if self.flipped[slot] {
            OutcomeValue::Minus
        } else {
            OutcomeValue::Plus
        }
    }

    pub fn clear(&mut self) {
        self.flipped.fill(false);
        self.erased.fill(false);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    Success,
    LogicalError,
    LogicalErasure,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        self != Verdict::Success
    }

    /// Failure of a trial from its two sector verdicts; erasure dominates.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("defect {0} has no reachable partner")]
    OddComponent(usize),
    #[error("assignment covers {got} slots, graph has {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// Logicals of one sector left without an erasure-free representative, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogicalErasure {
    pub logicals: u8,
}

/// Checks of one sector merged across erased slots.
#[derive(Clone, Debug)]
pub struct SupercellGraph {
    root: Vec<u32>,
    /// Bit `k`: whether the check is multiplied into logical `k` to reroute it.
    potential: Vec<u8>,
    erased: Vec<bool>,
}

impl SupercellGraph {
    pub fn root(&self, check: usize) -> usize {
        self.root[check] as usize
    }

    pub fn potential(&self, check: usize) -> u8 {
        self.potential[check]
    }

    pub fn is_erased(&self, slot: usize) -> bool {
        self.erased[slot]
    }

    pub fn n_supercells(&self) -> usize {
        self.root.iter().enumerate().filter(|&(c, &r)| r as usize == c).count()
    }

    pub fn members(&self, root: usize) -> Vec<usize> {
        (0..self.root.len()).filter(|&c| self.root[c] as usize == root).collect()
    }

    /// Non-erased slots joining two different supercells.
    pub fn surviving_slots<'a>(&'a self, sec: &'a SectorGraph) -> impl Iterator<Item = usize> + 'a {
        (0..sec.n_slots()).filter(move |&s| {
            let [a, b] = sec.slots[s].checks;
            !self.erased[s] && self.root[a as usize] != self.root[b as usize]
        })
    }

    /// Slots of a supercell's boundary: those with exactly one end inside it.
    pub fn boundary(&self, sec: &SectorGraph, root: usize) -> Vec<usize> {
        (0..sec.n_slots())
            .filter(|&s| {
                let [a, b] = sec.slots[s].checks;
                (self.root[a as usize] as usize == root) != (self.root[b as usize] as usize == root)
            })
            .collect()
    }

    /// Parity of each supercell, indexed by root, for a set of flipped slots.
    pub fn syndrome(&self, sec: &SectorGraph, flipped: &[u32]) -> Vec<bool> {
        let mut s = vec![false; self.root.len()];
        for &e in flipped {
            if self.erased[e as usize] {
                continue;
            }
            for c in sec.slots[e as usize].checks {
                s[self.root[c as usize] as usize] ^= true;
            }
        }
        s
    }

    /// Support of logical `k` after rerouting it off the erased slots.
    pub fn remapped_logical(&self, sec: &SectorGraph, k: usize) -> Vec<u32> {
        let mut on = vec![false; sec.n_slots()];
        for &s in &sec.logicals[k].slots {
            on[s as usize] ^= true;
        }
        for (c, check) in sec.checks.iter().enumerate() {
            if self.potential[c] >> k & 1 == 1 {
                for &s in &check.slots {
                    on[s as usize] ^= true;
                }
            }
        }
        (0..sec.n_slots() as u32).filter(|&s| on[s as usize]).collect()
    }

    /// Bitmask of the rerouted logicals that a set of surviving slots crosses oddly.
    pub fn logical_parity(&self, sec: &SectorGraph, slots: impl IntoIterator<Item = usize>) -> u8 {
        slots.into_iter().fold(0, |m, s| {
            let [a, b] = sec.slots[s].checks;
            m ^ sec.logical_mask[s] ^ self.potential[a as usize] ^ self.potential[b as usize]
        })
    }
}

/// Parity union-find over checks.
struct ParityDsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
    /// Potential relative to the parent.
    pot: Vec<u8>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), rank: vec![0; n], pot: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut r = x;
        while self.parent[r] as usize != r {
            path.push(r);
            r = self.parent[r] as usize;
        }
        // Fix potentials from the top of the path down.
        let mut acc = 0u8;
        for &v in path.iter().rev() {
            acc ^= self.pot[v];
            self.pot[v] = acc;
            self.parent[v] = r as u32;
        }
        (r, if x == r { 0 } else { self.pot[x] })
    }

    /// Imposes `pot(a) ^ pot(b) = w`; returns the violated bits if already joined.
    fn union(&mut self, a: usize, b: usize, w: u8) -> u8 {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb ^ w;
        }
        let d = pa ^ pb ^ w;
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi as u32;
        self.pot[lo] = d;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        0
    }
}

/// Merges checks across erased slots of one sector. `erased` is indexed by sector-local slot.
pub fn merge_supercells(sec: &SectorGraph, erased: &[bool]) -> Result<SupercellGraph, LogicalErasure> {
    let mut dsu = ParityDsu::new(sec.n_checks());
    let mut lost = 0u8;
    for (s, slot) in sec.slots.iter().enumerate() {
        if erased[s] {
            lost |= dsu.union(slot.checks[0] as usize, slot.checks[1] as usize, sec.logical_mask[s]);
        }
    }
    if lost != 0 {
        return Err(LogicalErasure { logicals: lost });
    }
    let mut root = Vec::with_capacity(sec.n_checks());
    let mut potential = Vec::with_capacity(sec.n_checks());
    for c in 0..sec.n_checks() {
        let (r, p) = dsu.find(c);
        root.push(r as u32);
        potential.push(p);
    }
    Ok(SupercellGraph { root, potential, erased: erased.to_vec() })
}

/// Indices of a minimum-total-distance perfect matching of defects.
/// `dist[i][j]` is `u32::MAX` for unreachable pairs.
pub fn match_defects(dist: &[Vec<u32>]) -> Result<Vec<(usize, usize)>, DecodeError> {
    let n = dist.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 2 {
        return if dist[0][1] == u32::MAX { Err(DecodeError::OddComponent(0)) } else { Ok(vec![(0, 1)]) };
    }
    let max_d = dist.iter().flatten().filter(|&&d| d != u32::MAX).copied().max().unwrap_or(0);
    let big = i32::try_from(max_d).expect("distance fits in i32") + 1;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] != u32::MAX {
                edges.push((i, j, big - dist[i][j] as i32));
            }
        }
    }
    let mate = mwmatching::Matching::new(edges).max_cardinality().solve();
    let mut pairs = Vec::with_capacity(n / 2);
    for i in 0..n {
        match mate.get(i).copied() {
            Some(j) if j != mwmatching::SENTINEL => {
                if i < j {
                    pairs.push((i, j));
                }
            }
            _ => return Err(DecodeError::OddComponent(i)),
        }
    }
    Ok(pairs)
}

/// Outcome of decoding one sector.
#[derive(Clone, Debug, Serialize)]
pub struct SectorDecode {
    pub verdict: Verdict,
    /// Unsatisfied supercells, by root check.
    pub defects: Vec<usize>,
    /// Sector-local slots flipped by the correction.
    pub correction: Vec<u32>,
    /// Logicals erased or flipped, as a bitmask.
    pub logicals: u8,
}

/// Per-sector decoding scratch over a shared syndrome graph.
pub struct Decoder<'g> {
    graph: &'g SyndromeGraph,
    adjacency: [Vec<Vec<u32>>; 2],
    dist: Vec<u32>,
    pred: Vec<u32>,
    done: Vec<bool>,
}

impl<'g> Decoder<'g> {
    pub fn new(graph: &'g SyndromeGraph) -> Self {
        let adjacency = [0, 1].map(|k| {
            let sec = &graph.sectors[k];
            let mut adj = vec![Vec::new(); sec.n_checks()];
            for (s, slot) in sec.slots.iter().enumerate() {
                for c in slot.checks {
                    adj[c as usize].push(s as u32);
                }
            }
            adj
        });
        Self { graph, adjacency, dist: Vec::new(), pred: Vec::new(), done: Vec::new() }
    }

    pub fn graph(&self) -> &'g SyndromeGraph {
        self.graph
    }

    /// Decodes both sectors; the trial fails if either does.
    pub fn decode(&mut self, a: &OutcomeAssignment) -> Result<Verdict, DecodeError> {
        let v0 = self.decode_sector(0, a)?.verdict;
        let v1 = self.decode_sector(1, a)?.verdict;
        Ok(v0.combine(v1))
    }

    pub fn decode_sector(&mut self, k: usize, a: &OutcomeAssignment) -> Result<SectorDecode, DecodeError> {
        let graph = self.graph;
        if a.len() != graph.n_slots() {
            return Err(DecodeError::LengthMismatch { got: a.len(), expected: graph.n_slots() });
        }
        let sec = &graph.sectors[k];
        let erased: Vec<bool> = sec.slots.iter().map(|s| a.erased[s.slot]).collect();
        let sc = match merge_supercells(sec, &erased) {
            Ok(sc) => sc,
            Err(e) => return Ok(SectorDecode { verdict: Verdict::LogicalErasure, defects: Vec::new(), correction: Vec::new(), logicals: e.logicals }),
        };
        let flipped: Vec<u32> = (0..sec.n_slots() as u32).filter(|&s| a.flipped[sec.slots[s as usize].slot] && !erased[s as usize]).collect();
        let correction = self.decode_with(k, &sc, &flipped)?;
        let defects = defects_of(&sc, sec, &flipped);
        let logicals = adjudicate(sec, &sc, &correction, &flipped);
        Ok(SectorDecode { verdict: if logicals == 0 { Verdict::Success } else { Verdict::LogicalError }, defects, correction, logicals })
    }

    /// Matching correction on a merged sector for the given surviving flips.
    pub fn decode_with(&mut self, k: usize, sc: &SupercellGraph, flipped: &[u32]) -> Result<Vec<u32>, DecodeError> {
        let sec = &self.graph.sectors[k];
        let defects = defects_of(sc, sec, flipped);
        self.mwpm_decode(k, sc, &defects)
    }

    /// Pairs defects (supercell roots) along shortest surviving paths and returns the
    /// flipped slots, each at most once.
    pub fn mwpm_decode(&mut self, k: usize, sc: &SupercellGraph, defects: &[usize]) -> Result<Vec<u32>, DecodeError> {
        let n = defects.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        let sec = &self.graph.sectors[k];
        let nc = sec.n_checks();
        let mut index_of = vec![u32::MAX; nc];
        for (i, &d) in defects.iter().enumerate() {
            index_of[d] = i as u32;
        }
        self.dist.resize(n * nc, u32::MAX);
        self.pred.resize(n * nc, u32::MAX);
        self.done.resize(nc, false);
        let mut dm = vec![vec![u32::MAX; n]; n];
        for (i, &src) in defects.iter().enumerate() {
            let (dist, pred) = (&mut self.dist[i * nc..(i + 1) * nc], &mut self.pred[i * nc..(i + 1) * nc]);
            dist.fill(u32::MAX);
            pred.fill(u32::MAX);
            let mut remaining = n - 1;
            let mut queue = VecDeque::from([src]);
            dist[src] = 0;
            let done = &mut self.done;
            done.fill(false);
            while let Some(c) = queue.pop_front() {
                if done[c] {
                    continue;
                }
                done[c] = true;
                let r = sc.root(c);
                if r == c && index_of[r] != u32::MAX && r != src {
                    dm[i][index_of[r] as usize] = dist[c];
                    remaining -= 1;
                    if remaining == 0 {
                        break;
                    }
                }
                for &s in &self.adjacency[k][c] {
                    let slot = &sec.slots[s as usize];
                    let o = if slot.checks[0] as usize == c { slot.checks[1] } else { slot.checks[0] } as usize;
                    let w = u32::from(!sc.is_erased(s as usize));
                    let nd = dist[c] + w;
                    if nd < dist[o] {
                        dist[o] = nd;
                        pred[o] = s;
                        if w == 0 {
                            queue.push_front(o);
                        } else {
                            queue.push_back(o);
                        }
                    }
                }
            }
        }
        let pairs = match_defects(&dm)?;
        let mut on = vec![false; sec.n_slots()];
        for (i, j) in pairs {
            let pred = &self.pred[i * nc..(i + 1) * nc];
            let mut c = defects[j];
            while c != defects[i] {
                let s = pred[c] as usize;
                if !sc.is_erased(s) {
                    on[s] ^= true;
                }
                let [a, b] = sec.slots[s].checks;
                c = if a as usize == c { b } else { a } as usize;
            }
        }
        Ok((0..sec.n_slots() as u32).filter(|&s| on[s as usize]).collect())
    }

    /// JSON record of one sector's decoding for failure triage.
    pub fn dump(&mut self, k: usize, a: &OutcomeAssignment) -> Result<String, DecodeError> {
        #[derive(Serialize)]
        struct Dump<'a> {
            sector: usize,
            erased: Vec<u32>,
            flipped: Vec<u32>,
            #[serde(flatten)]
            decode: &'a SectorDecode,
        }
        let d = self.decode_sector(k, a)?;
        let sec = &self.graph.sectors[k];
        let pick = |v: &[bool]| (0..sec.n_slots() as u32).filter(|&s| v[sec.slots[s as usize].slot]).collect();
        Ok(serde_json::to_string(&Dump { sector: k, erased: pick(&a.erased), flipped: pick(&a.flipped), decode: &d }).expect("serializable"))
    }
}

fn defects_of(sc: &SupercellGraph, sec: &SectorGraph, flipped: &[u32]) -> Vec<usize> {
    let syn = sc.syndrome(sec, flipped);
    (0..syn.len()).filter(|&c| syn[c]).collect()
}

/// Bitmask of rerouted logicals flipped by `correction XOR error`; zero means success.
/// Erased slots are ignored in both inputs.
pub fn adjudicate(sec: &SectorGraph, sc: &SupercellGraph, correction: &[u32], error: &[u32]) -> u8 {
    let mut on = vec![false; sec.n_slots()];
    for &s in correction.iter().chain(error) {
        if !sc.is_erased(s as usize) {
            on[s as usize] ^= true;
        }
    }
    sc.logical_parity(sec, (0..sec.n_slots()).filter(|&s| on[s]))
}
