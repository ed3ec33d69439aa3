use std::collections::VecDeque;

use serde::Serialize;

use super::honeycomb::Colour;
use super::network::{layer_colour, FusionNetwork, ROUND};
use crate::gf2::{BitMatrix, BitVec};

/// Which outcome of a fusion a slot holds. `Xx` is the outcome kept on fusion failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SlotKind {
    #[serde(rename = "XX")]
    Xx,
    #[serde(rename = "ZZ")]
    Zz,
}

impl SlotKind {
    pub fn index(self) -> usize {
        match self {
            SlotKind::Xx => 0,
            SlotKind::Zz => 1,
        }
    }
}

/// Homology direction of a logical cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    Y,
    Time,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::X, Direction::Y, Direction::Time];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Global slot id of one outcome of a network fusion.
pub fn slot_id(fusion: usize, kind: SlotKind) -> usize {
    2 * fusion + kind.index()
}

/// Check `Q(P, t)` for a plaquette `P` whose colour is fused at layer `t + 1`: the `XX`
/// outcomes of the boundary fusions of `P` at layers `t` and `t + 2` and the `ZZ`
/// outcomes at layers `t − 1` and `t + 3`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub plaquette: usize,
    pub layer: usize,
    /// Sector-local slot ids, six `XX` then six `ZZ`.
    pub slots: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorSlot {
    pub slot: usize,
    pub fusion: usize,
    pub kind: SlotKind,
    /// Sector-local check ids.
    pub checks: [u32; 2],
    /// Whether the slot crosses the torus seam in each direction.
    pub wrap: [bool; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct LogicalOperator {
    pub direction: Direction,
    pub slots: Vec<u32>,
}

/// One of the two decoupled syndrome graphs: checks are vertices, slots are edges.
#[derive(Clone, Debug, Serialize)]
pub struct SectorGraph {
    pub checks: Vec<Check>,
    pub slots: Vec<SectorSlot>,
    pub logicals: Vec<LogicalOperator>,
    /// `logical_mask[s]` has bit `k` set when slot `s` lies in logical `k`.
    #[serde(skip)]
    pub logical_mask: Vec<u8>,
}

impl SectorGraph {
    pub fn n_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    /// Check incidence as a matrix over sector slots.
    pub fn check_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.n_slots(), self.checks.iter().map(|c| BitVec::from_indices(self.n_slots(), c.slots.iter().map(|&s| s as usize))).collect())
    }

    /// Parity of each check for a set of flipped slots.
    pub fn syndrome(&self, flipped: &[u32]) -> Vec<bool> {
        let mut s = vec![false; self.n_checks()];
        for &e in flipped {
            for c in self.slots[e as usize].checks {
                s[c as usize] ^= true;
            }
        }
        s
    }

    /// Bitmask of the logicals that a slot set crosses an odd number of times.
    pub fn logical_parity(&self, slots: &[u32]) -> u8 {
        slots.iter().fold(0, |m, &s| m ^ self.logical_mask[s as usize])
    }

    /// A shortest closed loop of slots through check 0 winding once around `dir`.
    pub fn winding_cycle(&self, dir: Direction) -> Option<Vec<u32>> {
        self.winding_cycle_from(0, dir)
    }

    /// A shortest closed loop through `start` winding once around `dir`, found by
    /// breadth-first search in the cover that tracks winding parities.
    pub fn winding_cycle_from(&self, start: usize, dir: Direction) -> Option<Vec<u32>> {
        let n = self.n_checks();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (s, slot) in self.slots.iter().enumerate() {
            for c in slot.checks {
                adj[c as usize].push(s as u32);
            }
        }
        let key = |c: usize, w: usize| c * 8 + w;
        let mut prev: Vec<Option<(usize, u32)>> = vec![None; n * 8];
        let mut seen = vec![false; n * 8];
        seen[key(start, 0)] = true;
        let mut queue = VecDeque::from([(start, 0usize)]);
        let goal = key(start, 1 << dir.index());
        while let Some((c, w)) = queue.pop_front() {
            if key(c, w) == goal {
                break;
            }
            for &s in &adj[c] {
                let slot = &self.slots[s as usize];
                let other = if slot.checks[0] as usize == c { slot.checks[1] } else { slot.checks[0] } as usize;
                let mut w2 = w;
                for d in 0..3 {
                    if slot.wrap[d] {
                        w2 ^= 1 << d;
                    }
                }
                if !seen[key(other, w2)] {
                    seen[key(other, w2)] = true;
                    prev[key(other, w2)] = Some((key(c, w), s));
                    queue.push_back((other, w2));
                }
            }
        }
        if !seen[goal] {
            return None;
        }
        let mut path = Vec::new();
        let mut k = goal;
        while let Some((p, s)) = prev[k] {
            path.push(s);
            k = p;
        }
        Some(path)
    }
}

/// Primal (even-layer checks) and dual (odd-layer checks) syndrome graphs.
#[derive(Clone, Debug, Serialize)]
pub struct SyndromeGraph {
    pub l: usize,
    pub layers: usize,
    pub sectors: [SectorGraph; 2],
    /// Sector and local id of each global slot.
    #[serde(skip)]
    pub slot_location: Vec<(u8, u32)>,
}

impl SyndromeGraph {
    pub fn n_slots(&self) -> usize {
        self.slot_location.len()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct SlotJson {
            id: usize,
            slot: usize,
            fusion: usize,
            kind: SlotKind,
            checks: [u32; 2],
            logicals: Vec<usize>,
        }
        #[derive(Serialize)]
        struct CheckJson<'a> {
            id: usize,
            plaquette: usize,
            layer: usize,
            slots: &'a [u32],
        }
        #[derive(Serialize)]
        struct SectorJson<'a> {
            name: &'static str,
            checks: Vec<CheckJson<'a>>,
            slots: Vec<SlotJson>,
            logicals: &'a [LogicalOperator],
        }
        #[derive(Serialize)]
        struct GraphJson<'a> {
            l: usize,
            layers: usize,
            sectors: Vec<SectorJson<'a>>,
        }
        let sectors = self
            .sectors
            .iter()
            .zip(["primal", "dual"])
            .map(|(sec, name)| SectorJson {
                name,
                checks: sec.checks.iter().enumerate().map(|(id, c)| CheckJson { id, plaquette: c.plaquette, layer: c.layer, slots: &c.slots }).collect(),
                slots: sec
                    .slots
                    .iter()
                    .enumerate()
                    .map(|(id, s)| SlotJson {
                        id,
                        slot: s.slot,
                        fusion: s.fusion,
                        kind: s.kind,
                        checks: s.checks,
                        logicals: (0..sec.logicals.len()).filter(|k| sec.logical_mask[id] >> k & 1 == 1).collect(),
                    })
                    .collect(),
                logicals: &sec.logicals,
            })
            .collect();
        serde_json::to_string(&GraphJson { l: self.l, layers: self.layers, sectors }).expect("serializable")
    }
}

/// Sector of check `Q(P, t)`.
pub fn check_sector(t: usize) -> usize {
    t % 2
}

/// Sector of a slot: `XX` at layer `t` goes to `t mod 2`, `ZZ` to the other.
pub fn slot_sector(layer: usize, kind: SlotKind) -> usize {
    match kind {
        SlotKind::Xx => layer % 2,
        SlotKind::Zz => (layer + 1) % 2,
    }
}

/// Layer offsets of the `XX` and `ZZ` outcomes of `Q(P, t)` relative to `t`.
const XX_OFFSETS: [i64; 2] = [0, 2];
const ZZ_OFFSETS: [i64; 2] = [-1, 3];

pub fn derive_syndrome_graph(net: &FusionNetwork) -> SyndromeGraph {
    let hc = net.honeycomb();
    let t_max = net.layers() as i64;
    let n_slots = 2 * net.fusions().len();
    let mut slot_location = vec![(u8::MAX, u32::MAX); n_slots];
    let mut sectors: Vec<SectorGraph> = (0..2).map(|_| SectorGraph { checks: Vec::new(), slots: Vec::new(), logicals: Vec::new(), logical_mask: Vec::new() }).collect();
    // First claim of each slot: (check, time winding of that check seen from the slot).
    let mut first: Vec<Option<(u32, bool)>> = vec![None; n_slots];

    for t in 0..net.layers() {
        let sector = check_sector(t);
        for (p, pl) in hc.plaquettes().iter().enumerate() {
            if layer_colour(t + 1) != pl.colour {
                continue;
            }
            let check_id = sectors[sector].checks.len() as u32;
            let mut slots = Vec::with_capacity(12);
            for (kind, offsets) in [(SlotKind::Xx, XX_OFFSETS), (SlotKind::Zz, ZZ_OFFSETS)] {
                for o in offsets {
                    let unwrapped = t as i64 + o;
                    let layer = unwrapped.rem_euclid(t_max) as usize;
                    let winds = unwrapped.div_euclid(t_max) != 0;
                    let colour: Colour = layer_colour(layer);
                    for &e in pl.boundary.iter().filter(|&&e| hc.edges()[e].colour == colour) {
                        let f = net.fusion_at(layer, e).expect("boundary edge of the layer colour is fused");
                        let g = slot_id(f, kind);
                        debug_assert_eq!(slot_sector(layer, kind), sector);
                        let local = match first[g] {
                            None => {
                                let local = sectors[sector].slots.len() as u32;
                                let w = hc.edges()[e].wrap;
                                sectors[sector].slots.push(SectorSlot { slot: g, fusion: f, kind, checks: [check_id, u32::MAX], wrap: [w[0] % 2 != 0, w[1] % 2 != 0, winds] });
                                slot_location[g] = (sector as u8, local);
                                first[g] = Some((check_id, winds));
                                local
                            }
                            Some(_) => {
                                let (_, local) = slot_location[g];
                                let s = &mut sectors[sector].slots[local as usize];
                                assert_eq!(s.checks[1], u32::MAX, "slot {g} in more than two checks");
                                s.checks[1] = check_id;
                                s.wrap[2] ^= winds;
                                local
                            }
                        };
                        slots.push(local);
                    }
                }
            }
            sectors[sector].checks.push(Check { plaquette: p, layer: t, slots });
        }
    }
    for sec in &mut sectors {
        sec.logical_mask = vec![0; sec.slots.len()];
        let checks = sec.check_matrix();
        let mut span = checks.clone();
        let mut rank = checks.rank();
        for dir in Direction::ALL {
            let slots: Vec<u32> = (0..sec.slots.len() as u32).filter(|&s| sec.slots[s as usize].wrap[dir.index()]).collect();
            span.push_row(BitVec::from_indices(sec.slots.len(), slots.iter().map(|&s| s as usize)));
            let r = span.rank();
            if r > rank {
                rank = r;
                let k = sec.logicals.len();
                for &s in &slots {
                    sec.logical_mask[s as usize] |= 1 << k;
                }
                sec.logicals.push(LogicalOperator { direction: dir, slots });
            } else {
                span = BitMatrix::from_rows(span.ncols(), span.rows()[..span.nrows() - 1].to_vec());
            }
        }
    }
    let [a, b]: [SectorGraph; 2] = sectors.try_into().ok().expect("two sectors");
    debug_assert!(net.layers() % ROUND == 0);
    SyndromeGraph { l: net.l(), layers: net.layers(), sectors: [a, b], slot_location }
}
