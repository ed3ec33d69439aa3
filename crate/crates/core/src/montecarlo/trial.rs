use rand::Rng;
use serde::Serialize;

use super::config::{NoiseConfig, NoiseModel};
use super::MonteCarloError;
use crate::decoder::{Decoder, OutcomeAssignment, Verdict};
use crate::emitter::{block_photon_errors, SpinNoiseParams};
use crate::fusion::{EncodedEvent, EncodedFusionOutcome, EncodedFusionSampler, Strategy};
use crate::lattice::{build_sffcc_network, derive_syndrome_graph, slot_id, FusionNetwork, SlotKind, SyndromeGraph};
use crate::pauli_algebra::Pauli1;

/// Network and syndrome graph of one lattice size, shared by all trials.
#[derive(Debug)]
pub struct LatticeContext {
    pub network: FusionNetwork,
    pub graph: SyndromeGraph,
    /// For each fusion, the fusions of its two chains on the previous layer (wrapping in time).
    prev: Vec<[usize; 2]>,
}

impl LatticeContext {
    pub fn new(l: usize) -> Result<Self, MonteCarloError> {
        let network = build_sffcc_network(l).map_err(|e| MonteCarloError::Invalid(e.to_string()))?;
        let graph = derive_syndrome_graph(&network);
        let mut fusion_of = vec![0usize; network.n_qubits()];
        for (i, f) in network.fusions().iter().enumerate() {
            fusion_of[f.a] = i;
            fusion_of[f.b] = i;
        }
        let t_max = network.layers();
        let prev = network
            .fusions()
            .iter()
            .map(|f| {
                [f.a, f.b].map(|q| {
                    let (t, v) = network.qubit_position(q);
                    fusion_of[network.qubit((t + t_max - 1) % t_max, v)]
                })
            })
            .collect();
        Ok(LatticeContext { network, graph, prev })
    }

    pub fn l(&self) -> usize {
        self.network.l()
    }

    /// Previous-layer fusions of the two chains meeting in fusion `f`.
    pub fn previous_fusions(&self, f: usize) -> [usize; 2] {
        self.prev[f]
    }
}

/// Fusion samplers for one point of the physical model.
#[derive(Clone, Debug)]
pub struct PhysicalSampler {
    main: EncodedFusionSampler,
    boost: Option<EncodedFusionSampler>,
    spin: SpinNoiseParams,
}

impl PhysicalSampler {
    pub fn new(noise: &NoiseConfig) -> Result<Self, MonteCarloError> {
        let NoiseModel::Physical { spin, strategy, .. } = noise.model else {
            return Err(MonteCarloError::Invalid("not a physical noise model".into()));
        };
        let params = noise.channel().expect("physical");
        let err = |e: crate::fusion::FusionError| MonteCarloError::Invalid(e.to_string());
        let main = EncodedFusionSampler::new(strategy.fusion_strategy(), params).map_err(err)?;
        let boost = strategy.reinit_attempts().map(|n| EncodedFusionSampler::new(Strategy::rus(n), params)).transpose().map_err(err)?;
        Ok(PhysicalSampler { main, boost, spin })
    }

    pub fn main(&self) -> &EncodedFusionSampler {
        &self.main
    }

    pub fn boost(&self) -> Option<&EncodedFusionSampler> {
        self.boost.as_ref()
    }
}

/// Per-trial record of the physical sampling, for instrumentation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhysicalRecord {
    pub events: Vec<Option<EncodedEvent>>,
    pub boosted: Vec<bool>,
}

/// Whether the fusion at a layer past the first is re-initialized: both chains recovered only
/// `ZZ` at the previous layer and the current fusion did not recover both operators.
pub fn reinit_triggered(layer: usize, previous: [EncodedEvent; 2], current: EncodedEvent) -> bool {
    layer > 0 && previous.iter().all(|&e| e == EncodedEvent::ZzOnly) && current != EncodedEvent::BothRecovered
}

/// Applies the re-initialization rule to one fusion: if triggered, the outcome is replaced by a
/// fresh boosted fusion. Returns the outcome in force and whether it was boosted.
pub fn apply_reinit_rule<R: Rng + ?Sized>(
    layer: usize,
    previous: [EncodedEvent; 2],
    current: EncodedFusionOutcome,
    boost: &EncodedFusionSampler,
    photon_errors: Option<(&[Pauli1], &[Pauli1])>,
    rng: &mut R,
) -> (EncodedFusionOutcome, bool) {
    if reinit_triggered(layer, previous, current.event) {
        (boost.sample_with_errors(photon_errors, rng), true)
    } else {
        (current, false)
    }
}

fn spin_block<R: Rng + ?Sized>(spin: &SpinNoiseParams, n: usize, carry_z: bool, slots: &mut Vec<Pauli1>, rng: &mut R) -> Vec<Pauli1> {
    slots.clear();
    slots.extend((0..n).map(|_| spin.sample(rng)));
    let (mut block, _) = block_photon_errors(slots);
    if carry_z {
        block[0] = block[0].compose(Pauli1::Z);
    }
    block
}

fn write_fusion(out: &mut OutcomeAssignment, f: usize, o: &EncodedFusionOutcome) {
    let (x, z) = (slot_id(f, SlotKind::Xx), slot_id(f, SlotKind::Zz));
    out.erased[x] = !o.event.has_xx();
    out.flipped[x] = o.event.has_xx() && o.xx_flipped;
    out.erased[z] = !o.event.has_zz();
    out.flipped[z] = o.event.has_zz() && o.zz_flipped;
}

/// Samples every fusion of the network layer by layer.
///
/// Spin noise runs along each chain: every encoded qubit is generated in full as a block of
/// `max_attempts` photons with errors from [`block_photon_errors`], whether or not a RUS
/// fusion uses all of them. An `X` left on the spin at the end of the block reaches the first
/// photon of the chain's next qubit as `Z`. Chains start unflipped at layer 0. A re-initialized fusion is resampled with fresh
/// photons.
pub fn sample_physical<R: Rng + ?Sized>(ctx: &LatticeContext, sampler: &PhysicalSampler, rng: &mut R, out: &mut OutcomeAssignment, record: Option<&mut PhysicalRecord>) {
    let net = &ctx.network;
    let fusions = net.fusions();
    let noisy = !sampler.spin.is_noiseless();
    let mut events = vec![EncodedEvent::Erasure; fusions.len()];
    let mut boosted = record.as_ref().map(|_| vec![false; fusions.len()]);
    let mut carry = vec![false; net.n_chains()];
    let mut slots = Vec::new();
    let attempts = sampler.main.strategy().max_attempts();
    let boost_attempts = sampler.boost.as_ref().map_or(0, |b| b.strategy().max_attempts());
    for (f, fu) in fusions.iter().enumerate() {
        let (va, vb) = (net.qubit_position(fu.a).1, net.qubit_position(fu.b).1);
        let (mut o, mut errs) = if noisy {
            let ea = spin_block(&sampler.spin, attempts, carry[va], &mut slots, rng);
            let eb = spin_block(&sampler.spin, attempts, carry[vb], &mut slots, rng);
            (sampler.main.sample_with_errors(Some((&ea, &eb)), rng), Some((ea, eb)))
        } else {
            (sampler.main.sample(rng), None)
        };
        if let Some(boost) = &sampler.boost {
            let [pa, pb] = ctx.prev[f];
            if reinit_triggered(fu.layer, [events[pa], events[pb]], o.event) {
                let fresh = noisy.then(|| {
                    let ea = spin_block(&sampler.spin, boost_attempts, false, &mut slots, rng);
                    let eb = spin_block(&sampler.spin, boost_attempts, false, &mut slots, rng);
                    (ea, eb)
                });
                o = boost.sample_with_errors(fresh.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice())), rng);
                errs = fresh;
                if let Some(b) = boosted.as_mut() {
                    b[f] = true;
                }
            }
        }
        if let Some((ea, eb)) = &errs {
            carry[va] = ea.last().is_some_and(|p| p.has_x());
            carry[vb] = eb.last().is_some_and(|p| p.has_x());
        }
        events[f] = o.event;
        write_fusion(out, f, &o);
    }
    if let Some(r) = record {
        r.events = events.into_iter().map(Some).collect();
        r.boosted = boosted.unwrap_or_default();
    }
}

/// Independent erasure and flip of every outcome slot.
pub fn sample_phenomenological<R: Rng + ?Sized>(p_err: f64, p_eras: f64, rng: &mut R, out: &mut OutcomeAssignment) {
    for (e, f) in out.erased.iter_mut().zip(out.flipped.iter_mut()) {
        *e = rng.random_bool(p_eras);
        *f = !*e && rng.random_bool(p_err);
    }
}

/// Prepared sampler for one sweep point.
#[derive(Clone, Debug)]
pub enum PointSampler {
    Phenomenological { p_err: f64, p_eras: f64 },
    Physical(PhysicalSampler),
}

impl PointSampler {
    pub fn new(noise: &NoiseConfig) -> Result<Self, MonteCarloError> {
        noise.validate()?;
        Ok(match noise.model {
            NoiseModel::Phenomenological { p_err, p_eras } => PointSampler::Phenomenological { p_err, p_eras },
            NoiseModel::Physical { .. } => PointSampler::Physical(PhysicalSampler::new(noise)?),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, ctx: &LatticeContext, rng: &mut R, out: &mut OutcomeAssignment) {
        match self {
            PointSampler::Phenomenological { p_err, p_eras } => sample_phenomenological(*p_err, *p_eras, rng, out),
            PointSampler::Physical(s) => sample_physical(ctx, s, rng, out, None),
        }
    }
}

/// One full trial: sample outcomes, decode both sectors and adjudicate.
pub fn run_trial<R: Rng + ?Sized>(ctx: &LatticeContext, sampler: &PointSampler, decoder: &mut Decoder<'_>, scratch: &mut OutcomeAssignment, rng: &mut R) -> Verdict {
    sampler.sample(ctx, rng, scratch);
    decoder.decode(scratch).expect("outcome slots match the graph")
}
