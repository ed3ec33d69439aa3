//! Physical type-II fusion outcomes and the REP / RUS encoded fusions built from them.
//!
//! A physical (rotated) fusion has five outcomes: success, success with the `XX`
//! half erased by distinguishability, failure that still yields `XX`, failure with
//! `XX` erased, and loss of a photon. Encoded fusions combine `m` (REP) or up to `N`
//! (RUS) physical fusions into `X̄X̄` and `Z̄Z̄` outcomes.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli_algebra::Pauli1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FusionError {
    #[error("parameter {0} = {1} outside [0, 1]")]
    OutOfRange(&'static str, f64),
    #[error("attempt count must be at least 1")]
    ZeroAttempts,
    #[error("no attempt count for an erased fusion")]
    Erased,
    #[error("need {needed} photons per side, got {got}")]
    InsufficientPhotons { needed: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionChannelParams {
    /// End-to-end efficiency per photon.
    pub eta: f64,
    /// HOM visibility between photons of different emitters.
    pub v: f64,
    pub p_fail: f64,
    /// Flip probability of a physical `ZZ` outcome.
    pub p_x: f64,
    /// Flip probability of a physical `XX` outcome.
    pub p_z: f64,
}

impl FusionChannelParams {
    pub fn new(eta: f64, v: f64, p_fail: f64, p_x: f64, p_z: f64) -> Result<Self, FusionError> {
        for (name, x) in [("eta", eta), ("V", v), ("P_fail", p_fail), ("p_x", p_x), ("p_z", p_z)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(FusionError::OutOfRange(name, x));
            }
        }
        Ok(FusionChannelParams { eta, v, p_fail, p_x, p_z })
    }

    /// Unboosted linear optics with efficiency `eta` and visibility `v`, no outcome flips.
    pub fn linear_optics(eta: f64, v: f64) -> Result<Self, FusionError> {
        Self::new(eta, v, 0.5, 0.0, 0.0)
    }

    /// `ZZ` flip probability on a successful physical fusion from distinguishability, `(1 − V)/2`.
    pub fn distinguishability_flip(&self) -> f64 {
        (1.0 - self.v) / 2.0
    }

    /// `ZZ` flip probability of a successful physical fusion, combining `p_x` and distinguishability.
    pub fn success_zz_flip(&self) -> f64 {
        xor_prob(self.p_x, self.distinguishability_flip())
    }
}

/// Probability that exactly one of two independent events happens.
pub fn xor_prob(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Probability of an odd number of successes in `n` Bernoulli(`p`) trials.
pub fn odd_parity_prob(n: usize, p: f64) -> f64 {
    0.5 * (1.0 - (1.0 - 2.0 * p).powi(n as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhysicalOutcome {
    Success,
    SuccessXxErased,
    Failure,
    FailureXxErased,
    Loss,
}

impl PhysicalOutcome {
    pub const ALL: [PhysicalOutcome; 5] =
        [PhysicalOutcome::Success, PhysicalOutcome::SuccessXxErased, PhysicalOutcome::Failure, PhysicalOutcome::FailureXxErased, PhysicalOutcome::Loss];

    pub fn has_xx(self) -> bool {
        matches!(self, PhysicalOutcome::Success | PhysicalOutcome::Failure)
    }

    pub fn has_zz(self) -> bool {
        matches!(self, PhysicalOutcome::Success | PhysicalOutcome::SuccessXxErased)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalOutcomeDist {
    pub p_s: f64,
    pub p_s_ex: f64,
    pub p_f: f64,
    pub p_f_ex: f64,
    pub p_l: f64,
}

impl PhysicalOutcomeDist {
    pub fn probs(&self) -> [f64; 5] {
        [self.p_s, self.p_s_ex, self.p_f, self.p_f_ex, self.p_l]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhysicalOutcome {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (o, p) in PhysicalOutcome::ALL.iter().zip(self.probs()) {
            acc += p;
            if u < acc {
                return *o;
            }
        }
        PhysicalOutcome::Loss
    }
}

pub fn physical_outcome_dist(params: &FusionChannelParams) -> PhysicalOutcomeDist {
    let e2 = params.eta * params.eta;
    let (pz, pz_e) = (1.0 - params.p_fail, params.p_fail);
    let px_e = (1.0 - params.v) / 4.0;
    let px = 1.0 - px_e;
    PhysicalOutcomeDist { p_s: e2 * pz * px, p_s_ex: e2 * pz * px_e, p_f: e2 * pz_e * px, p_f_ex: e2 * pz_e * px_e, p_l: 1.0 - e2 }
}

/// Treatment of an even split of good and flipped `ZZ` outcomes in REP majority voting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// No confidence in `Z̄Z̄`: mark it erased.
    #[default]
    Erase,
    /// Count the tie as a flipped `Z̄Z̄`.
    Flip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Rep { m: usize, tie: TieRule },
    Rus { n: usize },
}

impl Strategy {
    pub fn rep(m: usize) -> Self {
        Strategy::Rep { m, tie: TieRule::Erase }
    }

    pub fn rus(n: usize) -> Self {
        Strategy::Rus { n }
    }

    /// Largest number of physical fusions per encoded fusion.
    pub fn max_attempts(&self) -> usize {
        match *self {
            Strategy::Rep { m, .. } => m,
            Strategy::Rus { n } => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodedEvent {
    BothRecovered,
    XxOnly,
    ZzOnly,
    Erasure,
}

impl EncodedEvent {
    pub const ALL: [EncodedEvent; 4] = [EncodedEvent::BothRecovered, EncodedEvent::XxOnly, EncodedEvent::ZzOnly, EncodedEvent::Erasure];

    pub fn has_xx(self) -> bool {
        matches!(self, EncodedEvent::BothRecovered | EncodedEvent::XxOnly)
    }

    pub fn has_zz(self) -> bool {
        matches!(self, EncodedEvent::BothRecovered | EncodedEvent::ZzOnly)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedFusionOutcome {
    pub event: EncodedEvent,
    pub attempts: usize,
    pub xx_flipped: bool,
    pub zz_flipped: bool,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_size(k: usize) -> Result<(), FusionError> {
    if k == 0 {
        Err(FusionError::ZeroAttempts)
    } else {
        Ok(())
    }
}

/// `(R_X̄X̄, R_Z̄Z̄) = ((P_s + P_f)^m, 1 − (1 − P_s − P_s^e)^m)`; every physical success yields `ZZ`.
pub fn rep_recovery_probs(m: usize, params: &FusionChannelParams) -> Result<(f64, f64), FusionError> {
    check_size(m)?;
    let d = physical_outcome_dist(params);
    Ok(((d.p_s + d.p_f).powi(m as i32), 1.0 - (1.0 - d.p_s - d.p_s_ex).powi(m as i32)))
}

/// Probability that majority voting over `t` outcomes with flip rate `q` is (flipped, tied).
fn majority(t: usize, q: f64) -> (f64, f64) {
    let mut flipped = 0.0;
    let mut tie = 0.0;
    for k in 0..=t {
        let p = binom(t, k) * q.powi(k as i32) * (1.0 - q).powi((t - k) as i32);
        if 2 * k > t {
            flipped += p;
        } else if 2 * k == t {
            tie += p;
        }
    }
    (flipped, tie)
}

/// Exact event distribution of REP(`m`), indexed by [`EncodedEvent::index`].
pub fn rep_event_probs(m: usize, tie: TieRule, params: &FusionChannelParams) -> Result<[f64; 4], FusionError> {
    check_size(m)?;
    let d = physical_outcome_dist(params);
    let q = params.success_zz_flip();
    let mut out = [0.0; 4];
    // a Success, b SuccessXxErased, c Failure, rest without either outcome.
    for a in 0..=m {
        for b in 0..=m - a {
            for c in 0..=m - a - b {
                let r = m - a - b - c;
                let w = binom(m, a) * binom(m - a, b) * binom(m - a - b, c)
                    * d.p_s.powi(a as i32)
                    * d.p_s_ex.powi(b as i32)
                    * d.p_f.powi(c as i32)
                    * (d.p_f_ex + d.p_l).powi(r as i32);
                if w == 0.0 {
                    continue;
                }
                let xx = b == 0 && r == 0;
                let t = a + b;
                let zz = if t == 0 {
                    0.0
                } else {
                    match tie {
                        TieRule::Flip => 1.0,
                        TieRule::Erase => 1.0 - majority(t, q).1,
                    }
                };
                let (with, without) = if xx { (EncodedEvent::BothRecovered, EncodedEvent::XxOnly) } else { (EncodedEvent::ZzOnly, EncodedEvent::Erasure) };
                out[with.index()] += w * zz;
                out[without.index()] += w * (1.0 - zz);
            }
        }
    }
    Ok(out)
}

/// Conditional flip rates `(E_X̄X̄, E_Z̄Z̄)` of REP(`m`) given each outcome was recovered.
pub fn rep_error_rates(m: usize, tie: TieRule, params: &FusionChannelParams) -> Result<(f64, f64), FusionError> {
    check_size(m)?;
    let d = physical_outcome_dist(params);
    let q = params.success_zz_flip();
    let e_xx = odd_parity_prob(m, params.p_z);
    let ps = d.p_s + d.p_s_ex;
    let (mut flipped, mut recovered) = (0.0, 0.0);
    for t in 1..=m {
        let w = binom(m, t) * ps.powi(t as i32) * (1.0 - ps).powi((m - t) as i32);
        let (f, t_) = majority(t, q);
        match tie {
            TieRule::Flip => {
                flipped += w * (f + t_);
                recovered += w;
            }
            TieRule::Erase => {
                flipped += w * f;
                recovered += w * (1.0 - t_);
            }
        }
    }
    Ok((e_xx, if recovered > 0.0 { flipped / recovered } else { 0.0 }))
}

/// `(P1, P2, P3, P4)` of RUS(`N`) in the three-outcome model (distinguishability ignored).
pub fn rus_event_probs(n: usize, params: &FusionChannelParams) -> Result<[f64; 4], FusionError> {
    check_size(n)?;
    let e2 = params.eta * params.eta;
    let (ps, pf, pl) = (e2 * (1.0 - params.p_fail), e2 * params.p_fail, 1.0 - e2);
    let p1 = ps * (0..n).map(|j| pf.powi(j as i32)).sum::<f64>();
    let p2 = pf.powi(n as i32);
    let mut p3 = 0.0;
    for j in 0..n.saturating_sub(1) {
        for k in 1..n - j {
            p3 += pf.powi(j as i32) * pl.powi(k as i32) * (1.0 - pl);
        }
    }
    let p4 = (0..n).map(|j| pf.powi(j as i32) * pl.powi((n - j) as i32)).sum::<f64>();
    Ok([p1, p2, p3, p4])
}

/// `(E_X̄X̄, E_Z̄Z̄)` of RUS(`N`). `X̄X̄` after `j` failures and a success is the product of
/// `j + 1` physical `XX` outcomes, after `N` failures of `N`.
pub fn rus_error_rates(n: usize, params: &FusionChannelParams) -> Result<(f64, f64), FusionError> {
    check_size(n)?;
    let d = physical_outcome_dist(params);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let w = d.p_f.powi(j as i32) * d.p_s;
        num += w * odd_parity_prob(j + 1, params.p_z);
        den += w;
    }
    let w = d.p_f.powi(n as i32);
    num += w * odd_parity_prob(n, params.p_z);
    den += w;
    Ok((if den > 0.0 { num / den } else { 0.0 }, params.p_x))
}

/// The `E_X̄X̄` sum exactly as printed, with exponent `j − 1 − k` on `(1 − p_Z)`. Kept to
/// show that it disagrees with enumeration; see [`rus_error_rates`].
pub fn rus_xx_error_as_printed(n: usize, params: &FusionChannelParams) -> f64 {
    let d = physical_outcome_dist(params);
    let pz = params.p_z;
    let mut num = 0.0;
    for j in 0..n {
        let inner: f64 = (1..=j + 1)
            .step_by(2)
            .map(|k| binom(j + 1, k) * pz.powi(k as i32) * (1.0 - pz).powi(j as i32 - 1 - k as i32))
            .sum();
        num += d.p_f.powi(j as i32) * d.p_s * inner;
    }
    num += d.p_f.powi(n as i32) * odd_parity_prob(n, pz);
    let r = d.p_s * (0..n).map(|j| d.p_f.powi(j as i32)).sum::<f64>() + d.p_f.powi(n as i32);
    num / r
}

/// Cumulative `(P^{X̄Z̄}_N, P^{X̄}_N, P^{Z̄}_N, P^{ē}_N)` of RUS(`N`) in the five-outcome model.
pub fn combined_rus_probs(n: usize, params: &FusionChannelParams) -> Result<[f64; 4], FusionError> {
    check_size(n)?;
    Ok(combined_rus_raw(n, &physical_outcome_dist(params)))
}

fn combined_rus_raw(n: usize, d: &PhysicalOutcomeDist) -> [f64; 4] {
    if n == 0 {
        return [0.0; 4];
    }
    let xz = d.p_s + d.p_s * (1..n).map(|i| d.p_f.powi(i as i32)).sum::<f64>();
    let x = d.p_f.powi(n as i32);
    let head = d.p_l + d.p_f_ex;
    let e = head * d.p_l.powi(n as i32 - 1) + head * (1..n).map(|i| d.p_f.powi(i as i32) * d.p_l.powi((n - 1 - i) as i32)).sum::<f64>();
    [xz, x, 1.0 - x - e - xz, e]
}

/// Probability that RUS stops exactly at attempt `i` (1-based) with the given event, for any cap `N ≥ i`.
/// `X̄X̄`-only has no such split and always uses all `N` attempts.
pub fn rus_stop_prob(event: EncodedEvent, i: usize, d: &PhysicalOutcomeDist) -> f64 {
    assert!(i >= 1);
    match event {
        EncodedEvent::BothRecovered => d.p_s * d.p_f.powi(i as i32 - 1),
        EncodedEvent::ZzOnly => {
            // j failures, then either a success with XX erased at attempt j + 1 = i, or an
            // XX-destroying event followed by losses and one detected biased fusion at i.
            let mut p = d.p_f.powi(i as i32 - 1) * d.p_s_ex;
            for j in 0..i.saturating_sub(1) {
                p += d.p_f.powi(j as i32) * (d.p_l + d.p_f_ex) * d.p_l.powi((i - j - 2) as i32) * (1.0 - d.p_l);
            }
            p
        }
        EncodedEvent::XxOnly | EncodedEvent::Erasure => 0.0,
    }
}

/// Attempt count of a recovered RUS(`N`) fusion, drawn from the truncated stopping distribution.
pub fn attempt_count_sample<R: Rng + ?Sized>(event: EncodedEvent, n: usize, params: &FusionChannelParams, rng: &mut R) -> Result<usize, FusionError> {
    check_size(n)?;
    match event {
        EncodedEvent::Erasure => Err(FusionError::Erased),
        EncodedEvent::XxOnly => Ok(n),
        _ => {
            let d = physical_outcome_dist(params);
            let w: Vec<f64> = (1..=n).map(|i| rus_stop_prob(event, i, &d)).collect();
            Ok(match WeightedIndex::new(&w) {
                Ok(dist) => dist.sample(rng) + 1,
                Err(_) => n,
            })
        }
    }
}

/// Outcome flips caused by photon errors on the two encoded qubits of a RUS fusion that used `m` attempts.
///
/// `Z̄Z̄` comes from the `m`-th physical fusion and flips with the `X` parity of the two
/// `m`-th photons; `X̄X̄` is the product over the first `m` pairs and flips with their
/// `Z` parity. Unrecovered outcomes never flip.
pub fn spin_flip_map(event: EncodedEvent, m: usize, a: &[Pauli1], b: &[Pauli1]) -> Result<(bool, bool), FusionError> {
    check_size(m)?;
    let got = a.len().min(b.len());
    if got < m {
        return Err(FusionError::InsufficientPhotons { needed: m, got });
    }
    let xx = event.has_xx() && a[..m].iter().chain(&b[..m]).filter(|p| p.has_z()).count() % 2 == 1;
    let zz = event.has_zz() && (a[m - 1].has_x() ^ b[m - 1].has_x());
    Ok((xx, zz))
}

/// Precomputed sampler for one strategy and channel.
#[derive(Clone, Debug)]
pub struct EncodedFusionSampler {
    strategy: Strategy,
    params: FusionChannelParams,
    dist: PhysicalOutcomeDist,
    rus: Option<RusTables>,
}

#[derive(Clone, Debug)]
struct RusTables {
    event: Option<WeightedIndex<f64>>,
    both: Option<WeightedIndex<f64>>,
    zz: Option<WeightedIndex<f64>>,
}

impl EncodedFusionSampler {
    pub fn new(strategy: Strategy, params: FusionChannelParams) -> Result<Self, FusionError> {
        check_size(strategy.max_attempts())?;
        let dist = physical_outcome_dist(&params);
        let rus = match strategy {
            Strategy::Rep { .. } => None,
            Strategy::Rus { n } => {
                let ev = combined_rus_raw(n, &dist).map(|p| p.max(0.0));
                let stop = |e| (1..=n).map(|i| rus_stop_prob(e, i, &dist)).collect::<Vec<f64>>();
                Some(RusTables {
                    event: WeightedIndex::new(ev).ok(),
                    both: WeightedIndex::new(stop(EncodedEvent::BothRecovered)).ok(),
                    zz: WeightedIndex::new(stop(EncodedEvent::ZzOnly)).ok(),
                })
            }
        };
        Ok(EncodedFusionSampler { strategy, params, dist, rus })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn params(&self) -> &FusionChannelParams {
        &self.params
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EncodedFusionOutcome {
        self.sample_with_errors(None, rng)
    }

    /// Samples one encoded fusion; `photon_errors` adds flips from photon Pauli errors on the
    /// two encoded qubits (at least `max_attempts` photons per side).
    pub fn sample_with_errors<R: Rng + ?Sized>(&self, photon_errors: Option<(&[Pauli1], &[Pauli1])>, rng: &mut R) -> EncodedFusionOutcome {
        match self.strategy {
            Strategy::Rep { m, tie } => self.sample_rep(m, tie, photon_errors, rng),
            Strategy::Rus { n } => self.sample_rus(n, photon_errors, rng),
        }
    }

    fn sample_rep<R: Rng + ?Sized>(&self, m: usize, tie: TieRule, errs: Option<(&[Pauli1], &[Pauli1])>, rng: &mut R) -> EncodedFusionOutcome {
        let q = self.params.success_zz_flip();
        let mut xx_ok = true;
        let mut xx_flip = false;
        let (mut good, mut bad) = (0usize, 0usize);
        for k in 0..m {
            let o = self.dist.sample(rng);
            let (ez, ex) = errs.map_or((false, false), |(a, b)| (a[k].has_z() ^ b[k].has_z(), a[k].has_x() ^ b[k].has_x()));
            if o.has_xx() {
                xx_flip ^= ez ^ rng.random_bool(self.params.p_z);
            } else {
                xx_ok = false;
            }
            if o.has_zz() {
                if ex ^ rng.random_bool(q) {
                    bad += 1;
                } else {
                    good += 1;
                }
            }
        }
        let zz_ok = good + bad > 0 && !(tie == TieRule::Erase && good == bad);
        let zz_flip = zz_ok && bad >= good;
        let event = match (xx_ok, zz_ok) {
            (true, true) => EncodedEvent::BothRecovered,
            (true, false) => EncodedEvent::XxOnly,
            (false, true) => EncodedEvent::ZzOnly,
            (false, false) => EncodedEvent::Erasure,
        };
        EncodedFusionOutcome { event, attempts: m, xx_flipped: xx_ok && xx_flip, zz_flipped: zz_flip }
    }

    fn sample_rus<R: Rng + ?Sized>(&self, n: usize, errs: Option<(&[Pauli1], &[Pauli1])>, rng: &mut R) -> EncodedFusionOutcome {
        let t = self.rus.as_ref().expect("RUS tables");
        let event = t.event.as_ref().map_or(EncodedEvent::Erasure, |d| EncodedEvent::ALL[d.sample(rng)]);
        let attempts = match event {
            EncodedEvent::BothRecovered => t.both.as_ref().map_or(n, |d| d.sample(rng) + 1),
            EncodedEvent::ZzOnly => t.zz.as_ref().map_or(n, |d| d.sample(rng) + 1),
            EncodedEvent::XxOnly => n,
            EncodedEvent::Erasure => return EncodedFusionOutcome { event, attempts: n, xx_flipped: false, zz_flipped: false },
        };
        let mut xx = event.has_xx() && rng.random_bool(odd_parity_prob(attempts, self.params.p_z));
        let zz_rate = if event == EncodedEvent::BothRecovered { self.params.success_zz_flip() } else { self.params.p_x };
        let mut zz = event.has_zz() && rng.random_bool(zz_rate);
        if let Some((a, b)) = errs {
            let (fx, fz) = spin_flip_map(event, attempts, a, b).expect("photon errors cover the attempts");
            xx ^= fx;
            zz ^= fz;
        }
        EncodedFusionOutcome { event, attempts, xx_flipped: xx, zz_flipped: zz }
    }
}

pub fn sample_encoded_fusion<R: Rng + ?Sized>(strategy: Strategy, params: &FusionChannelParams, rng: &mut R) -> Result<EncodedFusionOutcome, FusionError> {
    Ok(EncodedFusionSampler::new(strategy, *params)?.sample(rng))
}

/// Attempt-by-attempt RUS simulation from physical outcomes. Independent of the closed forms,
/// used to validate them.
pub fn simulate_rus<R: Rng + ?Sized>(n: usize, params: &FusionChannelParams, rng: &mut R) -> EncodedFusionOutcome {
    let d = physical_outcome_dist(params);
    let det = params.eta * params.eta;
    let mut xx_flip = false;
    let mut attempt = 0;
    while attempt < n {
        attempt += 1;
        match d.sample(rng) {
            PhysicalOutcome::Success => {
                xx_flip ^= rng.random_bool(params.p_z);
                return EncodedFusionOutcome { event: EncodedEvent::BothRecovered, attempts: attempt, xx_flipped: xx_flip, zz_flipped: rng.random_bool(params.success_zz_flip()) };
            }
            PhysicalOutcome::SuccessXxErased => {
                return EncodedFusionOutcome { event: EncodedEvent::ZzOnly, attempts: attempt, xx_flipped: false, zz_flipped: rng.random_bool(params.p_x) };
            }
            PhysicalOutcome::Failure => xx_flip ^= rng.random_bool(params.p_z),
            PhysicalOutcome::FailureXxErased | PhysicalOutcome::Loss => {
                // XX is gone; switch to ZZ-biased fusions, which succeed when both photons arrive.
                while attempt < n {
                    attempt += 1;
                    if rng.random_bool(det) {
                        return EncodedFusionOutcome { event: EncodedEvent::ZzOnly, attempts: attempt, xx_flipped: false, zz_flipped: rng.random_bool(params.p_x) };
                    }
                }
                return EncodedFusionOutcome { event: EncodedEvent::Erasure, attempts: n, xx_flipped: false, zz_flipped: false };
            }
        }
    }
    EncodedFusionOutcome { event: EncodedEvent::XxOnly, attempts: n, xx_flipped: xx_flip, zz_flipped: false }
}
