use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::NoiseConfig;
use super::trial::{run_trial, LatticeContext, PointSampler};
use super::MonteCarloError;
use crate::decoder::{Decoder, OutcomeAssignment, Verdict};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at sweep point `point` and size `l`, independent of scheduling.
pub fn trial_seed(base: u64, point: u64, l: u64, trial: u64) -> u64 {
    [point, l, trial].into_iter().fold(splitmix(base), |acc, v| splitmix(acc ^ splitmix(v)))
}

pub fn trial_rng(base: u64, point: u64, l: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(base, point, l, trial))
}

/// Failure rate with its binomial error and 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub n_trials: usize,
    pub n_fail: usize,
    pub n_logical_error: usize,
    pub n_logical_erasure: usize,
    pub rate: f64,
    pub sigma: f64,
    pub wilson: (f64, f64),
}

impl RateEstimate {
    pub fn from_counts(n_trials: usize, n_logical_error: usize, n_logical_erasure: usize) -> Self {
        let n_fail = n_logical_error + n_logical_erasure;
        let n = n_trials.max(1) as f64;
        let rate = n_fail as f64 / n;
        RateEstimate { n_trials, n_fail, n_logical_error, n_logical_erasure, rate, sigma: (rate * (1.0 - rate) / n).sqrt(), wilson: wilson_interval(n_fail, n_trials, 1.959_963_984_540_054) }
    }
}

/// Wilson score interval for `k` successes in `n` trials at `z` standard deviations.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (n, p) = (n as f64, k as f64 / n as f64);
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Identifies a sweep point for seeding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointKey {
    pub base_seed: u64,
    pub point: u64,
}

/// Runs `trials` trials on `workers` threads. The result depends only on the seeds.
pub fn estimate_rate(ctx: &LatticeContext, noise: &NoiseConfig, trials: usize, key: PointKey, workers: usize) -> Result<RateEstimate, MonteCarloError> {
    let sampler = PointSampler::new(noise)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| MonteCarloError::Invalid(e.to_string()))?;
    let l = ctx.l() as u64;
    let n_slots = ctx.graph.n_slots();
    let (errors, erasures) = pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map_init(
                || (Decoder::new(&ctx.graph), OutcomeAssignment::ideal(n_slots)),
                |(decoder, scratch), t| {
                    let mut rng = trial_rng(key.base_seed, key.point, l, t);
                    match run_trial(ctx, &sampler, decoder, scratch, &mut rng) {
                        Verdict::Success => (0usize, 0usize),
                        Verdict::LogicalError => (1, 0),
                        Verdict::LogicalErasure => (0, 1),
                    }
                },
            )
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    });
    Ok(RateEstimate::from_counts(trials, errors, erasures))
}
