use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use super::config::{Affine, NoiseSpec, RegionSpec, SweepConfig};
use super::estimate::{estimate_rate, PointKey};
use super::threshold::{find_threshold, NoCrossing, SizeCurve, ThresholdEstimate};
use super::trial::LatticeContext;
use super::MonteCarloError;

pub const BOOTSTRAP_REPLICATES: usize = 400;

/// Rates of every size on a grid plus the crossing estimate.
#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub curves: Vec<SizeCurve>,
    pub threshold: Result<ThresholdEstimate, NoCrossing>,
    pub runtime_s: f64,
}

/// Sweep of one noise spec. Seeds depend on the grid value, not its position, so refined
/// grids reproduce the points they share with coarser ones.
#[derive(Clone, Debug)]
pub struct Sweep<'a> {
    pub noise: &'a NoiseSpec,
    pub sizes: &'a [usize],
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Sweep<'_> {
    pub fn curve(&self, ctx: &LatticeContext, grid: &[f64]) -> Result<SizeCurve, MonteCarloError> {
        let points = grid
            .iter()
            .map(|&x| {
                let noise = self.noise.at(x)?;
                let r = estimate_rate(ctx, &noise, self.trials, PointKey { base_seed: self.seed, point: x.to_bits() }, self.workers)?;
                Ok((x, r))
            })
            .collect::<Result<_, MonteCarloError>>()?;
        Ok(SizeCurve { l: ctx.l(), points })
    }

    pub fn run(&self, grid: &[f64]) -> Result<SweepResult, MonteCarloError> {
        let start = Instant::now();
        let curves = self.sizes.iter().map(|&l| self.curve(&LatticeContext::new(l)?, grid)).collect::<Result<Vec<_>, _>>()?;
        let threshold = find_threshold(&curves, BOOTSTRAP_REPLICATES, self.seed);
        Ok(SweepResult { curves, threshold, runtime_s: start.elapsed().as_secs_f64() })
    }
}

pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<SweepResult, MonteCarloError> {
    config.validate()?;
    Sweep { noise: &config.noise, sizes: &config.sizes, trials: config.trials, seed: config.seed, workers }.run(&config.grid.values())
}

pub const CSV_HEADER: &str = "x,L,n_trials,n_fail,R,sigma";

/// Fixed-format CSV rows, one per grid value and size.
pub fn sweep_csv(curves: &[SizeCurve]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in curves {
        for (x, r) in &c.points {
            writeln!(s, "{x:.6},{},{},{},{:.6e},{:.6e}", c.l, r.n_trials, r.n_fail, r.rate, r.sigma).expect("string write");
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary<'a> {
    pub name: &'a str,
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub trials: usize,
    pub sizes: &'a [usize],
    pub threshold: Option<&'a ThresholdEstimate>,
    pub no_crossing: Option<&'a NoCrossing>,
    pub runtime_s: f64,
}

pub fn sweep_summary<'a>(config: &'a SweepConfig, result: &'a SweepResult) -> SweepSummary<'a> {
    SweepSummary {
        name: &config.name,
        schema_version: config.schema_version,
        config_hash: config.hash(),
        seed: config.seed,
        trials: config.trials,
        sizes: &config.sizes,
        threshold: result.threshold.as_ref().ok(),
        no_crossing: result.threshold.as_ref().err(),
        runtime_s: result.runtime_s,
    }
}

/// Directions in the positive orthant of `dim` axes, `rays` per angle.
pub fn ray_directions(dim: usize, rays: usize) -> Vec<Vec<f64>> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let angle = |k: usize| (k as f64 + 0.5) / rays as f64 * half_pi;
    match dim {
        2 => (0..rays).map(|k| vec![angle(k).cos(), angle(k).sin()]).collect(),
        3 => (0..rays)
            .flat_map(|i| {
                (0..rays).map(move |j| {
                    let (th, ph) = (angle(i), angle(j));
                    vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
                })
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// One ray of the region scan and the boundary point found on it.
#[derive(Clone, Debug, Serialize)]
pub struct RegionRay {
    pub direction: Vec<f64>,
    /// Axis parameter values at the crossing, when one was found.
    pub boundary: Option<Vec<f64>>,
    pub threshold: Result<ThresholdEstimate, NoCrossing>,
}

/// Fault-tolerant region: a threshold sweep along rays from the origin of the named axes.
/// Along a ray, axis `i` takes the value `x · dir_i · max_i` for `x` on `ray_grid`.
pub fn map_ft_region(base: &Sweep<'_>, region: &RegionSpec, ray_grid: &[f64]) -> Result<Vec<RegionRay>, MonteCarloError> {
    let contexts = base.sizes.iter().map(|&l| LatticeContext::new(l)).collect::<Result<Vec<_>, _>>()?;
    ray_directions(region.axes.len(), region.rays)
        .into_iter()
        .enumerate()
        .map(|(k, dir)| {
            let mut noise = base.noise.clone();
            for (a, &d) in region.axes.iter().zip(&dir) {
                noise.set_param(&a.param, Affine::linear(d * a.max))?;
            }
            let sweep = Sweep { noise: &noise, seed: base.seed ^ ((k as u64) << 32), ..base.clone() };
            let curves = contexts.iter().map(|ctx| sweep.curve(ctx, ray_grid)).collect::<Result<Vec<_>, _>>()?;
            let threshold = find_threshold(&curves, BOOTSTRAP_REPLICATES, sweep.seed);
            let boundary = threshold.as_ref().ok().map(|t| region.axes.iter().zip(&dir).map(|(a, d)| t.x_star * d * a.max).collect());
            Ok(RegionRay { direction: dir, boundary, threshold })
        })
        .collect()
}

pub fn region_csv(axes: &[String], rays: &[RegionRay]) -> String {
    let mut s = String::new();
    let cols: Vec<String> = axes.iter().map(|a| format!("dir_{a}")).chain(axes.iter().cloned()).collect();
    writeln!(s, "{},x_star,sigma", cols.join(",")).expect("string write");
    for r in rays {
        let dirs = r.direction.iter().map(|d| format!("{d:.6}"));
        let (vals, xs, sg): (Vec<String>, String, String) = match (&r.boundary, &r.threshold) {
            (Some(b), Ok(t)) => (b.iter().map(|v| format!("{v:.6e}")).collect(), format!("{:.6}", t.x_star), format!("{:.6}", t.sigma)),
            _ => (vec!["nan".into(); axes.len()], "nan".into(), "nan".into()),
        };
        writeln!(s, "{},{},{xs},{sg}", dirs.collect::<Vec<_>>().join(","), vals.join(",")).expect("string write");
    }
    s
}
