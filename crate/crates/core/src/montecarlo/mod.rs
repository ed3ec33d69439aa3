//! Monte Carlo trials of the fusion network, failure-rate estimation and threshold search.
//!
//! A trial samples every outcome slot, decodes both sectors and records the worse verdict.
//! Trial seeds derive from `(base seed, sweep point, L, trial index)`, so results do not
//! depend on the number of worker threads.

mod config;
mod estimate;
mod sweep;
mod threshold;
mod trial;

pub use config::{Affine, GridSpec, NoiseConfig, NoiseModel, NoiseSpec, RegionAxis, RegionSpec, SpinSpec, StrategyConfig, SweepConfig, SCHEMA_VERSION};
pub use estimate::{estimate_rate, trial_rng, trial_seed, wilson_interval, PointKey, RateEstimate};
pub use sweep::{map_ft_region, ray_directions, region_csv, run_sweep, sweep_csv, sweep_summary, RegionRay, Sweep, SweepResult, SweepSummary, BOOTSTRAP_REPLICATES, CSV_HEADER};
pub use threshold::{find_threshold, NoCrossing, SizeCurve, ThresholdEstimate};
pub use trial::{apply_reinit_rule, reinit_triggered, run_trial, sample_phenomenological, sample_physical, LatticeContext, PhysicalRecord, PhysicalSampler, PointSampler};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonteCarloError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}
