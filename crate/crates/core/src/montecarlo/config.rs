use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::MonteCarloError;
use crate::emitter::SpinNoiseParams;
use crate::fusion::{FusionChannelParams, Strategy, TieRule};

pub const SCHEMA_VERSION: u32 = 1;

/// `offset + slope · x`. In config files either a bare number (constant) or a table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(from = "AffineRepr")]
pub struct Affine {
    pub offset: f64,
    pub slope: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AffineRepr {
    Const(f64),
    Map {
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        slope: f64,
    },
}

impl From<AffineRepr> for Affine {
    fn from(r: AffineRepr) -> Self {
        match r {
            AffineRepr::Const(c) => Affine::constant(c),
            AffineRepr::Map { offset, slope } => Affine { offset, slope },
        }
    }
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine { offset: c, slope: 0.0 }
    }

    pub fn linear(slope: f64) -> Self {
        Affine { offset: 0.0, slope }
    }

    pub fn new(offset: f64, slope: f64) -> Self {
        Affine { offset, slope }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.offset + self.slope * x
    }
}

/// Encoded fusion strategy of the physical model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategyConfig {
    Rep {
        m: usize,
        #[serde(default)]
        tie: TieRule,
    },
    Rus {
        n: usize,
        #[serde(default)]
        reinit: bool,
        /// Extra attempts after re-initialization; defaults to `n`.
        #[serde(default)]
        reinit_attempts: Option<usize>,
    },
}

impl StrategyConfig {
    pub fn rep(m: usize) -> Self {
        StrategyConfig::Rep { m, tie: TieRule::Erase }
    }

    pub fn rus(n: usize) -> Self {
        StrategyConfig::Rus { n, reinit: false, reinit_attempts: None }
    }

    pub fn rus_reinit(n: usize) -> Self {
        StrategyConfig::Rus { n, reinit: true, reinit_attempts: None }
    }

    pub fn fusion_strategy(&self) -> Strategy {
        match *self {
            StrategyConfig::Rep { m, tie } => Strategy::Rep { m, tie },
            StrategyConfig::Rus { n, .. } => Strategy::Rus { n },
        }
    }

    /// Attempts of the boosted fusion after re-initialization, if enabled.
    pub fn reinit_attempts(&self) -> Option<usize> {
        match *self {
            StrategyConfig::Rus { n, reinit: true, reinit_attempts } => Some(reinit_attempts.unwrap_or(n)),
            _ => None,
        }
    }
}

/// Spin Pauli probabilities per emission; `depolarizing` adds `p/3` to each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SpinSpec {
    #[serde(default)]
    pub x: Affine,
    #[serde(default)]
    pub y: Affine,
    #[serde(default)]
    pub z: Affine,
    #[serde(default)]
    pub depolarizing: Affine,
}

impl SpinSpec {
    pub fn at(&self, x: f64) -> Result<SpinNoiseParams, MonteCarloError> {
        let d = self.depolarizing.at(x) / 3.0;
        SpinNoiseParams::new(self.x.at(x) + d, self.y.at(x) + d, self.z.at(x) + d).map_err(|e| MonteCarloError::Invalid(e.to_string()))
    }
}

/// Noise model as a function of the sweep parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseSpec {
    Phenomenological {
        #[serde(default)]
        p_err: Affine,
        #[serde(default)]
        p_eras: Affine,
    },
    Physical {
        /// Photon loss `ℓ = 1 − η`.
        #[serde(default)]
        loss: Affine,
        /// Distinguishability `1 − V`.
        #[serde(default)]
        distinguishability: Affine,
        #[serde(default = "half")]
        p_fail: f64,
        #[serde(default)]
        spin: SpinSpec,
        strategy: StrategyConfig,
    },
}

fn half() -> f64 {
    0.5
}

impl NoiseSpec {
    pub fn phenomenological(p_err: Affine, p_eras: Affine) -> Self {
        NoiseSpec::Phenomenological { p_err, p_eras }
    }

    pub fn physical(strategy: StrategyConfig) -> Self {
        NoiseSpec::Physical { loss: Affine::default(), distinguishability: Affine::default(), p_fail: 0.5, spin: SpinSpec::default(), strategy }
    }

    /// Names accepted by [`NoiseSpec::set_param`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            NoiseSpec::Phenomenological { .. } => &["p_err", "p_eras"],
            NoiseSpec::Physical { .. } => &["loss", "distinguishability", "spin_x", "spin_y", "spin_z", "spin_depolarizing"],
        }
    }

    pub fn set_param(&mut self, name: &str, value: Affine) -> Result<(), MonteCarloError> {
        let slot = match self {
            NoiseSpec::Phenomenological { p_err, p_eras } => match name {
                "p_err" => p_err,
                "p_eras" => p_eras,
                _ => return Err(MonteCarloError::Invalid(format!("unknown phenomenological parameter {name:?}"))),
            },
            NoiseSpec::Physical { loss, distinguishability, spin, .. } => match name {
                "loss" => loss,
                "distinguishability" => distinguishability,
                "spin_x" => &mut spin.x,
                "spin_y" => &mut spin.y,
                "spin_z" => &mut spin.z,
                "spin_depolarizing" => &mut spin.depolarizing,
                _ => return Err(MonteCarloError::Invalid(format!("unknown physical parameter {name:?}"))),
            },
        };
        *slot = value;
        Ok(())
    }

    pub fn at(&self, x: f64) -> Result<NoiseConfig, MonteCarloError> {
        let model = match *self {
            NoiseSpec::Phenomenological { p_err, p_eras } => NoiseModel::Phenomenological { p_err: p_err.at(x), p_eras: p_eras.at(x) },
            NoiseSpec::Physical { loss, distinguishability, p_fail, spin, strategy } => {
                NoiseModel::Physical { eta: 1.0 - loss.at(x), v: 1.0 - distinguishability.at(x), p_fail, spin: spin.at(x)?, strategy }
            }
        };
        let c = NoiseConfig { model };
        c.validate()?;
        Ok(c)
    }
}

/// Noise at one sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum NoiseModel {
    Phenomenological { p_err: f64, p_eras: f64 },
    Physical { eta: f64, v: f64, p_fail: f64, spin: SpinNoiseParams, strategy: StrategyConfig },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseConfig {
    pub model: NoiseModel,
}

impl NoiseConfig {
    pub fn phenomenological(p_err: f64, p_eras: f64) -> Result<Self, MonteCarloError> {
        let c = NoiseConfig { model: NoiseModel::Phenomenological { p_err, p_eras } };
        c.validate()?;
        Ok(c)
    }

    pub fn physical(eta: f64, v: f64, spin: SpinNoiseParams, strategy: StrategyConfig) -> Result<Self, MonteCarloError> {
        let c = NoiseConfig { model: NoiseModel::Physical { eta, v, p_fail: 0.5, spin, strategy } };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        let unit = |name: &str, p: f64| if (0.0..=1.0).contains(&p) { Ok(()) } else { Err(MonteCarloError::Invalid(format!("{name} = {p} is outside [0, 1]"))) };
        match self.model {
            NoiseModel::Phenomenological { p_err, p_eras } => {
                unit("p_err", p_err)?;
                unit("p_eras", p_eras)
            }
            NoiseModel::Physical { eta, v, p_fail, strategy, .. } => {
                unit("eta", eta)?;
                unit("V", v)?;
                unit("p_fail", p_fail)?;
                if strategy.fusion_strategy().max_attempts() == 0 || strategy.reinit_attempts() == Some(0) {
                    return Err(MonteCarloError::Invalid("strategy needs at least one attempt".into()));
                }
                Ok(())
            }
        }
    }

    /// Channel parameters of one physical fusion.
    pub fn channel(&self) -> Option<FusionChannelParams> {
        match self.model {
            NoiseModel::Physical { eta, v, p_fail, .. } => Some(FusionChannelParams::new(eta, v, p_fail, 0.0, 0.0).expect("validated")),
            NoiseModel::Phenomenological { .. } => None,
        }
    }
}

/// Sweep grid: explicit values or `points` evenly spaced from `start` to `stop`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values { values: Vec<f64> },
    Range { start: f64, stop: f64, points: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values { values } => values.clone(),
            GridSpec::Range { start, stop, points } => match *points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }
}

/// One axis of a fault-tolerant region scan: a noise parameter swept from 0 to `max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionAxis {
    pub param: String,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub axes: Vec<RegionAxis>,
    /// Rays per angular direction.
    pub rays: usize,
}

/// A sweep definition as read from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub sizes: Vec<usize>,
    pub grid: GridSpec,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub region: Option<RegionSpec>,
}

impl SweepConfig {
    pub fn from_toml(s: &str) -> Result<Self, MonteCarloError> {
        let c: SweepConfig = toml::from_str(s).map_err(|e| MonteCarloError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, MonteCarloError> {
        let s = std::fs::read_to_string(path).map_err(|e| MonteCarloError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("serializable")
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(MonteCarloError::Config(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        if self.trials == 0 {
            return Err(MonteCarloError::Config("trials must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(MonteCarloError::Config("sizes must not be empty".into()));
        }
        for &l in &self.sizes {
            if l < 2 || l % 2 != 0 {
                return Err(MonteCarloError::Config(format!("size {l} must be even and at least 2")));
            }
        }
        let grid = self.grid.values();
        if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
            return Err(MonteCarloError::Config("grid must contain finite values".into()));
        }
        for &x in &grid {
            self.noise.at(x)?;
        }
        if let Some(r) = &self.region {
            if !(2..=3).contains(&r.axes.len()) || r.rays == 0 {
                return Err(MonteCarloError::Config("region needs 2 or 3 axes and at least one ray".into()));
            }
            for a in &r.axes {
                if !self.noise.param_names().contains(&a.param.as_str()) {
                    return Err(MonteCarloError::Config(format!("unknown region axis {:?}", a.param)));
                }
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical TOML serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
