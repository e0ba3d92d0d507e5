//! Scenario configuration and seeded generation.
//!
//! A [`ScenarioConfig`] is the JSON a user writes; [`generate`] expands it
//! into a [`Scenario`] holding UE positions, per-slot tasks and the pools of
//! take-off points. Every random stream is drawn from its own sub-seed so
//! changing, say, the slot count does not move the UEs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cat::CatOptions;
use crate::error::{Error, Result};
use crate::model::{
    AtgChannelParams, Kinematics, Mode, Physics, PropulsionParams, SystemParams, Task, UavState, UserEquipment,
};
use crate::rat::RatHyperParams;

pub const SCHEMA_VERSION: u32 = 1;

/// Bits per configured kilobyte (10³ bytes).
pub const BITS_PER_KB: f64 = 8000.0;

/// Independent random streams derived from the scenario seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Ues = 1,
    Tasks = 2,
    Takeoff = 3,
    HeldOut = 4,
    AgentInit = 5,
    Training = 6,
    Clustering = 7,
    RandomPolicy = 8,
}

/// Deterministic RNG for one purpose under `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeConfig {
    pub tx_power: f64,
    pub kappa: f64,
    pub nu: f64,
}

impl Default for UeConfig {
    fn default() -> Self {
        Self { tx_power: 0.1, kappa: 1e-28, nu: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub n_ues: usize,
    pub n_uavs: usize,
    pub n_slots: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub kinematics: Kinematics,
    /// Upload size range in KB.
    pub data_kb: [f64; 2],
    /// CPU cycle range.
    pub cpu_cycles: [f64; 2],
    #[serde(default)]
    pub ue: UeConfig,
    #[serde(default)]
    pub system: SystemParams,
    #[serde(default)]
    pub atg: AtgChannelParams,
    #[serde(default)]
    pub propulsion: PropulsionParams,
    #[serde(default)]
    pub rat: RatHyperParams,
    #[serde(default)]
    pub cat: CatOptions,
    /// Take-off point pool cycled through during training.
    #[serde(default = "default_pool")]
    pub takeoff_pool: usize,
    /// Separate pool used only for evaluation.
    #[serde(default = "default_pool")]
    pub heldout_pool: usize,
    /// Cluster count of the cluster-moving route; `None` picks `T/6` rounded.
    #[serde(default)]
    pub cm_clusters: Option<usize>,
}

fn default_pool() -> usize {
    20
}

impl ScenarioConfig {
    /// N=20, M=2, T=20 with 300 training epochs.
    pub fn desk() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 1,
            n_ues: 20,
            n_uavs: 2,
            n_slots: 20,
            mode: Mode::TwoD,
            kinematics: Kinematics::Consistent,
            data_kb: [10.0, 50.0],
            cpu_cycles: [2e9, 2e10],
            ue: UeConfig::default(),
            system: SystemParams::default(),
            atg: AtgChannelParams::default(),
            propulsion: PropulsionParams::default(),
            rat: RatHyperParams::desk(),
            cat: CatOptions::default(),
            takeoff_pool: 20,
            heldout_pool: 20,
            cm_clusters: None,
        }
    }

    /// The full-size simulation setup: N=100, T=60 and 3000 epochs.
    pub fn paper_scale() -> Self {
        Self { n_ues: 100, n_slots: 60, rat: RatHyperParams::paper_scale(), ..Self::desk() }
    }

    /// Desk profile switched to the 3-D channel with its task ranges.
    pub fn desk_3d() -> Self {
        Self::desk().with_mode(Mode::ThreeD)
    }

    /// Switches the channel mode along with the task ranges and bandwidth
    /// that go with it.
    pub fn with_mode(self, mode: Mode) -> Self {
        let (data_kb, cpu_cycles, bandwidth) = match mode {
            Mode::TwoD => ([10.0, 50.0], [2e9, 2e10], SystemParams::default().bandwidth),
            Mode::ThreeD => ([5.0, 10.0], [7.5e8, 2e9], 20e6),
        };
        Self { mode, data_kb, cpu_cycles, system: SystemParams { bandwidth, ..self.system }, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: self.schema_version, expected: SCHEMA_VERSION });
        }
        for (name, v) in [("n_ues", self.n_ues), ("n_uavs", self.n_uavs), ("n_slots", self.n_slots)] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        for (name, [lo, hi]) in [("data_kb", self.data_kb), ("cpu_cycles", self.cpu_cycles)] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                return Err(Error::Config(format!("{name} must satisfy 0 <= lo <= hi, got [{lo}, {hi}]")));
            }
        }
        if !(self.ue.tx_power > 0.0 && self.ue.kappa >= 0.0 && self.ue.nu.is_finite()) {
            return Err(Error::Config("ue.tx_power must be positive and ue.kappa non-negative".into()));
        }
        if self.takeoff_pool == 0 || self.heldout_pool == 0 {
            return Err(Error::Config("take-off pools must hold at least one point".into()));
        }
        if self.cm_clusters == Some(0) {
            return Err(Error::Config("cm_clusters must be at least 1".into()));
        }
        self.system.validate()?;
        self.atg.validate()?;
        self.propulsion.validate()?;
        self.rat.validate()?;
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        // Check the version before the full parse so old files get a clear error.
        let raw: serde_json::Value = serde_json::from_str(s)?;
        match raw.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(Error::SchemaVersion { found: v as u32, expected: SCHEMA_VERSION }),
            None => return Err(Error::Config("missing schema_version".into())),
        }
        let cfg: Self = serde_json::from_value(raw)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn physics(&self) -> Physics {
        Physics { sys: self.system, atg: self.atg, propulsion: self.propulsion, mode: self.mode, kinematics: self.kinematics }
    }

    pub fn clusters(&self) -> usize {
        self.cm_clusters.unwrap_or_else(|| ((self.n_slots as f64 / 6.0).round() as usize).max(1))
    }
}

/// A generated instance: everything a planner needs besides its own seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub config: ScenarioConfig,
    pub ues: Vec<UserEquipment>,
    /// `tasks[t][i]`: task of UE `i` in slot `t`.
    pub tasks: Vec<Vec<Task>>,
    /// `takeoffs[k][j]`: horizontal take-off point of UAV `j` in pool entry `k`.
    pub takeoffs: Vec<Vec<[f64; 2]>>,
    pub heldout: Vec<Vec<[f64; 2]>>,
}

fn uniform<R: Rng>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn points<R: Rng>(rng: &mut R, n: usize, sys: &SystemParams) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.gen_range(0.0..=sys.area_x), rng.gen_range(0.0..=sys.area_y)]).collect()
}

/// Expands a validated config into a scenario.
pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let sys = &cfg.system;
    let mut rng = stream_rng(cfg.seed, Stream::Ues);
    let ues = points(&mut rng, cfg.n_ues, sys)
        .into_iter()
        .map(|position| UserEquipment { position, tx_power: cfg.ue.tx_power, kappa: cfg.ue.kappa, nu: cfg.ue.nu })
        .collect();
    let mut rng = stream_rng(cfg.seed, Stream::Tasks);
    let bits = [cfg.data_kb[0] * BITS_PER_KB, cfg.data_kb[1] * BITS_PER_KB];
    let tasks = (0..cfg.n_slots)
        .map(|_| {
            (0..cfg.n_ues)
                .map(|_| {
                    let d = uniform(&mut rng, bits);
                    Task::new(d, uniform(&mut rng, cfg.cpu_cycles))
                })
                .collect()
        })
        .collect();
    let mut rng = stream_rng(cfg.seed, Stream::Takeoff);
    let takeoffs = (0..cfg.takeoff_pool).map(|_| points(&mut rng, cfg.n_uavs, sys)).collect();
    let mut rng = stream_rng(cfg.seed, Stream::HeldOut);
    let heldout = (0..cfg.heldout_pool).map(|_| points(&mut rng, cfg.n_uavs, sys)).collect();
    Ok(Scenario { schema_version: SCHEMA_VERSION, config: cfg.clone(), ues, tasks, takeoffs, heldout })
}

impl Scenario {
    pub fn physics(&self) -> Physics {
        self.config.physics()
    }

    pub fn n_slots(&self) -> usize {
        self.tasks.len()
    }

    /// Initial UAV states at the given take-off points: the flight altitude in
    /// 2-D mode, the bottom of the altitude band in 3-D mode, full battery.
    pub fn start_states(&self, takeoff: &[[f64; 2]]) -> Vec<UavState> {
        let sys = &self.config.system;
        let z = match self.config.mode {
            Mode::TwoD => sys.altitude,
            Mode::ThreeD => sys.z_min,
        };
        takeoff.iter().map(|&[x, y]| UavState::new([x, y, z], sys.e_max)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(s)?;
        if let Some(v) = raw.get("schema_version").and_then(|v| v.as_u64()) {
            if v != SCHEMA_VERSION as u64 {
                return Err(Error::SchemaVersion { found: v as u32, expected: SCHEMA_VERSION });
            }
        }
        let sc: Self = serde_json::from_value(raw)?;
        sc.config.validate()?;
        let n = sc.config.n_ues;
        if sc.ues.len() != n || sc.tasks.iter().any(|t| t.len() != n) || sc.tasks.len() != sc.config.n_slots {
            return Err(Error::Config("scenario arrays do not match n_ues/n_slots".into()));
        }
        if sc.takeoffs.iter().chain(&sc.heldout).any(|p| p.len() != sc.config.n_uavs) || sc.takeoffs.is_empty() {
            return Err(Error::Config("take-off pools do not match n_uavs".into()));
        }
        Ok(sc)
    }
}
