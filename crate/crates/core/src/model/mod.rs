//! Domain physics shared by every planner: geometry, kinematics, channels,
//! timing, energy and propulsion. Everything here is a pure function of its
//! inputs.

mod channel;
mod energy;
mod kinematics;
mod params;
mod propulsion;

pub use channel::{atg_path_loss_db, atg_rate, coverage_radius, elevation_angle, free_space_rate};
pub use energy::{local_energy, offload_cost, required_cpu, LocalCost, OffloadCost};
pub use kinematics::{apply_action, Kinematics};
pub use params::{AtgChannelParams, PropulsionParams, SystemConfig, SystemParams};
pub use propulsion::{battery_draw, battery_step, propulsion_power, BatteryStep};

use serde::{Deserialize, Serialize};

/// Workload of one UE in one slot. `(0, 0)` means no task.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Task {
    /// Bits to upload when offloading.
    pub data_bits: f64,
    /// CPU cycles needed to execute.
    pub cpu_cycles: f64,
}

impl Task {
    pub fn new(data_bits: f64, cpu_cycles: f64) -> Self {
        Self { data_bits, cpu_cycles }
    }

    pub fn is_empty(&self) -> bool {
        self.data_bits == 0.0 && self.cpu_cycles == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    /// Ground position (x, y) in meters.
    pub position: [f64; 2],
    /// Uplink transmit power in W.
    pub tx_power: f64,
    /// Effective switched capacitance of the local CPU.
    pub kappa: f64,
    /// Exponent of the local CPU power model.
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    /// (X, Y, Z) in meters.
    pub position: [f64; 3],
    /// Remaining battery energy in J. Only evolves in 3-D mode.
    pub battery: f64,
}

impl UavState {
    pub fn new(position: [f64; 3], battery: f64) -> Self {
        Self { position, battery }
    }

    pub fn altitude(&self) -> f64 {
        self.position[2]
    }

    pub fn horizontal(&self) -> [f64; 2] {
        [self.position[0], self.position[1]]
    }

    /// Horizontal distance to a ground point.
    pub fn horizontal_distance(&self, ground: [f64; 2]) -> f64 {
        let dx = self.position[0] - ground[0];
        let dy = self.position[1] - ground[1];
        dx.hypot(dy)
    }
}

/// One slot of flight: horizontal heading, vertical angle from the +Z axis
/// and distance. Level flight has `theta_v = π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavAction {
    pub theta_h: f64,
    pub theta_v: f64,
    pub dist: f64,
}

impl UavAction {
    pub fn level(theta_h: f64, dist: f64) -> Self {
        Self { theta_h, theta_v: std::f64::consts::FRAC_PI_2, dist }
    }

    pub fn hover() -> Self {
        Self::level(0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Mode {
    /// Fixed altitude, free-space channel.
    #[default]
    #[serde(rename = "2d")]
    TwoD,
    /// Altitude within a band, air-to-ground channel, propulsion energy and battery.
    #[serde(rename = "3d")]
    ThreeD,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2d" | "2-d" => Ok(Mode::TwoD),
            "3d" | "3-d" => Ok(Mode::ThreeD),
            other => Err(crate::Error::Config(format!("unknown mode `{other}` (expected 2d or 3d)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::TwoD => "2d",
            Mode::ThreeD => "3d",
        })
    }
}

/// Everything needed to evaluate rates, coverage and motion in one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Physics {
    pub sys: SystemParams,
    pub atg: AtgChannelParams,
    pub propulsion: PropulsionParams,
    pub mode: Mode,
    pub kinematics: Kinematics,
}

impl Physics {
    pub fn two_d(sys: SystemParams) -> Self {
        Self {
            sys,
            atg: AtgChannelParams::default(),
            propulsion: PropulsionParams::default(),
            mode: Mode::TwoD,
            kinematics: Kinematics::Consistent,
        }
    }

    pub fn three_d(sys: SystemParams, atg: AtgChannelParams, propulsion: PropulsionParams) -> Self {
        Self { sys, atg, propulsion, mode: Mode::ThreeD, kinematics: Kinematics::Consistent }
    }

    /// Uplink rate in bits/s for the active channel model.
    pub fn rate(&self, ue: &UserEquipment, uav: &UavState) -> f64 {
        match self.mode {
            Mode::TwoD => free_space_rate(ue, uav, &self.sys),
            Mode::ThreeD => atg_rate(ue, uav, &self.sys, &self.atg),
        }
    }

    /// Horizontal service radius of a UAV at its current altitude.
    pub fn coverage(&self, uav: &UavState) -> f64 {
        uav.altitude().max(0.0) * self.sys.theta_max.tan()
    }

    pub fn covers(&self, ue: &UserEquipment, uav: &UavState) -> bool {
        uav.horizontal_distance(ue.position) <= self.coverage(uav)
    }

    pub fn step(&self, uav: &UavState, action: &UavAction) -> (UavState, bool) {
        apply_action(uav, action, &self.sys, self.mode, self.kinematics)
    }

    /// Power drawn from the battery while executing `action` for one slot.
    pub fn flight_power(&self, action: &UavAction) -> f64 {
        let v = action.dist / self.sys.t_max;
        battery_draw(v, action.theta_v, &self.propulsion)
    }

    /// Per-UAV width of the state encoding.
    pub fn state_dim(&self) -> usize {
        match self.mode {
            Mode::TwoD => 3,
            Mode::ThreeD => 4,
        }
    }

    /// Per-UAV width of the action encoding.
    pub fn action_dim(&self) -> usize {
        match self.mode {
            Mode::TwoD => 2,
            Mode::ThreeD => 3,
        }
    }
}

/// UE population plus the kinematic state of every UAV at one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub ues: Vec<UserEquipment>,
    pub uavs: Vec<UavState>,
}

impl WorldState {
    pub fn new(ues: Vec<UserEquipment>, uavs: Vec<UavState>) -> Self {
        Self { ues, uavs }
    }
}
