use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Runtime system constants, all in SI units.
///
/// Serialized through [`SystemConfig`], which carries the noise power in dBm;
/// the conversion to watts happens once on load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemConfig", into = "SystemConfig")]
pub struct SystemParams {
    pub area_x: f64,
    pub area_y: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// Take-off altitude; the fixed flight altitude in 2-D mode.
    pub altitude: f64,
    pub d_max: f64,
    /// Slot duration, which is also the task deadline.
    pub t_max: f64,
    /// Per-UAV cap on tasks accepted per slot.
    pub v_max: usize,
    /// Per-UAV CPU budget per slot, Hz.
    pub f_max: f64,
    /// Antenna half-angle bounding the coverage disc.
    pub theta_max: f64,
    pub bandwidth: f64,
    /// Channel power gain at 1 m.
    pub g0: f64,
    pub gain_g0: f64,
    /// Noise power in W.
    pub sigma2: f64,
    pub e_max: f64,
    /// Weight of UAV propulsion energy in the 3-D reward.
    pub k_z: f64,
    /// Reward penalty per UAV leaving the allowed region in a slot.
    pub penalty: f64,
}

impl SystemParams {
    /// `α = g0·G0/σ²`.
    pub fn alpha(&self) -> f64 {
        self.g0 * self.gain_g0 / self.sigma2
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("area_x", self.area_x),
            ("area_y", self.area_y),
            ("z_min", self.z_min),
            ("z_max", self.z_max),
            ("altitude", self.altitude),
            ("t_max", self.t_max),
            ("f_max", self.f_max),
            ("theta_max", self.theta_max),
            ("bandwidth", self.bandwidth),
            ("g0", self.g0),
            ("gain_g0", self.gain_g0),
            ("sigma2", self.sigma2),
            ("e_max", self.e_max),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("system.{name} must be positive and finite, got {v}")));
            }
        }
        let non_negative = [("d_max", self.d_max), ("k_z", self.k_z), ("penalty", self.penalty)];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("system.{name} must be non-negative, got {v}")));
            }
        }
        if self.v_max < 1 {
            return Err(Error::Config("system.v_max must be at least 1".into()));
        }
        if self.theta_max >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::Config(format!("system.theta_max must be below π/2, got {}", self.theta_max)));
        }
        if self.z_min > self.z_max {
            return Err(Error::Config(format!("system.z_min {} exceeds z_max {}", self.z_min, self.z_max)));
        }
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemConfig::default().try_into().expect("default system config is valid")
    }
}

/// On-disk form of [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub area_x: f64,
    pub area_y: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub altitude: f64,
    pub d_max: f64,
    pub t_max: f64,
    pub v_max: usize,
    pub f_max: f64,
    pub theta_max: f64,
    pub bandwidth: f64,
    pub g0: f64,
    pub gain_g0: f64,
    pub noise_dbm: f64,
    pub e_max: f64,
    pub k_z: f64,
    pub penalty: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            area_x: 400.0,
            area_y: 400.0,
            z_min: 50.0,
            z_max: 120.0,
            altitude: 75.0,
            d_max: 30.0,
            t_max: 1.0,
            v_max: 30,
            f_max: 100e9,
            theta_max: std::f64::consts::FRAC_PI_4,
            bandwidth: 10e6,
            g0: 1.42e-4,
            gain_g0: 2.2846,
            noise_dbm: -90.0,
            e_max: 1e6,
            k_z: 0.0025,
            penalty: 100.0,
        }
    }
}

pub(crate) fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

impl TryFrom<SystemConfig> for SystemParams {
    type Error = Error;

    fn try_from(c: SystemConfig) -> Result<Self> {
        let p = SystemParams {
            area_x: c.area_x,
            area_y: c.area_y,
            z_min: c.z_min,
            z_max: c.z_max,
            altitude: c.altitude,
            d_max: c.d_max,
            t_max: c.t_max,
            v_max: c.v_max,
            f_max: c.f_max,
            theta_max: c.theta_max,
            bandwidth: c.bandwidth,
            g0: c.g0,
            gain_g0: c.gain_g0,
            sigma2: dbm_to_watts(c.noise_dbm),
            e_max: c.e_max,
            k_z: c.k_z,
            penalty: c.penalty,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<SystemParams> for SystemConfig {
    fn from(p: SystemParams) -> Self {
        SystemConfig {
            area_x: p.area_x,
            area_y: p.area_y,
            z_min: p.z_min,
            z_max: p.z_max,
            altitude: p.altitude,
            d_max: p.d_max,
            t_max: p.t_max,
            v_max: p.v_max,
            f_max: p.f_max,
            theta_max: p.theta_max,
            bandwidth: p.bandwidth,
            g0: p.g0,
            gain_g0: p.gain_g0,
            noise_dbm: watts_to_dbm(p.sigma2),
            e_max: p.e_max,
            k_z: p.k_z,
            penalty: p.penalty,
        }
    }
}

/// Air-to-ground channel constants. Path-loss excesses are in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtgChannelParams {
    pub eta_los: f64,
    pub eta_nlos: f64,
    pub a_env: f64,
    pub b_env: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
    pub c_light: f64,
}

impl Default for AtgChannelParams {
    fn default() -> Self {
        Self { eta_los: 1.6, eta_nlos: 23.0, a_env: 12.08, b_env: 0.11, f_c: 2.5e9, c_light: 3e8 }
    }
}

impl AtgChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_los >= 0.0 && self.eta_nlos >= self.eta_los) {
            return Err(Error::Config(format!(
                "atg: need 0 <= eta_los <= eta_nlos, got {} / {}",
                self.eta_los, self.eta_nlos
            )));
        }
        for (name, v) in [("a_env", self.a_env), ("b_env", self.b_env), ("f_c", self.f_c), ("c_light", self.c_light)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("atg.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Rotary-wing propulsion constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropulsionParams {
    /// Blade profile power at hover, W.
    pub p_o: f64,
    /// Induced power at hover, W.
    pub p_s: f64,
    /// Rotor blade tip speed, m/s.
    pub u_b: f64,
    /// Mean rotor induced velocity at hover, m/s.
    pub v_h: f64,
    /// Fuselage drag ratio.
    pub d_0: f64,
    pub rho_a: f64,
    /// Rotor solidity.
    pub r_s: f64,
    /// Rotor radius, m.
    pub r_r: f64,
    /// Aircraft mass, kg.
    pub mass: f64,
    pub gravity: f64,
}

impl Default for PropulsionParams {
    fn default() -> Self {
        Self {
            p_o: 79.86,
            p_s: 88.63,
            u_b: 120.0,
            v_h: 4.03,
            d_0: 0.6,
            rho_a: 1.25,
            r_s: 0.05,
            r_r: 0.4,
            mass: 2.0,
            gravity: 10.0,
        }
    }
}

impl PropulsionParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_o", self.p_o),
            ("p_s", self.p_s),
            ("u_b", self.u_b),
            ("v_h", self.v_h),
            ("d_0", self.d_0),
            ("rho_a", self.rho_a),
            ("r_s", self.r_s),
            ("r_r", self.r_r),
            ("mass", self.mass),
            ("gravity", self.gravity),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("propulsion.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_converts_from_dbm() {
        let p = SystemParams::default();
        assert!((p.sigma2 - 1e-12).abs() <= 1e-12 * 1e-12);
        assert!((p.alpha() - 1.42e-4 * 2.2846 / 1e-12).abs() / p.alpha() < 1e-12);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(serde_json::from_str::<SystemParams>(r#"{"area_x": 10, "bogus": 1}"#).is_err());
        assert!(serde_json::from_str::<SystemParams>(r#"{"t_max": 0}"#).is_err());
        assert!(serde_json::from_str::<SystemParams>(r#"{"theta_max": 1.6}"#).is_err());
        let p: SystemParams = serde_json::from_str(r#"{"area_x": 100}"#).unwrap();
        assert_eq!(p.area_x, 100.0);
        assert_eq!(p.area_y, 400.0);
    }
}
