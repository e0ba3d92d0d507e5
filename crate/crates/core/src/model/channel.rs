use std::f64::consts::{FRAC_PI_2, PI};

use super::{AtgChannelParams, SystemParams, UavState, UserEquipment};
use crate::{Error, Result};

/// Radius of the horizontal service disc, `Z·tan(θ_max)`.
pub fn coverage_radius(altitude: f64, theta_max: f64) -> Result<f64> {
    if !(theta_max > 0.0 && theta_max < FRAC_PI_2) {
        return Err(Error::Domain(format!("theta_max must lie in (0, π/2), got {theta_max}")));
    }
    if altitude.is_nan() || altitude <= 0.0 {
        return Err(Error::Domain(format!("altitude must be positive, got {altitude}")));
    }
    Ok(altitude * theta_max.tan())
}

/// Free-space uplink rate `B·log2(1 + αP/(Z² + R²))` in bits/s.
pub fn free_space_rate(ue: &UserEquipment, uav: &UavState, sys: &SystemParams) -> f64 {
    let r = uav.horizontal_distance(ue.position);
    let z = uav.altitude();
    sys.bandwidth * (1.0 + sys.alpha() * ue.tx_power / (z * z + r * r)).log2()
}

/// Elevation angle from the UE to the UAV in radians; directly overhead is π/2.
pub fn elevation_angle(altitude: f64, horizontal: f64) -> f64 {
    if horizontal == 0.0 {
        FRAC_PI_2
    } else {
        (altitude / horizontal).atan()
    }
}

/// Mean air-to-ground path loss in dB.
///
/// The LoS-probability sigmoid takes the elevation angle in degrees, which is
/// the convention the `a`/`b` environment constants are fitted for.
pub fn atg_path_loss_db(distance: f64, elevation: f64, atg: &AtgChannelParams) -> f64 {
    let theta_deg = elevation.to_degrees();
    let los_excess = (atg.eta_los - atg.eta_nlos) / (1.0 + atg.a_env * (-atg.b_env * (theta_deg - atg.a_env)).exp());
    los_excess
        + 20.0 * distance.log10()
        + 20.0 * (4.0 * PI * atg.f_c / atg.c_light).log10()
        + atg.eta_nlos
}

/// Air-to-ground uplink rate `B·log2(1 + (P/σ²)·10^(−L/10))` in bits/s.
pub fn atg_rate(ue: &UserEquipment, uav: &UavState, sys: &SystemParams, atg: &AtgChannelParams) -> f64 {
    let r = uav.horizontal_distance(ue.position);
    let z = uav.altitude();
    let d = z.hypot(r);
    let loss = atg_path_loss_db(d, elevation_angle(z, r), atg);
    sys.bandwidth * (1.0 + ue.tx_power / sys.sigma2 * 10f64.powf(-loss / 10.0)).log2()
}
