use std::f64::consts::FRAC_PI_2;

use super::PropulsionParams;

/// Rotary-wing propulsion power in W at speed `v` and vertical angle
/// `theta_v` (angle from the +Z axis; π/2 is level flight).
///
/// The climb term `w·g·v·cos θ_v` goes negative when descending.
pub fn propulsion_power(v: f64, theta_v: f64, pp: &PropulsionParams) -> f64 {
    let blade = pp.p_o * (1.0 + 3.0 * (v / pp.u_b).powi(2));
    // sqrt(1 + x²) − x with x = v²/(2V_h²), rewritten to avoid cancellation.
    let x = v * v / (2.0 * pp.v_h * pp.v_h);
    let inner = 1.0 / ((1.0 + x * x).sqrt() + x);
    debug_assert!(inner >= 0.0);
    let induced = pp.p_s * inner.sqrt();
    let parasite = FRAC_PI_2 * pp.d_0 * pp.rho_a * pp.r_s * pp.r_r * pp.r_r * v.powi(3);
    let climb = pp.mass * pp.gravity * v * theta_v.cos();
    blade + induced + parasite + climb
}

/// Power actually drawn from the battery. Descent cannot recharge it: the
/// draw never falls below the blade-profile power at the same speed.
pub fn battery_draw(v: f64, theta_v: f64, pp: &PropulsionParams) -> f64 {
    let floor = pp.p_o * (1.0 + 3.0 * (v / pp.u_b).powi(2));
    propulsion_power(v, theta_v, pp).max(floor)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryStep {
    pub remaining: f64,
    pub depleted: bool,
}

/// Discharges `power·T_max` from the battery, flooring at zero.
pub fn battery_step(battery: f64, power: f64, t_max: f64) -> BatteryStep {
    let next = battery - power * t_max;
    if next <= 0.0 {
        BatteryStep { remaining: 0.0, depleted: true }
    } else {
        BatteryStep { remaining: next, depleted: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hover_power() {
        let pp = PropulsionParams::default();
        assert!(rel(propulsion_power(0.0, FRAC_PI_2, &pp), 168.49) < 1e-12);
        assert!(rel(propulsion_power(0.0, 0.0, &pp), 168.49) < 1e-12);
    }

    #[test]
    fn level_cruise_golden() {
        // 79.86·(1+3/16) + 88.63·sqrt(sqrt(1 + 30⁴/(4·4.03⁴)) − 30²/(2·4.03²)) + π/2·0.6·1.25·0.05·0.16·30³
        let pp = PropulsionParams::default();
        let p = propulsion_power(30.0, FRAC_PI_2, &pp);
        assert!(rel(p, 361.206_780_860_525) < 1e-12, "{p}");
    }

    #[test]
    fn descent_credit() {
        let pp = PropulsionParams::default();
        let level = propulsion_power(10.0, FRAC_PI_2, &pp);
        let down = propulsion_power(10.0, PI, &pp);
        assert!(rel(level - down, 2.0 * 10.0 * 10.0) < 1e-9);
        assert!(propulsion_power(30.0, PI, &pp) < 0.0);
        assert!(battery_draw(30.0, PI, &pp) > 0.0);
        assert_eq!(battery_draw(30.0, FRAC_PI_2, &pp), propulsion_power(30.0, FRAC_PI_2, &pp));
    }

    #[test]
    fn battery_examples() {
        let s = battery_step(1e6, 168.49, 1.0);
        assert!(rel(s.remaining, 999_831.51) < 1e-12);
        assert!(!s.depleted);
        assert_eq!(battery_step(0.0, 50.0, 1.0), BatteryStep { remaining: 0.0, depleted: true });
        assert_eq!(battery_step(500.0, 0.0, 1.0).remaining, 500.0);
        assert!(battery_step(100.0, 200.0, 1.0).depleted);
    }

    proptest! {
        #[test]
        fn non_negative_when_not_descending(v in 0.0f64..30.0, tv in 0.0f64..FRAC_PI_2) {
            prop_assert!(propulsion_power(v, tv, &PropulsionParams::default()) >= 0.0);
        }

        #[test]
        fn draw_is_positive(v in 0.0f64..30.0, tv in 0.0f64..PI) {
            prop_assert!(battery_draw(v, tv, &PropulsionParams::default()) > 0.0);
        }
    }
}
