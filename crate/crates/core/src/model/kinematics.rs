use serde::{Deserialize, Serialize};

use super::{Mode, SystemParams, UavAction, UavState};

/// Vertical update rule in 3-D mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Kinematics {
    /// `ΔZ = d·cos θ_v`, dimensionally consistent with the horizontal update.
    #[default]
    Consistent,
    /// `ΔZ = cos θ_v`, without the distance factor.
    StrictPaper,
}

/// Moves a UAV by one slot. Coordinates leaving the box (or, in 3-D, the
/// altitude band) are clamped to the boundary and the move is flagged.
pub fn apply_action(
    state: &UavState,
    action: &UavAction,
    sys: &SystemParams,
    mode: Mode,
    kinematics: Kinematics,
) -> (UavState, bool) {
    let [x, y, z] = state.position;
    let (dx, dy, dz) = match mode {
        Mode::TwoD => (action.dist * action.theta_h.cos(), action.dist * action.theta_h.sin(), 0.0),
        Mode::ThreeD => {
            let horizontal = action.dist * action.theta_v.sin();
            let dz = match kinematics {
                Kinematics::Consistent => action.dist * action.theta_v.cos(),
                Kinematics::StrictPaper => action.theta_v.cos(),
            };
            (horizontal * action.theta_h.cos(), horizontal * action.theta_h.sin(), dz)
        }
    };

    let mut violated = false;
    let mut clamp = |v: f64, lo: f64, hi: f64| {
        if v < lo {
            violated = true;
            lo
        } else if v > hi {
            violated = true;
            hi
        } else {
            v
        }
    };
    let nx = clamp(x + dx, 0.0, sys.area_x);
    let ny = clamp(y + dy, 0.0, sys.area_y);
    let nz = match mode {
        Mode::TwoD => z,
        Mode::ThreeD => clamp(z + dz, sys.z_min, sys.z_max),
    };
    (UavState { position: [nx, ny, nz], battery: state.battery }, violated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn axis_aligned_step() {
        let sys = SystemParams::default();
        let (s, v) = apply_action(
            &UavState::new([0.0, 0.0, 75.0], 0.0),
            &UavAction::level(0.0, 30.0),
            &sys,
            Mode::TwoD,
            Kinematics::Consistent,
        );
        assert_eq!(s.position, [30.0, 0.0, 75.0]);
        assert!(!v);
    }

    #[test]
    fn clamps_at_the_boundary() {
        let sys = SystemParams::default();
        let (s, v) = apply_action(
            &UavState::new([395.0, 200.0, 75.0], 0.0),
            &UavAction::level(0.0, 30.0),
            &sys,
            Mode::TwoD,
            Kinematics::Consistent,
        );
        assert_eq!(s.position, [400.0, 200.0, 75.0]);
        assert!(v);
    }

    #[test]
    fn vertical_step_uses_distance() {
        let sys = SystemParams::default();
        let start = UavState::new([0.0, 0.0, 50.0], 1e6);
        let up = UavAction { theta_h: 0.0, theta_v: 0.0, dist: 10.0 };
        let (s, v) = apply_action(&start, &up, &sys, Mode::ThreeD, Kinematics::Consistent);
        assert_eq!(s.position, [0.0, 0.0, 60.0]);
        assert!(!v);
        let (s, _) = apply_action(&start, &up, &sys, Mode::ThreeD, Kinematics::StrictPaper);
        assert_eq!(s.position, [0.0, 0.0, 51.0]);
        // descending below the band is clamped
        let down = UavAction { theta_h: 0.0, theta_v: PI, dist: 10.0 };
        let (s, v) = apply_action(&start, &down, &sys, Mode::ThreeD, Kinematics::Consistent);
        assert_eq!(s.position[2], 50.0);
        assert!(v);
    }

    #[test]
    fn two_d_keeps_altitude() {
        let sys = SystemParams::default();
        let a = UavAction { theta_h: 1.0, theta_v: 0.3, dist: 20.0 };
        let (s, _) = apply_action(&UavState::new([100.0, 100.0, 75.0], 0.0), &a, &sys, Mode::TwoD, Kinematics::Consistent);
        assert_eq!(s.position[2], 75.0);
        assert!(((s.position[0] - 100.0).hypot(s.position[1] - 100.0) - 20.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn stays_inside_after_clamping(
            x in 0.0f64..400.0, y in 0.0f64..400.0, z in 50.0f64..120.0,
            th in 0.0f64..(2.0 * PI), tv in 0.0f64..PI, d in 0.0f64..30.0, three_d: bool
        ) {
            let sys = SystemParams::default();
            let mode = if three_d { Mode::ThreeD } else { Mode::TwoD };
            let (s, _) = apply_action(&UavState::new([x, y, z], 0.0), &UavAction { theta_h: th, theta_v: tv, dist: d }, &sys, mode, Kinematics::Consistent);
            prop_assert!((0.0..=400.0).contains(&s.position[0]));
            prop_assert!((0.0..=400.0).contains(&s.position[1]));
            prop_assert!((50.0..=120.0).contains(&s.position[2]));
            if !three_d {
                prop_assert_eq!(s.position[2], z);
            }
        }
    }
}
