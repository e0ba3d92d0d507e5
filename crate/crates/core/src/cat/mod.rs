//! Convex-optimization planner: block coordinate descent over
//! (association, CPU allocation) and UAV trajectory, in 2-D mode.
//!
//! The association block is solved exactly per slot by branch and bound.
//! The trajectory block replaces each rate by its tangent lower bound in the
//! squared UE distance and solves the resulting convex program with an
//! exterior-penalty gradient method. A trajectory update is only accepted when
//! it keeps the previous association feasible and does not raise the true
//! objective, which makes the outer loop monotone.

mod assignment;
mod bcd;
mod sca;
mod trajectory;

pub use assignment::{branch_and_bound, solve_assignment, SlotAssignment};
pub use bcd::{circle_trajectory, run_cat, CatIteration, CatOptions, CatTrace};
pub use sca::{linearize, sca_coefficients, ScaLinearization};
pub use trajectory::{solve_trajectory, true_objective, TrajectoryOptions, TrajectoryUpdate};

use serde::{Deserialize, Serialize};

use crate::model::{SystemParams, UavState, WorldState};
use crate::model::UserEquipment;

/// Horizontal waypoints per UAV. `waypoints[j][0]` is the take-off point and
/// slot `t` (0-based) is flown at `waypoints[j][t + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Vec<[f64; 2]>>,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Vec<[f64; 2]>>) -> Self {
        Self { waypoints }
    }

    pub fn n_uavs(&self) -> usize {
        self.waypoints.len()
    }

    pub fn n_slots(&self) -> usize {
        self.waypoints.first().map_or(0, |w| w.len().saturating_sub(1))
    }

    pub fn point(&self, uav: usize, slot: usize) -> [f64; 2] {
        self.waypoints[uav][slot + 1]
    }

    /// UAV states during `slot` at the fixed altitude.
    pub fn uav_states(&self, slot: usize, altitude: f64) -> Vec<UavState> {
        self.waypoints
            .iter()
            .map(|w| {
                let [x, y] = w[slot + 1];
                UavState::new([x, y, altitude], 0.0)
            })
            .collect()
    }

    pub fn world(&self, ues: &[UserEquipment], slot: usize, altitude: f64) -> WorldState {
        WorldState::new(ues.to_vec(), self.uav_states(slot, altitude))
    }

    /// Inside the box with every hop at most `d_max`.
    /// Box and step limits, with steps allowed a relative round-off of 1e-9.
    pub fn is_feasible(&self, sys: &SystemParams) -> bool {
        let reach = sys.d_max * (1.0 + 1e-9);
        self.waypoints.iter().all(|w| {
            w.iter().all(|p| (0.0..=sys.area_x).contains(&p[0]) && (0.0..=sys.area_y).contains(&p[1]))
                && w.windows(2).all(|pair| dist2(pair[0], pair[1]) <= reach * reach)
        })
    }

    pub fn max_step(&self) -> f64 {
        self.waypoints
            .iter()
            .flat_map(|w| w.windows(2).map(|p| dist2(p[0], p[1]).sqrt()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}
