use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{solve_assignment, solve_trajectory, Trajectory, TrajectoryOptions};
use crate::matching::Association;
use crate::model::{SystemParams, Task, UserEquipment};

/// Milliseconds since construction. Browsers without an OS clock read 0.
struct Stopwatch(#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))] std::time::Instant);

impl Stopwatch {
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    fn start() -> Self {
        Self(std::time::Instant::now())
    }

    #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
    fn start() -> Self {
        Self()
    }

    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    fn ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }

    #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
    fn ms(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatOptions {
    pub max_iter: usize,
    /// Stop once the relative objective change falls below this.
    pub tol: f64,
    #[serde(skip)]
    pub trajectory: TrajectoryOptions,
}

impl Default for CatOptions {
    fn default() -> Self {
        Self { max_iter: 10, tol: 1e-3, trajectory: TrajectoryOptions::default() }
    }
}

/// State after one assignment solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CatIteration {
    pub iter: usize,
    /// Total UE energy over all slots, J.
    pub objective: f64,
    /// Wall-clock time since the run started. Not reproducible.
    pub wall_ms: f64,
    pub assignment: Vec<Association>,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatTrace {
    pub iterations: Vec<CatIteration>,
}

impl CatTrace {
    pub fn objectives(&self) -> Vec<f64> {
        self.iterations.iter().map(|it| it.objective).collect()
    }

    pub fn last(&self) -> &CatIteration {
        self.iterations.last().expect("a CAT run records at least one iteration")
    }

    pub fn final_objective(&self) -> f64 {
        self.last().objective
    }

    /// True when no step raises the objective by more than `rel` of the
    /// previous value.
    pub fn is_monotone(&self, rel: f64) -> bool {
        self.objectives().windows(2).all(|w| w[1] <= w[0] + rel * w[0].abs())
    }
}

/// Alternates the exact assignment and the trajectory update starting from
/// `g0` until the objective settles or `max_iter` assignments were solved.
pub fn run_cat(
    g0: &Trajectory,
    ues: &[UserEquipment],
    tasks: &[Vec<Task>],
    sys: &SystemParams,
    opts: &CatOptions,
) -> CatTrace {
    let clock = Stopwatch::start();
    let mut g = g0.clone();
    let mut iterations: Vec<CatIteration> = Vec::new();
    for iter in 1..=opts.max_iter.max(1) {
        let a = solve_assignment(&g, ues, tasks, sys);
        let prev = iterations.last().map(|it| it.objective);
        iterations.push(CatIteration {
            iter,
            objective: a.objective,
            wall_ms: clock.ms(),
            assignment: a.per_slot.clone(),
            trajectory: g.clone(),
        });
        let settled = a.objective == 0.0 || prev.is_some_and(|p| (p - a.objective).abs() <= opts.tol * p.abs());
        if settled || iter >= opts.max_iter {
            break;
        }
        g = solve_trajectory(&a.per_slot, &g, ues, tasks, sys, &opts.trajectory).trajectory;
    }
    CatTrace { iterations }
}

/// Centroid of the UE positions, or the area center when there are none.
pub(crate) fn ue_centroid(ues: &[UserEquipment], sys: &SystemParams) -> [f64; 2] {
    if ues.is_empty() {
        return [sys.area_x / 2.0, sys.area_y / 2.0];
    }
    let n = ues.len() as f64;
    let sx: f64 = ues.iter().map(|u| u.position[0]).sum();
    let sy: f64 = ues.iter().map(|u| u.position[1]).sum();
    [sx / n, sy / n]
}

/// UAVs flying counter-clockwise on a circle of `radius` around the UE
/// centroid, spread evenly in phase. The angular step completes the circle
/// over the horizon unless `d_max` forces a shorter chord.
pub fn circle_trajectory(
    ues: &[UserEquipment],
    n_uavs: usize,
    n_slots: usize,
    radius: f64,
    sys: &SystemParams,
) -> Trajectory {
    let c = ue_centroid(ues, sys);
    let mut step = if n_slots == 0 { 0.0 } else { TAU / n_slots as f64 };
    if radius > 0.0 {
        let half = (sys.d_max / (2.0 * radius)).min(1.0);
        step = step.min(2.0 * half.asin() * (1.0 - 1e-9));
    }
    let waypoints = (0..n_uavs)
        .map(|j| {
            let phase = TAU * j as f64 / n_uavs as f64;
            (0..=n_slots)
                .map(|t| {
                    let a = phase + step * t as f64;
                    [
                        (c[0] + radius * a.cos()).clamp(0.0, sys.area_x),
                        (c[1] + radius * a.sin()).clamp(0.0, sys.area_y),
                    ]
                })
                .collect()
        })
        .collect();
    Trajectory::new(waypoints)
}
