//! Comparison policies: local execution (LE), random moving (RM), cluster
//! moving (CM) and DDPG with uniform replay. All except LE associate users
//! with the greedy matcher.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cat::{dist2, Trajectory};
use crate::env::{run_episode, EpisodeLog, Pilot};
use crate::kmeans::kmeans;
use crate::model::{local_energy, Mode, Physics, UavAction, UserEquipment, WorldState};
use crate::rat::{EpochRecord, Trainer};
use crate::scenario::{stream_rng, Scenario, Stream};

/// Total energy when every task runs locally.
pub fn run_le(scenario: &Scenario) -> f64 {
    let t_max = scenario.config.system.t_max;
    // summed per slot first, like an episode log
    scenario
        .tasks
        .iter()
        .map(|slot| slot.iter().zip(&scenario.ues).map(|(task, ue)| local_energy(task, ue, t_max).energy).sum::<f64>())
        .sum()
}

/// Uniformly random heading and distance (and vertical angle in 3-D).
pub struct RandomPilot {
    pub rng: ChaCha8Rng,
    pub mode: Mode,
    pub d_max: f64,
}

impl Pilot for RandomPilot {
    fn actions(&mut self, _slot: usize, world: &WorldState) -> Vec<UavAction> {
        world
            .uavs
            .iter()
            .map(|_| {
                let theta_h = self.rng.gen_range(0.0..=TAU);
                let theta_v = match self.mode {
                    Mode::TwoD => PI / 2.0,
                    Mode::ThreeD => self.rng.gen_range(0.0..=PI),
                };
                let dist = self.rng.gen_range(0.0..=self.d_max);
                UavAction { theta_h, theta_v, dist }
            })
            .collect()
    }
}

pub fn run_rm(scenario: &Scenario, takeoff: &[[f64; 2]], seed: u64) -> EpisodeLog {
    let physics = scenario.physics();
    let mut pilot = RandomPilot { rng: stream_rng(seed, Stream::RandomPolicy), mode: physics.mode, d_max: physics.sys.d_max };
    let start = WorldState::new(scenario.ues.clone(), scenario.start_states(takeoff));
    run_episode(&mut pilot, start, &scenario.tasks, &physics)
}

/// Follows precomputed horizontal waypoints with level flight.
pub struct WaypointPilot {
    pub trajectory: Trajectory,
}

impl Pilot for WaypointPilot {
    fn actions(&mut self, slot: usize, world: &WorldState) -> Vec<UavAction> {
        world
            .uavs
            .iter()
            .enumerate()
            .map(|(j, uav)| {
                let [x, y] = self.trajectory.point(j, slot);
                let (dx, dy) = (x - uav.position[0], y - uav.position[1]);
                UavAction::level(dy.atan2(dx).rem_euclid(TAU), dx.hypot(dy))
            })
            .collect()
    }
}

/// Cluster centers in touring order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPath {
    pub centers: Vec<[f64; 2]>,
}

impl ClusterPath {
    /// k-means over UE positions (20 Lloyd iterations, best of 5 seeded
    /// restarts), centers sorted by angle around the UE centroid.
    pub fn build(ues: &[UserEquipment], n_clusters: usize, seed: u64) -> Self {
        let pts: Vec<[f64; 2]> = ues.iter().map(|u| u.position).collect();
        let k = n_clusters.clamp(1, pts.len().max(1));
        if pts.is_empty() {
            return Self { centers: Vec::new() };
        }
        let c = kmeans(&pts, k, 20, 5, &mut stream_rng(seed, Stream::Clustering));
        let n = pts.len() as f64;
        let mid = [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n];
        let mut centers = c.centers;
        centers.sort_by(|a, b| {
            let aa = (a[1] - mid[1]).atan2(a[0] - mid[0]);
            let ab = (b[1] - mid[1]).atan2(b[0] - mid[0]);
            aa.total_cmp(&ab).then(a[0].total_cmp(&b[0])).then(a[1].total_cmp(&b[1]))
        });
        Self { centers }
    }

    /// Per-UAV routes from the take-off points. Each UAV heads for the nearest
    /// center not already claimed by a lower-id UAV (the nearest overall once
    /// all are claimed) and then tours the remaining centers in order. Each
    /// leg gets `T / k` slots with the remainder going to the last leg, and
    /// each slot covers `min(d_max, remaining / slots_left)` of the leg.
    pub fn trajectory(&self, takeoff: &[[f64; 2]], n_slots: usize, d_max: f64) -> Trajectory {
        let k = self.centers.len();
        let mut claimed = vec![false; k];
        let waypoints = takeoff
            .iter()
            .map(|&start| {
                if k == 0 {
                    return vec![start; n_slots + 1];
                }
                let nearest = |free_only: bool, claimed: &[bool]| {
                    (0..k)
                        .filter(|&c| !free_only || !claimed[c])
                        .min_by(|&a, &b| dist2(start, self.centers[a]).total_cmp(&dist2(start, self.centers[b])).then(a.cmp(&b)))
                };
                let first = nearest(true, &claimed).or_else(|| nearest(false, &claimed)).expect("k > 0");
                claimed[first] = true;
                let per_leg = (n_slots / k).max(1);
                let mut pts = vec![start];
                let mut pos = start;
                for t in 0..n_slots {
                    let leg = (t / per_leg).min(k - 1);
                    let leg_end = if leg == k - 1 { n_slots } else { (leg + 1) * per_leg };
                    let target = self.centers[(first + leg) % k];
                    let remaining = dist2(pos, target).sqrt();
                    let step = d_max.min(remaining / (leg_end - t) as f64);
                    if remaining > 0.0 && step > 0.0 {
                        let f = (step / remaining).min(1.0);
                        pos = if f >= 1.0 { target } else { [pos[0] + f * (target[0] - pos[0]), pos[1] + f * (target[1] - pos[1])] };
                    }
                    pts.push(pos);
                }
                pts
            })
            .collect();
        Trajectory::new(waypoints)
    }
}

/// CM route for one take-off configuration of a scenario.
pub fn cm_trajectory(scenario: &Scenario, takeoff: &[[f64; 2]]) -> Trajectory {
    let cfg = &scenario.config;
    ClusterPath::build(&scenario.ues, cfg.clusters(), cfg.seed).trajectory(takeoff, scenario.n_slots(), cfg.system.d_max)
}

pub fn run_cm(scenario: &Scenario, takeoff: &[[f64; 2]]) -> EpisodeLog {
    run_trajectory(scenario, cm_trajectory(scenario, takeoff))
}

/// Flies a fixed trajectory and associates by matching.
pub fn run_trajectory(scenario: &Scenario, trajectory: Trajectory) -> EpisodeLog {
    let physics: Physics = scenario.physics();
    let takeoff: Vec<[f64; 2]> = trajectory.waypoints.iter().map(|w| w[0]).collect();
    let start = WorldState::new(scenario.ues.clone(), scenario.start_states(&takeoff));
    run_episode(&mut WaypointPilot { trajectory }, start, &scenario.tasks, &physics)
}

/// DDPG trained with uniform replay on the scenario's hyperparameters.
pub fn run_ddpg_uniform(scenario: &Scenario, epochs: usize) -> (Trainer, Vec<EpochRecord>) {
    let mut trainer = Trainer::uniform(scenario, &scenario.config.rat);
    let trace = trainer.train(scenario, epochs);
    (trainer, trace)
}
