//! Running every algorithm on a scenario and summarizing the results.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{cm_trajectory, run_cm, run_le, run_rm};
use crate::baselines::WaypointPilot;
use crate::cat::{circle_trajectory, run_cat, CatIteration, CatTrace, Trajectory};
use crate::env::{reward, EpisodeLog, Pilot, SlotLog};
use crate::error::{Error, Result};
use crate::matching::ue_energies;
use crate::model::WorldState;
use crate::rat::{evaluate, Agent};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Le,
    Rm,
    Cm,
    Cat,
    Rat,
    Ddpg,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [Algorithm::Le, Algorithm::Rm, Algorithm::Cm, Algorithm::Cat, Algorithm::Rat, Algorithm::Ddpg];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Le => "LE",
            Algorithm::Rm => "RM",
            Algorithm::Cm => "CM",
            Algorithm::Cat => "CAT",
            Algorithm::Rat => "RAT",
            Algorithm::Ddpg => "DDPG",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// Initial trajectory for the convex planner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitScheme {
    /// Circle of the given radius around the UE centroid.
    Circle(f64),
    /// Cluster-moving route from a take-off configuration.
    Cluster,
}

impl FromStr for InitScheme {
    type Err = Error;

    /// `cluster` or `circle:<radius>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "cluster" {
            return Ok(InitScheme::Cluster);
        }
        s.strip_prefix("circle:")
            .and_then(|r| r.parse::<f64>().ok())
            .filter(|r| r.is_finite() && *r >= 0.0)
            .map(InitScheme::Circle)
            .ok_or_else(|| Error::Config(format!("unknown initial trajectory `{s}` (cluster | circle:<radius>)")))
    }
}

pub fn initial_trajectory(scenario: &Scenario, scheme: InitScheme, takeoff: &[[f64; 2]]) -> Trajectory {
    let cfg = &scenario.config;
    match scheme {
        InitScheme::Circle(r) => circle_trajectory(&scenario.ues, cfg.n_uavs, scenario.n_slots(), r, &cfg.system),
        InitScheme::Cluster => cm_trajectory(scenario, takeoff),
    }
}

pub fn run_cat_from(scenario: &Scenario, scheme: InitScheme, takeoff: &[[f64; 2]]) -> CatTrace {
    let g0 = initial_trajectory(scenario, scheme, takeoff);
    run_cat(&g0, &scenario.ues, &scenario.tasks, &scenario.config.system, &scenario.config.cat)
}

/// Per-slot log of a CAT iterate, served with its exact assignment rather
/// than the greedy matcher.
pub fn cat_episode(scenario: &Scenario, it: &CatIteration) -> EpisodeLog {
    let physics = scenario.physics();
    let sys = &physics.sys;
    let traj = &it.trajectory;
    let takeoff: Vec<[f64; 2]> = traj.waypoints.iter().map(|w| w[0]).collect();
    let mut world = WorldState::new(scenario.ues.clone(), scenario.start_states(&takeoff));
    let mut pilot = WaypointPilot { trajectory: traj.clone() };
    let mut slots = Vec::with_capacity(scenario.n_slots());
    for (t, tasks) in scenario.tasks.iter().enumerate() {
        let actions = pilot.actions(t, &world);
        let next = WorldState::new(scenario.ues.clone(), traj.uav_states(t, sys.altitude));
        let association = it.assignment[t].clone();
        let ue_energy = ue_energies(&association, tasks, &next, &physics);
        let energy: f64 = ue_energy.iter().sum();
        slots.push(SlotLog {
            slot: t,
            actions,
            uavs: next.uavs.clone(),
            power: vec![0.0; traj.n_uavs()],
            violated: vec![false; traj.n_uavs()],
            association,
            ue_energy,
            energy,
            uav_energy: 0.0,
            reward: reward(energy, 0.0, 0, &physics),
        });
        world = next;
    }
    EpisodeLog { takeoff: scenario.start_states(&takeoff), slots }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    /// Take-off index for planners, seed index for RM.
    pub run: usize,
    /// Total UE energy, J.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// UE energy of one run of `algorithm` from `takeoff`. Learned policies need
/// an agent.
pub fn run_one(
    scenario: &Scenario,
    algorithm: Algorithm,
    takeoff: &[[f64; 2]],
    run: usize,
    agent: Option<&Agent>,
) -> Result<RunResult> {
    let energy = match algorithm {
        Algorithm::Le => run_le(scenario),
        Algorithm::Rm => run_rm(scenario, takeoff, scenario.config.seed.wrapping_add(run as u64)).energy(),
        Algorithm::Cm => run_cm(scenario, takeoff).energy(),
        Algorithm::Cat => run_cat_from(scenario, InitScheme::Cluster, takeoff).final_objective(),
        Algorithm::Rat | Algorithm::Ddpg => {
            let agent = agent.ok_or_else(|| Error::Config(format!("{algorithm} needs a trained agent")))?;
            evaluate(agent, scenario, &[takeoff.to_vec()])[0].energy()
        }
    };
    Ok(RunResult { algorithm, run, energy })
}

/// Mean and standard deviation per algorithm, in the order algorithms first
/// appear.
pub fn summarize(results: &[RunResult]) -> Vec<Summary> {
    let mut order: Vec<Algorithm> = Vec::new();
    for r in results {
        if !order.contains(&r.algorithm) {
            order.push(r.algorithm);
        }
    }
    order
        .into_iter()
        .map(|algorithm| {
            let e: Vec<f64> = results.iter().filter(|r| r.algorithm == algorithm).map(|r| r.energy).collect();
            let n = e.len() as f64;
            let mean = e.iter().sum::<f64>() / n;
            let var = e.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            Summary { algorithm, runs: e.len(), mean, std: var.sqrt() }
        })
        .collect()
}
