//! Slot-by-slot simulation shared by the learned agent and the baselines:
//! move every UAV, associate UEs by matching, account energy and reward.

use serde::{Deserialize, Serialize};

use crate::matching::{associate, ue_energies, Association};
use crate::model::{battery_step, Mode, Physics, Task, UavAction, UavState, WorldState};

/// Chooses UAV actions slot by slot.
pub trait Pilot {
    fn actions(&mut self, slot: usize, world: &WorldState) -> Vec<UavAction>;
}

/// Everything that happened in one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotLog {
    pub slot: usize,
    pub actions: Vec<UavAction>,
    /// UAV states after the move, which is where the slot is served from.
    pub uavs: Vec<UavState>,
    /// Battery draw of each UAV during the move, W. Zero in 2-D mode.
    pub power: Vec<f64>,
    pub violated: Vec<bool>,
    pub association: Association,
    pub ue_energy: Vec<f64>,
    /// Total UE energy, J.
    pub energy: f64,
    /// Propulsion energy of all UAVs, J. Zero in 2-D mode.
    pub uav_energy: f64,
    /// Unscaled reward.
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub takeoff: Vec<UavState>,
    pub slots: Vec<SlotLog>,
}

impl EpisodeLog {
    pub fn energy(&self) -> f64 {
        self.slots.iter().map(|s| s.energy).sum()
    }

    pub fn uav_energy(&self) -> f64 {
        self.slots.iter().map(|s| s.uav_energy).sum()
    }

    pub fn reward(&self) -> f64 {
        self.slots.iter().map(|s| s.reward).sum()
    }

    pub fn violations(&self) -> usize {
        self.slots.iter().flat_map(|s| &s.violated).filter(|v| **v).count()
    }
}

/// `−E_UE − k_z·E_UAV − p·violations`; the UAV term only counts in 3-D mode.
pub fn reward(ue_energy: f64, uav_energy: f64, violations: usize, physics: &Physics) -> f64 {
    let uav = match physics.mode {
        Mode::TwoD => 0.0,
        Mode::ThreeD => physics.sys.k_z * uav_energy,
    };
    -ue_energy - uav - physics.sys.penalty * violations as f64
}

/// Advances `world` by one slot under `actions`.
pub fn step(world: &WorldState, actions: &[UavAction], tasks: &[Task], physics: &Physics, slot: usize) -> (WorldState, SlotLog) {
    let t_max = physics.sys.t_max;
    let mut uavs = Vec::with_capacity(world.uavs.len());
    let mut power = Vec::with_capacity(world.uavs.len());
    let mut violated = Vec::with_capacity(world.uavs.len());
    for (uav, action) in world.uavs.iter().zip(actions) {
        let (mut next, v) = physics.step(uav, action);
        let p = match physics.mode {
            Mode::TwoD => 0.0,
            Mode::ThreeD => physics.flight_power(action),
        };
        if physics.mode == Mode::ThreeD {
            next.battery = battery_step(uav.battery, p, t_max).remaining;
        }
        uavs.push(next);
        power.push(p);
        violated.push(v);
    }
    let next = WorldState::new(world.ues.clone(), uavs);
    let association = associate(&next, tasks, physics);
    let ue_energy = ue_energies(&association, tasks, &next, physics);
    let energy: f64 = ue_energy.iter().sum();
    let uav_energy: f64 = power.iter().map(|p| p * t_max).sum();
    let n_violations = violated.iter().filter(|v| **v).count();
    let log = SlotLog {
        slot,
        actions: actions.to_vec(),
        uavs: next.uavs.clone(),
        power,
        violated,
        association,
        ue_energy,
        energy,
        uav_energy,
        reward: reward(energy, uav_energy, n_violations, physics),
    };
    (next, log)
}

/// Flies a whole episode from `start`.
pub fn run_episode<P: Pilot + ?Sized>(
    pilot: &mut P,
    start: WorldState,
    tasks: &[Vec<Task>],
    physics: &Physics,
) -> EpisodeLog {
    let takeoff = start.uavs.clone();
    let mut world = start;
    let mut slots = Vec::with_capacity(tasks.len());
    for (t, slot_tasks) in tasks.iter().enumerate() {
        let actions = pilot.actions(t, &world);
        let (next, log) = step(&world, &actions, slot_tasks, physics, t);
        slots.push(log);
        world = next;
    }
    EpisodeLog { takeoff, slots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SystemParams, UserEquipment};

    struct Hover;

    impl Pilot for Hover {
        fn actions(&mut self, _: usize, world: &WorldState) -> Vec<UavAction> {
            vec![UavAction::hover(); world.uavs.len()]
        }
    }

    struct East;

    impl Pilot for East {
        fn actions(&mut self, _: usize, world: &WorldState) -> Vec<UavAction> {
            vec![UavAction::level(0.0, 30.0); world.uavs.len()]
        }
    }

    fn ue() -> UserEquipment {
        UserEquipment { position: [200.0, 200.0], tx_power: 0.1, kappa: 1e-28, nu: 3.0 }
    }

    #[test]
    fn zero_tasks_cost_only_penalties() {
        let physics = Physics::two_d(SystemParams::default());
        let start = WorldState::new(vec![ue()], vec![UavState::new([390.0, 10.0, 75.0], 0.0)]);
        let tasks = vec![vec![Task::default()]; 3];
        let log = run_episode(&mut East, start, &tasks, &physics);
        assert_eq!(log.energy(), 0.0);
        assert_eq!(log.violations(), 3);
        assert_eq!(log.reward(), -300.0);
    }

    #[test]
    fn three_d_hover_reward() {
        let sys = SystemParams::default();
        let physics = Physics::three_d(sys, Default::default(), Default::default());
        let start = WorldState::new(vec![ue()], vec![UavState::new([10.0, 10.0, 50.0], sys.e_max)]);
        let log = run_episode(&mut Hover, start, &[vec![Task::default()]], &physics);
        assert!((log.reward() + 0.0025 * 168.49).abs() < 1e-9);
        assert!((log.slots[0].uavs[0].battery - (1e6 - 168.49)).abs() < 1e-6);
    }

    #[test]
    fn two_d_reward_is_never_positive() {
        let physics = Physics::two_d(SystemParams::default());
        let start = WorldState::new(vec![ue()], vec![UavState::new([200.0, 190.0, 75.0], 0.0)]);
        let log = run_episode(&mut Hover, start, &vec![vec![Task::new(4e5, 1e10)]; 2], &physics);
        assert!(log.slots.iter().all(|s| s.reward <= 0.0));
        assert_eq!(log.slots[0].association.assign, vec![Some(0)]);
    }
}
