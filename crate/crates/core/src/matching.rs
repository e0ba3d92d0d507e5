//! Greedy preference-list matching: per-slot user association and CPU
//! allocation for fixed UAV positions.
//!
//! Each UAV ranks the UEs it covers by the energy they would save by
//! offloading. UAVs then take turns (ascending id) offering a slot to their
//! next candidate; a UE accepts when it is still local or when the offer
//! costs it strictly less transmit energy than its current UAV.

use serde::{Deserialize, Serialize};

use crate::model::{local_energy, offload_cost, required_cpu, Physics, SystemParams, Task, WorldState};

/// One way a UE can offload in the current slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadOption {
    pub uav: usize,
    /// Transmit energy, J.
    pub e_tr: f64,
    /// Minimal CPU share meeting the deadline, Hz.
    pub cpu: f64,
}

/// Local cost of a UE plus every offloading option that strictly saves
/// energy, is in coverage, meets the deadline and fits a UAV's CPU budget.
#[derive(Debug, Clone, PartialEq)]
pub struct UeOptions {
    pub local: f64,
    pub offload: Vec<OffloadOption>,
}

impl UeOptions {
    pub fn best(&self) -> f64 {
        self.offload.iter().map(|o| o.e_tr).fold(self.local, f64::min)
    }
}

/// Evaluates every (UE, UAV) pair for one slot.
pub fn slot_options(world: &WorldState, tasks: &[Task], physics: &Physics) -> Vec<UeOptions> {
    let sys = &physics.sys;
    world
        .ues
        .iter()
        .zip(tasks)
        .map(|(ue, task)| {
            let local = local_energy(task, ue, sys.t_max).energy;
            let mut offload = Vec::new();
            if task.cpu_cycles > 0.0 || task.data_bits > 0.0 {
                for (j, uav) in world.uavs.iter().enumerate() {
                    if !physics.covers(ue, uav) {
                        continue;
                    }
                    let rate = physics.rate(ue, uav);
                    let Ok(cpu) = required_cpu(task, rate, sys.t_max) else { continue };
                    let Ok(cost) = offload_cost(task, rate, cpu, ue.tx_power, sys.t_max) else { continue };
                    if cost.energy < local && cpu <= sys.f_max {
                        offload.push(OffloadOption { uav: j, e_tr: cost.energy, cpu });
                    }
                }
            }
            UeOptions { local, offload }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefEntry {
    pub ue: usize,
    /// `E_L − E_Tr`, J.
    pub saving: f64,
    pub e_tr: f64,
    pub cpu: f64,
}

/// A UAV's candidates, best saving first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PreferenceList {
    pub entries: Vec<PrefEntry>,
}

/// Per-slot association. `assign[i] == None` means the UE runs locally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Association {
    pub assign: Vec<Option<usize>>,
    /// CPU share granted to each UE (0 when local), Hz.
    pub f_c: Vec<f64>,
}

impl Association {
    pub fn all_local(n_ues: usize) -> Self {
        Self { assign: vec![None; n_ues], f_c: vec![0.0; n_ues] }
    }

    pub fn matched_count(&self) -> usize {
        self.assign.iter().filter(|a| a.is_some()).count()
    }

    /// (task count, CPU load) per UAV.
    pub fn loads(&self, n_uavs: usize) -> Vec<(usize, f64)> {
        let mut loads = vec![(0usize, 0.0f64); n_uavs];
        for (a, f) in self.assign.iter().zip(&self.f_c) {
            if let Some(j) = *a {
                loads[j].0 += 1;
                loads[j].1 += f;
            }
        }
        loads
    }

    /// Checks one-place, task cap, CPU budget, coverage and deadline for every
    /// matched UE. Returns a description of the first violation.
    pub fn check(&self, world: &WorldState, tasks: &[Task], physics: &Physics) -> Result<(), String> {
        let sys = &physics.sys;
        if self.assign.len() != world.ues.len() || self.f_c.len() != world.ues.len() {
            return Err("association length differs from UE count".into());
        }
        for (j, (count, load)) in self.loads(world.uavs.len()).into_iter().enumerate() {
            if count > sys.v_max {
                return Err(format!("UAV {j} serves {count} > v_max {}", sys.v_max));
            }
            if load > sys.f_max {
                return Err(format!("UAV {j} CPU load {load} > f_max {}", sys.f_max));
            }
        }
        for (i, a) in self.assign.iter().enumerate() {
            match *a {
                None if self.f_c[i] != 0.0 => return Err(format!("local UE {i} holds CPU {}", self.f_c[i])),
                None => {}
                Some(j) => {
                    let uav = world.uavs.get(j).ok_or_else(|| format!("UE {i} assigned to missing UAV {j}"))?;
                    let ue = &world.ues[i];
                    if !physics.covers(ue, uav) {
                        return Err(format!("UE {i} outside coverage of UAV {j}"));
                    }
                    let rate = physics.rate(ue, uav);
                    let cost = offload_cost(&tasks[i], rate, self.f_c[i], ue.tx_power, sys.t_max)
                        .map_err(|e| format!("UE {i} on UAV {j}: {e}"))?;
                    if cost.total_s > sys.t_max * (1.0 + 1e-9) {
                        return Err(format!("UE {i} on UAV {j} misses the deadline ({} s)", cost.total_s));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds each UAV's preference list, sorted by descending saving with ties
/// going to the lower UE id.
pub fn build_preferences(world: &WorldState, tasks: &[Task], physics: &Physics) -> Vec<PreferenceList> {
    preferences_from_options(&slot_options(world, tasks, physics), world.uavs.len())
}

pub fn preferences_from_options(options: &[UeOptions], n_uavs: usize) -> Vec<PreferenceList> {
    let mut lists = vec![PreferenceList::default(); n_uavs];
    for (i, opt) in options.iter().enumerate() {
        for o in &opt.offload {
            lists[o.uav].entries.push(PrefEntry { ue: i, saving: opt.local - o.e_tr, e_tr: o.e_tr, cpu: o.cpu });
        }
    }
    for list in &mut lists {
        list.entries.sort_by(|a, b| b.saving.total_cmp(&a.saving).then(a.ue.cmp(&b.ue)));
    }
    lists
}

/// Round-robin matching over the preference lists.
///
/// A candidate that fails the task-cap or CPU check is skipped rather than
/// retried, so every list is consumed and the loop terminates.
pub fn match_users(prefs: &[PreferenceList], n_ues: usize, sys: &SystemParams) -> Association {
    let m = prefs.len();
    let mut cursor = vec![0usize; m];
    let mut count = vec![0usize; m];
    let mut load = vec![0.0f64; m];
    let mut assign: Vec<Option<usize>> = vec![None; n_ues];
    let mut e_tr = vec![f64::INFINITY; n_ues];
    let mut f_c = vec![0.0f64; n_ues];

    loop {
        let mut progressed = false;
        for j in 0..m {
            let Some(entry) = prefs[j].entries.get(cursor[j]) else { continue };
            progressed = true;
            cursor[j] += 1;
            if count[j] + 1 > sys.v_max || load[j] + entry.cpu > sys.f_max {
                continue;
            }
            let i = entry.ue;
            let accept = match assign[i] {
                None => true,
                Some(k) => entry.e_tr < e_tr[i] || (entry.e_tr == e_tr[i] && j < k),
            };
            if accept {
                if let Some(k) = assign[i] {
                    count[k] -= 1;
                    load[k] -= f_c[i];
                }
                assign[i] = Some(j);
                e_tr[i] = entry.e_tr;
                f_c[i] = entry.cpu;
                count[j] += 1;
                load[j] += entry.cpu;
            }
        }
        if !progressed {
            break;
        }
    }
    Association { assign, f_c }
}

/// Per-UE energy for an association: transmit energy when offloading,
/// local-execution energy otherwise.
pub fn ue_energies(assoc: &Association, tasks: &[Task], world: &WorldState, physics: &Physics) -> Vec<f64> {
    let t_max = physics.sys.t_max;
    world
        .ues
        .iter()
        .zip(tasks)
        .zip(&assoc.assign)
        .map(|((ue, task), a)| match *a {
            Some(j) => {
                let rate = physics.rate(ue, &world.uavs[j]);
                if task.data_bits == 0.0 {
                    0.0
                } else {
                    ue.tx_power * task.data_bits / rate
                }
            }
            None => local_energy(task, ue, t_max).energy,
        })
        .collect()
}

/// Total UE energy of one slot.
pub fn slot_energy(assoc: &Association, tasks: &[Task], world: &WorldState, physics: &Physics) -> f64 {
    ue_energies(assoc, tasks, world, physics).iter().sum()
}

/// Builds preferences and matches in one call.
pub fn associate(world: &WorldState, tasks: &[Task], physics: &Physics) -> Association {
    let prefs = build_preferences(world, tasks, physics);
    match_users(&prefs, world.ues.len(), &physics.sys)
}
