use super::Trajectory;
use crate::matching::{slot_options, Association, UeOptions};
use crate::model::{Physics, SystemParams, Task, UserEquipment};

/// Exact per-slot optimum of the association subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotAssignment {
    pub per_slot: Vec<Association>,
    /// Total UE energy over all slots, J.
    pub objective: f64,
}

/// Solves the association subproblem for every slot of `traj`.
///
/// Slots only couple through the trajectory, so each slot is an independent
/// multiple-choice knapsack.
pub fn solve_assignment(
    traj: &Trajectory,
    ues: &[UserEquipment],
    tasks: &[Vec<Task>],
    sys: &SystemParams,
) -> SlotAssignment {
    let physics = Physics::two_d(*sys);
    let mut per_slot = Vec::with_capacity(tasks.len());
    let mut objective = 0.0;
    for (t, slot_tasks) in tasks.iter().enumerate() {
        let world = traj.world(ues, t, sys.altitude);
        let options = slot_options(&world, slot_tasks, &physics);
        let (assoc, cost) = branch_and_bound(&options, traj.n_uavs(), sys);
        objective += cost;
        per_slot.push(assoc);
    }
    SlotAssignment { per_slot, objective }
}

struct Search<'a> {
    options: &'a [UeOptions],
    order: Vec<usize>,
    /// `suffix_best[k]`: sum of unconstrained best costs of `order[k..]`.
    suffix_best: Vec<f64>,
    v_max: usize,
    f_max: f64,
    count: Vec<usize>,
    load: Vec<f64>,
    choice: Vec<Option<usize>>,
    best_cost: f64,
    best_choice: Vec<Option<usize>>,
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize, cost: f64) {
        if cost + self.suffix_best[depth] >= self.best_cost {
            return;
        }
        if depth == self.order.len() {
            self.best_cost = cost;
            self.best_choice.clone_from(&self.choice);
            return;
        }
        let i = self.order[depth];
        let ue = &self.options[i];
        // offload options were sorted by ascending cost
        for k in 0..ue.offload.len() {
            let o = ue.offload[k];
            if self.count[o.uav] < self.v_max && self.load[o.uav] + o.cpu <= self.f_max {
                self.count[o.uav] += 1;
                self.load[o.uav] += o.cpu;
                self.choice[i] = Some(k);
                self.dfs(depth + 1, cost + o.e_tr);
                self.choice[i] = None;
                self.count[o.uav] -= 1;
                self.load[o.uav] -= o.cpu;
            }
        }
        self.dfs(depth + 1, cost + ue.local);
    }
}

/// Depth-first branch and bound over per-UE choices.
///
/// UEs are branched in order of decreasing best-case saving; the bound adds
/// each undecided UE's cheapest option while ignoring capacities. Options that
/// do not save energy are never generated, which cannot cut off an optimum.
pub fn branch_and_bound(options: &[UeOptions], n_uavs: usize, sys: &SystemParams) -> (Association, f64) {
    let n = options.len();
    let mut sorted: Vec<UeOptions> = options.to_vec();
    for ue in &mut sorted {
        ue.offload.sort_by(|a, b| a.e_tr.total_cmp(&b.e_tr).then(a.uav.cmp(&b.uav)));
    }
    let fixed: f64 = sorted.iter().filter(|u| u.offload.is_empty()).map(|u| u.local).sum();
    let mut order: Vec<usize> = (0..n).filter(|&i| !sorted[i].offload.is_empty()).collect();
    order.sort_by(|&a, &b| {
        let sa = sorted[a].local - sorted[a].best();
        let sb = sorted[b].local - sorted[b].best();
        sb.total_cmp(&sa).then(a.cmp(&b))
    });
    let mut suffix_best = vec![0.0; order.len() + 1];
    for k in (0..order.len()).rev() {
        suffix_best[k] = suffix_best[k + 1] + sorted[order[k]].best();
    }
    let all_local: f64 = order.iter().map(|&i| sorted[i].local).sum();

    let mut search = Search {
        options: &sorted,
        order,
        suffix_best,
        v_max: sys.v_max,
        f_max: sys.f_max,
        count: vec![0; n_uavs],
        load: vec![0.0; n_uavs],
        choice: vec![None; n],
        // any strictly better leaf replaces the all-local incumbent
        best_cost: all_local,
        best_choice: vec![None; n],
    };
    search.dfs(0, 0.0);

    let mut assoc = Association::all_local(n);
    for (i, c) in search.best_choice.iter().enumerate() {
        if let Some(k) = *c {
            let o = sorted[i].offload[k];
            assoc.assign[i] = Some(o.uav);
            assoc.f_c[i] = o.cpu;
        }
    }
    (assoc, fixed + search.best_cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::OffloadOption;

    fn sys(v_max: usize, f_max: f64) -> SystemParams {
        SystemParams { v_max, f_max, ..SystemParams::default() }
    }

    fn opt(local: f64, offload: &[(usize, f64, f64)]) -> UeOptions {
        UeOptions {
            local,
            offload: offload.iter().map(|&(uav, e_tr, cpu)| OffloadOption { uav, e_tr, cpu }).collect(),
        }
    }

    #[test]
    fn nothing_to_offload_is_all_local() {
        let options = vec![opt(3.0, &[]), opt(5.0, &[])];
        let (a, cost) = branch_and_bound(&options, 2, &sys(30, 1e11));
        assert_eq!(a, Association::all_local(2));
        assert_eq!(cost, 8.0);
    }

    #[test]
    fn capacity_forces_the_better_subset() {
        // One slot of CPU on UAV 0: UE 1 saves more than UE 0.
        let options = vec![opt(10.0, &[(0, 0.1, 6.0)]), opt(20.0, &[(0, 0.1, 6.0)]), opt(7.0, &[(0, 0.2, 3.0)])];
        let (a, cost) = branch_and_bound(&options, 1, &sys(30, 10.0));
        assert_eq!(a.assign, vec![None, Some(0), Some(0)]);
        assert!((cost - (10.0 + 0.1 + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn task_cap_limits_matches() {
        let options = vec![opt(10.0, &[(0, 0.1, 1.0)]), opt(20.0, &[(0, 0.1, 1.0)])];
        let (a, cost) = branch_and_bound(&options, 1, &sys(1, 1e11));
        assert_eq!(a.assign, vec![None, Some(0)]);
        assert!((cost - 10.1).abs() < 1e-12);
        let (a, cost) = branch_and_bound(&options, 1, &sys(0, 1e11));
        assert_eq!(a, Association::all_local(2));
        assert_eq!(cost, 30.0);
    }

    #[test]
    fn beats_greedy_on_shared_ue() {
        // The greedy matcher gives UE 1 to UAV 1 and strands UE 2.
        let options = vec![
            opt(100.0, &[(0, 0.01, 1.0)]),
            opt(800.0, &[(0, 0.02, 1.0), (1, 0.01, 1.0)]),
            opt(337.5, &[(1, 0.02, 1.0)]),
        ];
        let (a, cost) = branch_and_bound(&options, 2, &sys(1, 1e11));
        assert_eq!(a.assign, vec![None, Some(0), Some(1)]);
        assert!((cost - (100.0 + 0.02 + 0.02)).abs() < 1e-12);
    }
}
