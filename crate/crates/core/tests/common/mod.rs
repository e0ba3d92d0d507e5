//! Oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use fmec_core::model::{coverage_radius, free_space_rate, local_energy, required_cpu};
use fmec_core::nn::{DenseNet, Gradients};
use fmec_core::{Physics, SystemParams, Task, UavState, UserEquipment, WorldState};
use rand::Rng;

pub fn ue(x: f64, y: f64) -> UserEquipment {
    UserEquipment { position: [x, y], tx_power: 0.1, kappa: 1e-28, nu: 3.0 }
}

/// One slot with `n` UEs and `m` UAVs crowded into a `side`-metre square so
/// coverage discs overlap, and capacities drawn small enough to bind.
pub fn random_slot<R: Rng>(rng: &mut R, n: usize, m: usize, side: f64) -> (WorldState, Vec<Task>, Physics) {
    let ues = (0..n).map(|_| ue(rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect();
    let uavs = (0..m).map(|_| UavState::new([rng.gen_range(0.0..side), rng.gen_range(0.0..side), 75.0], 0.0)).collect();
    let tasks = (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                Task::default()
            } else {
                Task::new(rng.gen_range(8e4..4e5), rng.gen_range(2e9..2e10))
            }
        })
        .collect();
    let sys = SystemParams { v_max: rng.gen_range(1..=3), f_max: rng.gen_range(1e10..6e10), ..SystemParams::default() };
    (WorldState::new(ues, uavs), tasks, Physics::two_d(sys))
}

/// Minimum total UE energy over every assignment in `{local, 0..M}^N`,
/// written directly against the model formulas.
pub fn brute_force(world: &WorldState, tasks: &[Task], sys: &SystemParams) -> f64 {
    let n = world.ues.len();
    let m = world.uavs.len();
    let radius = coverage_radius(sys.altitude, sys.theta_max).unwrap();
    // cost and cpu of UE i on choice c (0 = local), None if impossible
    let option = |i: usize, c: usize| -> Option<(f64, f64)> {
        let ue = &world.ues[i];
        let task = &tasks[i];
        if c == 0 {
            return Some((local_energy(task, ue, sys.t_max).energy, 0.0));
        }
        let uav = &world.uavs[c - 1];
        let dx = ue.position[0] - uav.position[0];
        let dy = ue.position[1] - uav.position[1];
        if (dx * dx + dy * dy).sqrt() > radius {
            return None;
        }
        let rate = free_space_rate(ue, uav, sys);
        let cpu = required_cpu(task, rate, sys.t_max).ok()?;
        Some((ue.tx_power * task.data_bits / rate, cpu))
    };
    let total = (m + 1).pow(n as u32);
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut rest = code;
        let mut count = vec![0usize; m];
        let mut load = vec![0.0f64; m];
        let mut energy = 0.0;
        let mut ok = true;
        for i in 0..n {
            let c = rest % (m + 1);
            rest /= m + 1;
            match option(i, c) {
                Some((e, cpu)) => {
                    energy += e;
                    if c > 0 {
                        count[c - 1] += 1;
                        load[c - 1] += cpu;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && count.iter().all(|&k| k <= sys.v_max) && load.iter().all(|&f| f <= sys.f_max) {
            best = best.min(energy);
        }
    }
    best
}

pub fn all_local(world: &WorldState, tasks: &[Task], sys: &SystemParams) -> f64 {
    world.ues.iter().zip(tasks).map(|(u, t)| local_energy(t, u, sys.t_max).energy).sum()
}

/// Largest relative gap between the analytic gradient of `c·net(x)` and its
/// central finite difference with step `h`, over every parameter. Gaps are
/// measured against `max(|analytic|, |numeric|, floor)`.
pub fn gradient_check(net: &DenseNet, x: &[f64], c: &[f64], h: f64, floor: f64) -> (f64, usize) {
    let tape = net.forward_tape(x).unwrap();
    let mut grads = Gradients::zeros_like(net);
    net.backward(&tape, c, &mut grads);
    let analytic = grads.flatten();
    let base = net.params();
    let mut probe = net.clone();
    let mut params = base.clone();
    let f = |probe: &mut DenseNet, params: &[f64]| -> f64 {
        probe.set_params(params).unwrap();
        probe.forward(x).unwrap().iter().zip(c).map(|(y, w)| y * w).sum()
    };
    let mut worst = (0.0, 0);
    for k in 0..base.len() {
        params[k] = base[k] + h;
        let up = f(&mut probe, &params);
        params[k] = base[k] - h;
        let down = f(&mut probe, &params);
        params[k] = base[k];
        let numeric = (up - down) / (2.0 * h);
        let rel = (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(floor);
        if rel > worst.0 {
            worst = (rel, k);
        }
    }
    worst
}
