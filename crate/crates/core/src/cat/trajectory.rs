use super::sca::linearize;
use super::{dist2, Trajectory};
use crate::matching::Association;
use crate::model::{free_space_rate, SystemParams, Task, UavState, UserEquipment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    /// Relative tolerance of the inner gradient loop.
    pub eps1: f64,
    pub penalty_start: f64,
    pub penalty_growth: f64,
    pub penalty_rounds: usize,
    pub max_inner_iters: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self { eps1: 1e-4, penalty_start: 1.0, penalty_growth: 10.0, penalty_rounds: 8, max_inner_iters: 400 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryUpdate {
    pub trajectory: Trajectory,
    /// False when no feasible point beat the expansion trajectory; the input
    /// trajectory is then returned unchanged.
    pub improved: bool,
    pub objective_before: f64,
    pub objective_after: f64,
}

/// Transmit energy of the matched UEs along `traj` under the exact rate.
pub fn true_objective(
    traj: &Trajectory,
    assoc: &[Association],
    ues: &[UserEquipment],
    tasks: &[Vec<Task>],
    sys: &SystemParams,
) -> f64 {
    let mut total = 0.0;
    for (t, a) in assoc.iter().enumerate() {
        for (i, choice) in a.assign.iter().enumerate() {
            let Some(j) = *choice else { continue };
            let d = tasks[t][i].data_bits;
            if d == 0.0 {
                continue;
            }
            let [x, y] = traj.point(j, t);
            let rate = free_space_rate(&ues[i], &UavState::new([x, y, sys.altitude], 0.0), sys);
            total += ues[i].tx_power * d / rate;
        }
    }
    total
}

/// One matched (slot, UE, UAV) pair of the convexified problem.
#[derive(Debug, Clone, Copy)]
struct Term {
    /// Offset of the waypoint's x coordinate in the variable vector.
    var: usize,
    q: [f64; 2],
    /// `P·D`; the objective contribution is `coef / w_lb`.
    coef: f64,
    k: f64,
    b: f64,
    s_r: f64,
    /// Squared radius implied by coverage and by the linearized deadline.
    rad2: f64,
}

struct Problem {
    terms: Vec<Term>,
    starts: Vec<[f64; 2]>,
    n_slots: usize,
    area: [f64; 2],
    d_max2: f64,
    /// Relative shrink of every constraint in the penalized problem, so its
    /// slightly infeasible minimizers still satisfy the true constraints.
    margin: f64,
    scale2: f64,
    scale: f64,
    f0: f64,
}

impl Problem {
    fn var(&self, uav: usize, waypoint: usize) -> usize {
        (uav * self.n_slots + waypoint - 1) * 2
    }

    fn point(&self, x: &[f64], uav: usize, waypoint: usize) -> [f64; 2] {
        if waypoint == 0 {
            self.starts[uav]
        } else {
            let v = self.var(uav, waypoint);
            [x[v], x[v + 1]]
        }
    }

    /// Linearized objective, normalized to 1 at the expansion point.
    fn objective(&self, x: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let mut f = 0.0;
        for t in &self.terms {
            if t.coef == 0.0 {
                continue;
            }
            let g = [x[t.var], x[t.var + 1]];
            let s = dist2(g, t.q);
            let w = t.k * (s - t.s_r) + t.b;
            if w <= 0.0 {
                return f64::INFINITY;
            }
            f += t.coef / w / self.f0;
            if let Some(grad) = grad.as_deref_mut() {
                let c = -t.coef / (w * w) * t.k * 2.0 / self.f0;
                grad[t.var] += c * (g[0] - t.q[0]);
                grad[t.var + 1] += c * (g[1] - t.q[1]);
            }
        }
        f
    }

    fn penalty(&self, x: &[f64], mu: f64, mut grad: Option<&mut [f64]>) -> f64 {
        let mut p = 0.0;
        for t in &self.terms {
            let g = [x[t.var], x[t.var + 1]];
            let v = (dist2(g, t.q) - t.rad2 * (1.0 - self.margin).powi(2)) / self.scale2;
            if v > 0.0 {
                p += mu * v * v;
                if let Some(grad) = grad.as_deref_mut() {
                    let c = mu * 2.0 * v * 2.0 / self.scale2;
                    grad[t.var] += c * (g[0] - t.q[0]);
                    grad[t.var + 1] += c * (g[1] - t.q[1]);
                }
            }
        }
        for (k, &xk) in x.iter().enumerate() {
            let lo = self.margin * self.scale;
            let hi = self.area[k % 2] - lo;
            let v = if xk < lo {
                (xk - lo) / self.scale
            } else if xk > hi {
                (xk - hi) / self.scale
            } else {
                continue;
            };
            p += mu * v * v;
            if let Some(grad) = grad.as_deref_mut() {
                grad[k] += mu * 2.0 * v / self.scale;
            }
        }
        for j in 0..self.starts.len() {
            for w in 1..=self.n_slots {
                let a = self.point(x, j, w - 1);
                let b = self.point(x, j, w);
                let d = [b[0] - a[0], b[1] - a[1]];
                let v = (d[0] * d[0] + d[1] * d[1] - self.d_max2 * (1.0 - self.margin).powi(2)) / self.scale2;
                if v > 0.0 {
                    p += mu * v * v;
                    if let Some(grad) = grad.as_deref_mut() {
                        let c = mu * 2.0 * v * 2.0 / self.scale2;
                        let vb = self.var(j, w);
                        grad[vb] += c * d[0];
                        grad[vb + 1] += c * d[1];
                        if w > 1 {
                            let va = self.var(j, w - 1);
                            grad[va] -= c * d[0];
                            grad[va + 1] -= c * d[1];
                        }
                    }
                }
            }
        }
        p
    }

    fn value_and_grad(&self, x: &[f64], mu: f64, grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let f = self.objective(x, Some(grad));
        if !f.is_finite() {
            return f;
        }
        f + self.penalty(x, mu, Some(grad))
    }

    fn value(&self, x: &[f64], mu: f64) -> f64 {
        let f = self.objective(x, None);
        if !f.is_finite() {
            return f;
        }
        f + self.penalty(x, mu, None)
    }

    /// True constraints, with a 1e-9 relative allowance for round-off.
    fn feasible(&self, x: &[f64]) -> bool {
        let tol = 1.0 + 2e-9;
        self.terms.iter().all(|t| dist2([x[t.var], x[t.var + 1]], t.q) <= t.rad2 * tol)
            && x.iter().enumerate().all(|(k, &v)| v >= 0.0 && v <= self.area[k % 2])
            && (0..self.starts.len()).all(|j| {
                (1..=self.n_slots).all(|w| dist2(self.point(x, j, w - 1), self.point(x, j, w)) <= self.d_max2 * tol)
            })
    }

    /// Gradient descent with Armijo backtracking on the penalized objective.
    fn minimize(&self, x: &mut Vec<f64>, mu: f64, opts: &TrajectoryOptions) {
        let mut grad = vec![0.0; x.len()];
        let mut trial = vec![0.0; x.len()];
        let mut phi = self.value_and_grad(x, mu, &mut grad);
        // first trial moves the point by one length unit
        let mut step = self.scale / grad.iter().map(|g| g * g).sum::<f64>().sqrt().max(1e-300);
        let mut window_start = phi;
        for it in 0..opts.max_inner_iters {
            let gn2: f64 = grad.iter().map(|g| g * g).sum();
            if gn2 == 0.0 || !phi.is_finite() {
                return;
            }
            let accepted = loop {
                for ((t, xi), gi) in trial.iter_mut().zip(x.iter()).zip(&grad) {
                    *t = xi - step * gi;
                }
                let candidate = self.value(&trial, mu);
                if candidate <= phi - 1e-4 * step * gn2 {
                    break true;
                }
                step *= 0.5;
                if step < 1e-30 {
                    break false;
                }
            };
            if !accepted {
                return;
            }
            std::mem::swap(x, &mut trial);
            phi = self.value_and_grad(x, mu, &mut grad);
            step *= 2.0;
            if (it + 1) % 10 == 0 {
                if window_start - phi <= opts.eps1 * window_start.abs().max(1e-12) {
                    return;
                }
                window_start = phi;
            }
        }
    }
}

/// Solves the convexified trajectory subproblem around `g_r` for a fixed
/// association and CPU allocation.
///
/// Each matched pair keeps its UE within coverage and keeps the linearized
/// rate above what the granted CPU share needs to meet the deadline; with a
/// tangent bound in the squared distance both are discs around the UE. The
/// penalized problem is minimized with growing penalty weights, then the
/// result is pulled back along the segment from `g_r` onto the (convex)
/// feasible set. The update is accepted only if the exact transmit energy
/// drops.
pub fn solve_trajectory(
    assoc: &[Association],
    g_r: &Trajectory,
    ues: &[UserEquipment],
    tasks: &[Vec<Task>],
    sys: &SystemParams,
    opts: &TrajectoryOptions,
) -> TrajectoryUpdate {
    let before = true_objective(g_r, assoc, ues, tasks, sys);
    let unchanged = |before: f64| TrajectoryUpdate {
        trajectory: g_r.clone(),
        improved: false,
        objective_before: before,
        objective_after: before,
    };
    let n_slots = g_r.n_slots();
    let n_uavs = g_r.n_uavs();
    if n_slots == 0 || before == 0.0 || sys.d_max == 0.0 {
        return unchanged(before);
    }

    let lin = linearize(g_r, ues, sys);
    let coverage2 = (sys.altitude * sys.theta_max.tan()).powi(2);
    let mut terms = Vec::new();
    for (t, a) in assoc.iter().enumerate() {
        // Spare CPU of each UAV goes to its users in proportion to their
        // cycles; the assignment objective does not depend on the split.
        let mut granted = vec![0.0; n_uavs];
        let mut cycles = vec![0.0; n_uavs];
        for (i, choice) in a.assign.iter().enumerate() {
            if let Some(j) = *choice {
                granted[j] += a.f_c[i];
                cycles[j] += tasks[t][i].cpu_cycles;
            }
        }
        for (i, choice) in a.assign.iter().enumerate() {
            let Some(j) = *choice else { continue };
            let task = &tasks[t][i];
            let (k, b, s_r) = (lin.k[t][j][i], lin.b[t][j][i], lin.s_r[t][j][i]);
            let spare = (sys.f_max - granted[j]).max(0.0);
            let f_c = if cycles[j] > 0.0 { a.f_c[i] + spare * task.cpu_cycles / cycles[j] } else { a.f_c[i] };
            let compute_s = if task.cpu_cycles == 0.0 { 0.0 } else { task.cpu_cycles / f_c };
            let needed_rate = if task.data_bits == 0.0 {
                0.0
            } else if compute_s < sys.t_max {
                task.data_bits / (sys.t_max - compute_s)
            } else {
                f64::INFINITY
            };
            // The granted share was sized at g_r, so the slack is never negative.
            let slack = ((b - needed_rate) / -k).max(0.0);
            terms.push(Term {
                var: (j * n_slots + t) * 2,
                q: ues[i].position,
                coef: ues[i].tx_power * task.data_bits,
                k,
                b,
                s_r,
                rad2: coverage2.min(s_r + slack).max(s_r.min(coverage2)),
            });
        }
    }

    let scale = sys.d_max.max(1.0);
    let problem = Problem {
        terms,
        starts: g_r.waypoints.iter().map(|w| w[0]).collect(),
        n_slots,
        area: [sys.area_x, sys.area_y],
        d_max2: sys.d_max * sys.d_max,
        margin: 1e-3,
        scale2: scale * scale,
        scale,
        f0: before,
    };

    let x0: Vec<f64> = g_r.waypoints.iter().flat_map(|w| w[1..].iter().flat_map(|p| [p[0], p[1]])).collect();
    let mut x = x0.clone();
    let mut mu = opts.penalty_start;
    for _ in 0..opts.penalty_rounds {
        problem.minimize(&mut x, mu, opts);
        if problem.feasible(&x) {
            break;
        }
        mu *= opts.penalty_growth;
    }

    // Largest feasible fraction of the move; x0 itself is feasible.
    let along = |lambda: f64| -> Vec<f64> { x0.iter().zip(&x).map(|(a, b)| a + lambda * (b - a)).collect() };
    let lambda_max = if problem.feasible(&x) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if problem.feasible(&along(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if lambda_max == 0.0 {
        return unchanged(before);
    }

    let to_traj = |v: &[f64]| -> Trajectory {
        let mut waypoints = g_r.waypoints.clone();
        for (j, w) in waypoints.iter_mut().enumerate() {
            for (s, p) in w.iter_mut().enumerate().skip(1) {
                let k = problem.var(j, s);
                *p = [v[k], v[k + 1]];
            }
        }
        Trajectory::new(waypoints)
    };
    let exact = |lambda: f64| true_objective(&to_traj(&along(lambda)), assoc, ues, tasks, sys);

    // golden-section search on the exact objective over [0, lambda_max]
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, lambda_max);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (exact(c), exact(d));
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = exact(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = exact(d);
        }
    }
    let mut best = (lambda_max, exact(lambda_max));
    for cand in [(c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }

    let candidate = along(best.0);
    if best.1 < before * (1.0 - 1e-12) && problem.feasible(&candidate) {
        let trajectory = to_traj(&candidate);
        debug_assert_eq!(trajectory.n_uavs(), n_uavs);
        TrajectoryUpdate { trajectory, improved: true, objective_before: before, objective_after: best.1 }
    } else {
        unchanged(before)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::solve_assignment;

    fn ue(x: f64, y: f64) -> UserEquipment {
        UserEquipment { position: [x, y], tx_power: 0.1, kappa: 1e-28, nu: 3.0 }
    }

    fn hover(p: [f64; 2], slots: usize) -> Trajectory {
        Trajectory::new(vec![vec![p; slots + 1]])
    }

    #[test]
    fn stays_put_directly_overhead() {
        let sys = SystemParams::default();
        let ues = [ue(200.0, 200.0)];
        let tasks = vec![vec![Task::new(4e5, 1e10)]];
        let g = hover([200.0, 200.0], 1);
        let a = solve_assignment(&g, &ues, &tasks, &sys);
        assert_eq!(a.per_slot[0].assign, vec![Some(0)]);
        let up = solve_trajectory(&a.per_slot, &g, &ues, &tasks, &sys, &TrajectoryOptions::default());
        let p = up.trajectory.point(0, 0);
        assert!(dist2(p, [200.0, 200.0]).sqrt() < 1e-6);
        assert!(up.objective_after <= up.objective_before);
    }

    #[test]
    fn frozen_when_no_motion_allowed() {
        let sys = SystemParams { d_max: 0.0, ..SystemParams::default() };
        let ues = [ue(240.0, 200.0)];
        let tasks = vec![vec![Task::new(4e5, 1e10)]];
        let g = hover([200.0, 200.0], 1);
        let a = solve_assignment(&g, &ues, &tasks, &sys);
        let up = solve_trajectory(&a.per_slot, &g, &ues, &tasks, &sys, &TrajectoryOptions::default());
        assert_eq!(up.trajectory, g);
        assert!(!up.improved);
    }

    #[test]
    fn moves_toward_offset_ue() {
        let sys = SystemParams { theta_max: 1.2, d_max: 200.0, ..SystemParams::default() };
        let ues = [ue(300.0, 200.0)];
        let tasks = vec![vec![Task::new(4e5, 1e10)]];
        let g = hover([200.0, 200.0], 1);
        let a = solve_assignment(&g, &ues, &tasks, &sys);
        assert_eq!(a.per_slot[0].assign, vec![Some(0)]);
        let up = solve_trajectory(&a.per_slot, &g, &ues, &tasks, &sys, &TrajectoryOptions::default());
        assert!(up.improved);
        assert!(up.objective_after < up.objective_before);
        let p = up.trajectory.point(0, 0);
        assert!(dist2(p, [300.0, 200.0]) < dist2([200.0, 200.0], [300.0, 200.0]));
        assert!(up.trajectory.is_feasible(&sys));
    }
}
