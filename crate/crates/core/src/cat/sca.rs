use std::f64::consts::LOG2_E;

use super::{dist2, Trajectory};
use crate::model::{SystemParams, UserEquipment};

/// Tangent lower bound of the rate as a function of the squared horizontal
/// UE distance `s`, expanded at `s_r`:
///
/// `w(s) = B·log2(1 + αP/(Z² + s)) ≥ K·(s − s_r) + B_r`.
///
/// The rate is convex in `s`, so the tangent never overshoots it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaLinearization {
    /// Slope in bits/s per m², indexed `[slot][uav][ue]`. Always negative.
    pub k: Vec<Vec<Vec<f64>>>,
    /// True rate at the expansion point, bits/s.
    pub b: Vec<Vec<Vec<f64>>>,
    /// Squared distance at the expansion point, m².
    pub s_r: Vec<Vec<Vec<f64>>>,
}

impl ScaLinearization {
    pub fn lower_bound(&self, slot: usize, uav: usize, ue: usize, s: f64) -> f64 {
        self.k[slot][uav][ue] * (s - self.s_r[slot][uav][ue]) + self.b[slot][uav][ue]
    }
}

/// `(K, B_r)` for one pair at squared distance `s_r`.
pub fn sca_coefficients(s_r: f64, tx_power: f64, sys: &SystemParams) -> (f64, f64) {
    let z2 = sys.altitude * sys.altitude;
    let ap = sys.alpha() * tx_power;
    let k = -sys.bandwidth * ap * LOG2_E / ((z2 + s_r) * (z2 + s_r + ap));
    let b = sys.bandwidth * (1.0 + ap / (z2 + s_r)).log2();
    (k, b)
}

/// Expands every (slot, UAV, UE) rate around the trajectory `traj`.
pub fn linearize(traj: &Trajectory, ues: &[UserEquipment], sys: &SystemParams) -> ScaLinearization {
    let n_slots = traj.n_slots();
    let mut k = Vec::with_capacity(n_slots);
    let mut b = Vec::with_capacity(n_slots);
    let mut s_r = Vec::with_capacity(n_slots);
    for t in 0..n_slots {
        let (mut kt, mut bt, mut st) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..traj.n_uavs() {
            let g = traj.point(j, t);
            let (mut kj, mut bj, mut sj) = (Vec::new(), Vec::new(), Vec::new());
            for ue in ues {
                let s = dist2(g, ue.position);
                let (kk, bb) = sca_coefficients(s, ue.tx_power, sys);
                kj.push(kk);
                bj.push(bb);
                sj.push(s);
            }
            kt.push(kj);
            bt.push(bj);
            st.push(sj);
        }
        k.push(kt);
        b.push(bt);
        s_r.push(st);
    }
    ScaLinearization { k, b, s_r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{free_space_rate, UavState};

    fn ue(x: f64, y: f64) -> UserEquipment {
        UserEquipment { position: [x, y], tx_power: 0.1, kappa: 1e-28, nu: 3.0 }
    }

    #[test]
    fn tight_at_the_expansion_point() {
        let sys = SystemParams::default();
        let traj = Trajectory::new(vec![vec![[0.0, 0.0], [50.0, 60.0]], vec![[0.0, 0.0], [300.0, 10.0]]]);
        let ues = [ue(40.0, 40.0), ue(390.0, 390.0)];
        let lin = linearize(&traj, &ues, &sys);
        for j in 0..2 {
            for (i, u) in ues.iter().enumerate() {
                let p = traj.point(j, 0);
                let uav = UavState::new([p[0], p[1], sys.altitude], 0.0);
                let w = free_space_rate(u, &uav, &sys);
                let lb = lin.lower_bound(0, j, i, lin.s_r[0][j][i]);
                assert!((lb - w).abs() <= 1e-9 * w);
                assert!(lin.k[0][j][i] < 0.0);
            }
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let sys = SystemParams::default();
        let w = |s: f64| sca_coefficients(s, 0.1, &sys).1;
        for s in [0.0, 100.0, 2500.0, 40_000.0] {
            let h = 1e-3 * (s + 1.0);
            let fd = (w(s + h) - w((s - h).max(0.0))) / (s + h - (s - h).max(0.0));
            let (k, _) = sca_coefficients(s, 0.1, &sys);
            assert!((k - fd).abs() <= 1e-5 * k.abs(), "s={s} k={k} fd={fd}");
        }
    }
}
