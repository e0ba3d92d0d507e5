//! The tangent bound of the rate never overshoots and is tight where it is
//! expanded.

mod common;

use common::ue;
use fmec_core::cat::{linearize, sca_coefficients, Trajectory};
use fmec_core::model::free_space_rate;
use fmec_core::{SystemParams, UavState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rate_at(sys: &SystemParams, g: [f64; 2], q: [f64; 2]) -> f64 {
    free_space_rate(&ue(q[0], q[1]), &UavState::new([g[0], g[1], sys.altitude], 0.0), sys)
}

#[test]
fn thousand_triples() {
    let sys = SystemParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pt = || [rng.gen_range(0.0..sys.area_x), rng.gen_range(0.0..sys.area_y)];
    for k in 0..1000 {
        let (g, g_r, q) = (pt(), pt(), pt());
        let traj = Trajectory::new(vec![vec![g_r, g_r]]);
        let lin = linearize(&traj, &[ue(q[0], q[1])], &sys);
        assert!(lin.k[0][0][0] < 0.0);
        let s = (g[0] - q[0]).powi(2) + (g[1] - q[1]).powi(2);
        let w = rate_at(&sys, g, q);
        let lb = lin.lower_bound(0, 0, 0, s);
        assert!(lb <= w * (1.0 + 1e-9), "triple {k}: {lb} > {w}");
        let w_r = rate_at(&sys, g_r, q);
        let tight = lin.lower_bound(0, 0, 0, lin.s_r[0][0][0]);
        assert!((tight - w_r).abs() <= 1e-9 * w_r, "triple {k}: {tight} vs {w_r}");
    }
}

proptest! {
    #[test]
    fn bound_holds_for_any_geometry(
        s_r in 0.0f64..5e5,
        s in 0.0f64..5e5,
        altitude in 20.0f64..200.0,
        tx in 0.01f64..1.0,
    ) {
        let sys = SystemParams { altitude, ..SystemParams::default() };
        let (k, b) = sca_coefficients(s_r, tx, &sys);
        let ap = sys.alpha() * tx;
        let w = sys.bandwidth * (1.0 + ap / (altitude * altitude + s)).log2();
        prop_assert!(k < 0.0);
        prop_assert!(k * (s - s_r) + b <= w * (1.0 + 1e-9));
    }
}
