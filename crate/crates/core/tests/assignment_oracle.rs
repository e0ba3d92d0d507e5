//! Branch and bound against exhaustive enumeration.

mod common;

use common::{all_local, brute_force, random_slot};
use fmec_core::cat::{branch_and_bound, solve_assignment, Trajectory};
use fmec_core::matching::slot_options;
use fmec_core::SystemParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    loop {
        let n = rng.gen_range(1..=7);
        let m = rng.gen_range(1..=3);
        if (m + 1usize).pow(n as u32) <= 2000 {
            return (n, m);
        }
    }
}

#[test]
fn matches_enumeration_on_100_seeds() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = small_shape(&mut rng);
        let (world, tasks, physics) = random_slot(&mut rng, n, m, 150.0);
        let (assoc, cost) = branch_and_bound(&slot_options(&world, &tasks, &physics), m, &physics.sys);
        let oracle = brute_force(&world, &tasks, &physics.sys);
        assert!((cost - oracle).abs() <= 1e-9 * oracle.max(1.0), "seed {seed}: {cost} vs {oracle}");
        assoc.check(&world, &tasks, &physics).unwrap();
    }
}

#[test]
fn zero_capacity_keeps_everyone_local() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (world, tasks, physics) = random_slot(&mut rng, 6, 2, 100.0);
    let sys = SystemParams { v_max: 0, ..physics.sys };
    let (assoc, cost) = branch_and_bound(&slot_options(&world, &tasks, &physics), 2, &sys);
    assert_eq!(assoc.matched_count(), 0);
    let local = all_local(&world, &tasks, &sys);
    assert!((cost - local).abs() <= 1e-12 * local);
}

#[test]
fn optimum_is_monotone_in_both_capacities() {
    for seed in 0..300 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (world, tasks, physics) = random_slot(&mut rng, 6, 2, 150.0);
        let sys = physics.sys;
        let opts = slot_options(&world, &tasks, &physics);
        let base = branch_and_bound(&opts, 2, &sys).1;
        let more_cpu = branch_and_bound(&opts, 2, &SystemParams { f_max: sys.f_max * 1.5, ..sys }).1;
        let more_slots = branch_and_bound(&opts, 2, &SystemParams { v_max: sys.v_max + 1, ..sys }).1;
        assert!(more_cpu <= base && more_slots <= base, "seed {seed}");
    }
}

#[test]
fn far_ues_stay_local_over_a_horizon() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (world, tasks, physics) = random_slot(&mut rng, 5, 1, 50.0);
    let sys = physics.sys;
    // take-off plus three slots in the far corner, beyond every UE
    let traj = Trajectory::new(vec![vec![[sys.area_x, sys.area_y]; 4]]);
    let a = solve_assignment(&traj, &world.ues, &vec![tasks.clone(); 3], &sys);
    assert!(a.per_slot.iter().all(|s| s.matched_count() == 0));
    assert!((a.objective - 3.0 * all_local(&world, &tasks, &sys)).abs() < 1e-9);
}
