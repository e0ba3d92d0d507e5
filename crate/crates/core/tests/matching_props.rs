//! Feasibility, rationality and capacity behaviour of the greedy matcher.

mod common;

use common::{all_local, brute_force, random_slot, ue};
use fmec_core::matching::{associate, slot_energy, slot_options};
use fmec_core::{Physics, SystemParams, Task, UavState, WorldState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn thousand_instances_are_feasible_and_rational() {
    for seed in 0..1000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=3);
        let (world, tasks, physics) = random_slot(&mut rng, n, m, 150.0);
        let assoc = associate(&world, &tasks, &physics);
        assoc.check(&world, &tasks, &physics).unwrap_or_else(|e| panic!("seed {seed}: {e}"));

        let options = slot_options(&world, &tasks, &physics);
        for (i, a) in assoc.assign.iter().enumerate() {
            if let Some(j) = *a {
                let o = options[i].offload.iter().find(|o| o.uav == j).expect("matched on an offered option");
                assert!(o.e_tr < options[i].local, "seed {seed}: UE {i} does not save");
            }
        }

        let energy = slot_energy(&assoc, &tasks, &world, &physics);
        let best = brute_force(&world, &tasks, &physics.sys);
        let local = all_local(&world, &tasks, &physics.sys);
        assert!(best <= energy + 1e-9 * energy.max(1.0), "seed {seed}: beats the optimum");
        assert!(energy <= local, "seed {seed}: worse than local");
    }
}

#[test]
fn rerun_is_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (world, tasks, physics) = random_slot(&mut rng, 30, 3, 250.0);
    assert_eq!(associate(&world, &tasks, &physics), associate(&world, &tasks, &physics));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn more_task_slots_never_cost_energy(seed in any::<u64>(), n in 1usize..8, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (world, tasks, physics) = random_slot(&mut rng, n, m, 150.0);
        let base = slot_energy(&associate(&world, &tasks, &physics), &tasks, &world, &physics);
        let raised = Physics::two_d(SystemParams { v_max: physics.sys.v_max + 1, ..physics.sys });
        let more = slot_energy(&associate(&world, &tasks, &raised), &tasks, &world, &raised);
        prop_assert!(more <= base, "{} > {}", more, base);
    }

    #[test]
    fn raising_cpu_keeps_matching_feasible(seed in any::<u64>(), n in 1usize..8, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (world, tasks, physics) = random_slot(&mut rng, n, m, 150.0);
        let raised = Physics::two_d(SystemParams { f_max: physics.sys.f_max * 1.5, ..physics.sys });
        let assoc = associate(&world, &tasks, &raised);
        prop_assert!(assoc.check(&world, &tasks, &raised).is_ok());
        prop_assert!(slot_energy(&assoc, &tasks, &world, &raised) <= all_local(&world, &tasks, &raised.sys));
    }
}

/// More CPU lets UE2 move to the UAV it prefers, which crowds out UE1, and
/// UE1 has nowhere else to go. Greedy matching is not monotone in `f_max`.
#[test]
fn extra_cpu_can_raise_energy() {
    let ues = vec![
        ue(19.183061432923985, 103.75637580245962),
        ue(51.45812482191905, 142.7010140311608),
        ue(59.70067656406033, 82.3431902264991),
    ];
    let uavs = vec![
        UavState::new([28.493022408771917, 116.59196454663805, 75.0], 0.0),
        UavState::new([115.74951860542937, 69.1835140473546, 75.0], 0.0),
    ];
    let tasks = vec![
        Task::new(382917.25897861575, 18349234100.626305),
        Task::new(117133.74137129329, 4911750647.470144),
        Task::new(389933.3816264195, 9190730950.808826),
    ];
    let world = WorldState::new(ues, uavs);
    let base = Physics::two_d(SystemParams { v_max: 2, f_max: 26169909104.178284, ..SystemParams::default() });
    let raised = Physics::two_d(SystemParams { f_max: base.sys.f_max * 1.5, ..base.sys });

    let a = associate(&world, &tasks, &base);
    let b = associate(&world, &tasks, &raised);
    assert_eq!(a.assign, vec![Some(0), Some(0), Some(1)]);
    assert_eq!(b.assign, vec![Some(0), None, Some(0)]);
    let (ea, eb) = (slot_energy(&a, &tasks, &world, &base), slot_energy(&b, &tasks, &world, &raised));
    assert!(ea < 1e-3 && eb > 11.0, "{ea} {eb}");
    // the exact optimum does not have this problem
    assert!(brute_force(&world, &tasks, &raised.sys) <= brute_force(&world, &tasks, &base.sys));
}
