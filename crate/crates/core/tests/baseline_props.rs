//! Orderings between the comparison policies on the desk scenario.

use fmec_core::baselines::{run_cm, run_le, run_rm};
use fmec_core::experiment::{run_cat_from, InitScheme};
use fmec_core::rat::{evaluate, Trainer};
use fmec_core::scenario::generate;
use fmec_core::ScenarioConfig;

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn random_moving_beats_local_on_average() {
    let sc = generate(&ScenarioConfig::desk()).unwrap();
    let rm = mean((0..50).map(|s| run_rm(&sc, &sc.takeoffs[s % 20], s as u64).energy()));
    assert!(rm <= run_le(&sc), "{rm}");
}

#[test]
fn cluster_moving_beats_random_moving() {
    let sc = generate(&ScenarioConfig::desk()).unwrap();
    let cm = mean(sc.heldout.iter().map(|tk| run_cm(&sc, tk).energy()));
    let rm = mean(sc.heldout.iter().enumerate().map(|(s, tk)| run_rm(&sc, tk, s as u64).energy()));
    assert!(cm <= rm, "CM {cm} vs RM {rm}");
}

#[test]
fn untrained_agent_is_about_as_good_as_random() {
    let (mut agent, mut rm) = (0.0, 0.0);
    for seed in 1..=20 {
        let sc = generate(&ScenarioConfig { seed, ..ScenarioConfig::desk() }).unwrap();
        let trainer = Trainer::new(&sc, &sc.config.rat);
        agent += evaluate(&trainer.agent, &sc, &sc.heldout[..1])[0].energy();
        rm += run_rm(&sc, &sc.heldout[0], seed).energy();
    }
    assert!((agent - rm).abs() <= 0.2 * rm, "untrained {agent} vs RM {rm}");
}

#[test]
fn cat_from_three_circles_never_rises() {
    let cfg = ScenarioConfig { n_ues: 10, n_uavs: 1, ..ScenarioConfig::desk() };
    let sc = generate(&cfg).unwrap();
    for r in [80.0, 100.0, 120.0] {
        let trace = run_cat_from(&sc, InitScheme::Circle(r), &sc.takeoffs[0]);
        let obj = trace.objectives();
        assert!(trace.is_monotone(1e-6), "radius {r}: {obj:?}");
        assert!(obj.last() <= obj.first());
        assert!(obj.len() <= 10);
        for it in &trace.iterations {
            assert!(it.trajectory.is_feasible(&cfg.system));
        }
    }
}
