//! End-to-end runs of the `fmec` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fmec(dir: &Path, threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmec"))
        .args(args)
        .current_dir(dir)
        .env("FMEC_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = fmec(dir, "2", args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = fmec(dir, "2", args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

/// A small config that trains in well under a second.
const CONFIG: &str = r#"{
  "schema_version": 1,
  "seed": 5,
  "n_ues": 10,
  "n_uavs": 2,
  "n_slots": 8,
  "data_kb": [10, 50],
  "cpu_cycles": [2e9, 2e10],
  "rat": { "hidden": [24, 16], "buffer": 64, "batch": 16, "epochs": 20 },
  "heldout_pool": 5
}"#;

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("cfg.json"), CONFIG).unwrap();
    ok(dir.path(), &["gen", "--config", "cfg.json", "--out", "s.json"]);
    dir
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn compare_writes_one_row_per_algorithm() {
    let dir = setup();
    let d = dir.path();
    ok(d, &["compare", "--scenario", "s.json", "--out", "cmp.csv", "--runs-out", "runs.csv"]);
    let text = fs::read_to_string(d.join("cmp.csv")).unwrap();
    assert!(text.starts_with("algorithm,runs,mean_energy_J,std_energy_J\n"));
    let summary = rows(&d.join("cmp.csv"));
    let names: Vec<&str> = summary.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["LE", "RM", "CM", "CAT", "RAT"]);
    // the summary means are the means of the detail file
    let runs = rows(&d.join("runs.csv"));
    for r in &summary {
        let e: Vec<f64> = runs.iter().filter(|x| x[0] == r[0]).map(|x| num(&x[2])).collect();
        assert_eq!(e.len(), 5);
        let mean = e.iter().sum::<f64>() / 5.0;
        assert!((mean - num(&r[2])).abs() <= 1e-8 * mean, "{}", r[0]);
    }
}

#[test]
fn trace_totals_match_their_details() {
    let dir = setup();
    let d = dir.path();
    for alg in ["rm", "cm", "cat"] {
        ok(d, &["trace", "--scenario", "s.json", "--algorithm", alg, "--out-dir", alg]);
        let slots = rows(&d.join(alg).join("slots.csv"));
        let ues = rows(&d.join(alg).join("ues.csv"));
        assert_eq!(slots.len(), 8);
        for s in &slots {
            let detail: f64 = ues.iter().filter(|u| u[0] == s[0]).map(|u| num(&u[4])).sum();
            let total = num(&s[1]);
            assert!((detail - total).abs() <= 1e-7 * total.max(1.0), "{alg} slot {}: {detail} vs {total}", s[0]);
            let matched = ues.iter().filter(|u| u[0] == s[0] && !u[2].is_empty()).count();
            assert_eq!(matched.to_string(), s[5]);
        }
    }
}

#[test]
fn train_then_eval_on_five_heldout_points() {
    let dir = setup();
    let d = dir.path();
    ok(d, &["train", "--scenario", "s.json", "--out-dir", "run"]);
    let train = rows(&d.join("run/train.csv"));
    assert_eq!(train.len(), 20);
    assert!(train.last().unwrap()[4] != "0.00000000e0", "learning started");
    ok(d, &["eval", "--scenario", "s.json", "--checkpoint", "run/checkpoint.json", "--out", "ev.csv"]);
    let text = fs::read_to_string(d.join("ev.csv")).unwrap();
    assert!(text.starts_with("index,RAT_J,CAT_J,CM_J,RM_J,LE_J\n"));
    let ev = rows(&d.join("ev.csv"));
    assert_eq!(ev.len(), 5);
    for r in &ev {
        let le = num(&r[5]);
        assert!(r[1..5].iter().all(|x| num(x) <= le), "{r:?}");
    }
    // resuming continues the epoch count
    let out = ok(d, &["train", "--scenario", "s.json", "--resume", "run/checkpoint.json", "--epochs", "3", "--out-dir", "more"]);
    assert!(out.contains("to epoch 23"), "{out}");
}

#[test]
fn three_d_training_records_battery_traces() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["train", "--mode", "3d", "--epochs", "2", "--out-dir", "run"]);
    let uavs = rows(&d.join("run/episode_uavs.csv"));
    for j in ["0", "1"] {
        let battery: Vec<f64> = uavs.iter().filter(|r| r[1] == j).map(|r| num(&r[5])).collect();
        assert_eq!(battery.len(), 20);
        assert!(battery.windows(2).all(|w| w[1] < w[0]), "UAV {j}: {battery:?}");
        assert!(battery[0] < 1e6);
    }
}

#[test]
fn pipeline_is_byte_identical_across_thread_counts() {
    let outputs: Vec<Vec<Vec<u8>>> = ["1", "4"]
        .iter()
        .map(|threads| {
            let dir = TempDir::new().unwrap();
            let d = dir.path();
            fs::write(d.join("cfg.json"), CONFIG).unwrap();
            for args in [
                &["gen", "--config", "cfg.json", "--out", "s.json"][..],
                &["train", "--scenario", "s.json", "--out-dir", "run"],
                &["eval", "--scenario", "s.json", "--checkpoint", "run/checkpoint.json", "--out", "ev.csv"],
                &["compare", "--scenario", "s.json", "--checkpoint", "run/checkpoint.json", "--out", "cmp.csv", "--runs-out", "runs.csv"],
            ] {
                assert!(fmec(d, threads, args).status.success(), "{args:?}");
            }
            ["s.json", "run/checkpoint.json", "run/train.csv", "run/episode_uavs.csv", "ev.csv", "cmp.csv", "runs.csv"]
                .iter()
                .map(|f| fs::read(d.join(f)).unwrap())
                .collect()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bad_inputs_exit_nonzero_with_a_message() {
    let dir = setup();
    let d = dir.path();
    assert!(fails(d, &["cat", "--scenario", "missing.json", "--out", "x.csv"]).contains("missing.json"));

    let v2 = CONFIG.replace("\"schema_version\": 1", "\"schema_version\": 2");
    fs::write(d.join("v2.json"), v2).unwrap();
    assert!(fails(d, &["gen", "--config", "v2.json", "--out", "x.json"]).contains("schema version"));

    let extra = CONFIG.replace("\"seed\": 5", "\"seed\": 5, \"colour\": 1");
    fs::write(d.join("extra.json"), extra).unwrap();
    assert!(fails(d, &["gen", "--config", "extra.json", "--out", "x.json"]).contains("colour"));

    assert!(fails(d, &["trace", "--scenario", "s.json", "--algorithm", "rat", "--out-dir", "t"]).contains("--checkpoint"));
    assert!(fails(d, &["cat", "--scenario", "s.json", "--init", "spiral", "--out", "x.csv"]).contains("spiral"));
    assert!(fails(d, &["eval", "--scenario", "s.json", "--checkpoint", "s.json", "--out", "x.csv"]).contains("checkpoint"));

    let out = fmec(d, "zero", &["gen", "--out", "x.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("FMEC_THREADS"));
}
