use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use fmec_core::experiment::{cat_episode, run_cat_from, run_one, summarize, Algorithm, RunResult};
use fmec_core::rat::{evaluate, Agent, ReplayMode, Trainer, TrainerCheckpoint};
use fmec_core::scenario::generate;
use fmec_core::trace::{cat_trace_csv, fmt_f64, runs_csv, slots_csv, summary_csv, training_csv, uavs_csv, ues_csv};
use fmec_core::{Scenario, ScenarioConfig};
use rayon::prelude::*;

use crate::{CatArgs, CompareArgs, EvalArgs, GenArgs, Pool, Source, TraceArgs, TrainArgs};

/// Sizes the global pool from `FMEC_THREADS` when it is set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("FMEC_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("FMEC_THREADS must be a positive integer, got `{raw}`"))?;
    ensure!(n > 0, "FMEC_THREADS must be at least 1");
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn load_scenario(src: &Source) -> Result<Scenario> {
    if let Some(path) = &src.scenario {
        return Scenario::from_json(&read(path)?).with_context(|| format!("bad scenario {}", path.display()));
    }
    let mut cfg = match &src.config {
        Some(path) => ScenarioConfig::from_json(&read(path)?).with_context(|| format!("bad config {}", path.display()))?,
        None if src.paper_scale => ScenarioConfig::paper_scale(),
        None => ScenarioConfig::desk(),
    };
    if let Some(mode) = src.mode {
        if mode != cfg.mode {
            cfg = cfg.with_mode(mode);
        }
    }
    if let Some(seed) = src.seed {
        cfg.seed = seed;
    }
    Ok(generate(&cfg)?)
}

fn load_checkpoint(path: &Path, sc: &Scenario) -> Result<TrainerCheckpoint> {
    let ck = TrainerCheckpoint::from_json(&read(path)?).with_context(|| format!("bad checkpoint {}", path.display()))?;
    let physics = sc.physics();
    let want = (sc.config.n_uavs * physics.state_dim(), sc.config.n_uavs * physics.action_dim());
    let got = (ck.agent.state_dim(), ck.agent.action_dim());
    ensure!(got == want, "checkpoint expects state/action widths {got:?}, scenario needs {want:?}");
    Ok(ck)
}

fn learned(ck: &TrainerCheckpoint) -> Algorithm {
    match ck.hp.replay {
        ReplayMode::Uniform => Algorithm::Ddpg,
        _ => Algorithm::Rat,
    }
}

fn pool(sc: &Scenario, pool: Pool, count: Option<usize>) -> Result<Vec<Vec<[f64; 2]>>> {
    let all = match pool {
        Pool::Heldout => &sc.heldout,
        Pool::Train => &sc.takeoffs,
    };
    let n = count.unwrap_or(all.len());
    ensure!(n >= 1 && n <= all.len(), "--count must be in 1..={}, got {n}", all.len());
    Ok(all[..n].to_vec())
}

fn takeoff(sc: &Scenario, which: Pool, k: usize) -> Result<Vec<[f64; 2]>> {
    let all = pool(sc, which, None)?;
    all.get(k).cloned().with_context(|| format!("--takeoff {k} is outside the pool of {}", all.len()))
}

/// Every (point, algorithm) run in parallel, merged in input order.
fn run_grid(sc: &Scenario, points: &[Vec<[f64; 2]>], algorithms: &[Algorithm], agent: Option<&Agent>) -> Result<Vec<RunResult>> {
    let jobs: Vec<(Algorithm, usize)> =
        algorithms.iter().flat_map(|&a| (0..points.len()).map(move |k| (a, k))).collect();
    jobs.par_iter().map(|&(a, k)| Ok(run_one(sc, a, &points[k], k, agent)?)).collect()
}

pub fn gen(a: GenArgs) -> Result<()> {
    let sc = load_scenario(&a.source)?;
    write(&a.out, &sc.to_json()?)?;
    println!("wrote {} ({} UEs, {} UAVs, {} slots, {})", a.out.display(), sc.ues.len(), sc.config.n_uavs, sc.n_slots(), sc.config.mode);
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let sc = load_scenario(&a.source)?;
    let mut trainer = match &a.resume {
        Some(path) => {
            let ck = load_checkpoint(path, &sc)?;
            if a.uniform && ck.hp.replay != ReplayMode::Uniform {
                bail!("--uniform conflicts with a prioritized checkpoint");
            }
            Trainer::restore(ck)?
        }
        None if a.uniform => Trainer::uniform(&sc, &sc.config.rat),
        None => Trainer::new(&sc, &sc.config.rat),
    };
    let epochs = a.epochs.unwrap_or(sc.config.rat.epochs);
    let records = trainer.train(&sc, epochs);
    let dir = &a.out_dir;
    write(&dir.join("checkpoint.json"), &trainer.checkpoint().to_json()?)?;
    write(&dir.join("train.csv"), &training_csv(&records))?;
    let log = &evaluate(&trainer.agent, &sc, &sc.heldout[..1])[0];
    write(&dir.join("episode_slots.csv"), &slots_csv(log))?;
    write(&dir.join("episode_uavs.csv"), &uavs_csv(log))?;
    let last = records.last().map_or(0.0, |r| r.energy);
    println!("trained {} epochs to epoch {}; last episode {} J; held-out episode {} J", epochs, trainer.epoch, fmt_f64(last), fmt_f64(log.energy()));
    Ok(())
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let sc = load_scenario(&a.source)?;
    let ck = load_checkpoint(&a.checkpoint, &sc)?;
    let points = pool(&sc, a.pool, a.count)?;
    let algorithms = [learned(&ck), Algorithm::Cat, Algorithm::Cm, Algorithm::Rm, Algorithm::Le];
    let results = run_grid(&sc, &points, &algorithms, Some(&ck.agent))?;
    let mut csv = String::from("index");
    for alg in algorithms {
        csv.push_str(&format!(",{alg}_J"));
    }
    csv.push('\n');
    for k in 0..points.len() {
        csv.push_str(&k.to_string());
        for alg in algorithms {
            let r = results.iter().find(|r| r.algorithm == alg && r.run == k).expect("every job ran");
            csv.push(',');
            csv.push_str(&fmt_f64(r.energy));
        }
        csv.push('\n');
    }
    write(&a.out, &csv)?;
    for s in summarize(&results) {
        println!("{:<5} mean {} J", s.algorithm.to_string(), fmt_f64(s.mean));
    }
    Ok(())
}

pub fn cat(a: CatArgs) -> Result<()> {
    let sc = load_scenario(&a.source)?;
    ensure!(sc.config.mode == fmec_core::Mode::TwoD, "the convex planner works at fixed altitude (2d mode only)");
    let tk = takeoff(&sc, a.pool, a.takeoff)?;
    let trace = run_cat_from(&sc, a.init, &tk);
    write(&a.out, &cat_trace_csv(&trace))?;
    let obj = trace.objectives();
    println!("{} iterations: {} J -> {} J", obj.len(), fmt_f64(obj[0]), fmt_f64(trace.final_objective()));
    Ok(())
}

pub fn compare(a: CompareArgs) -> Result<()> {
    let sc = load_scenario(&a.source)?;
    let agent = match &a.checkpoint {
        Some(path) => load_checkpoint(path, &sc)?.agent,
        None => {
            let mut trainer = Trainer::new(&sc, &sc.config.rat);
            trainer.train(&sc, a.epochs.unwrap_or(sc.config.rat.epochs));
            trainer.agent
        }
    };
    let points = pool(&sc, a.pool, a.count)?;
    let mut algorithms = vec![Algorithm::Le, Algorithm::Rm, Algorithm::Cm];
    if sc.config.mode == fmec_core::Mode::TwoD {
        algorithms.push(Algorithm::Cat);
    }
    algorithms.push(Algorithm::Rat);
    let results = run_grid(&sc, &points, &algorithms, Some(&agent))?;
    let summary = summarize(&results);
    write(&a.out, &summary_csv(&summary))?;
    if let Some(path) = &a.runs_out {
        write(path, &runs_csv(&results))?;
    }
    for s in &summary {
        println!("{:<5} mean {} J  std {} J  ({} runs)", s.algorithm.to_string(), fmt_f64(s.mean), fmt_f64(s.std), s.runs);
    }
    Ok(())
}

pub fn trace(a: TraceArgs) -> Result<()> {
    let sc = load_scenario(&a.source)?;
    let tk = takeoff(&sc, a.pool, a.takeoff)?;
    let log = match a.algorithm {
        Algorithm::Le => bail!("LE does not fly; its energy is in `fmec compare`"),
        Algorithm::Rm => fmec_core::baselines::run_rm(&sc, &tk, a.takeoff as u64),
        Algorithm::Cm => fmec_core::baselines::run_cm(&sc, &tk),
        Algorithm::Cat => {
            ensure!(sc.config.mode == fmec_core::Mode::TwoD, "the convex planner works at fixed altitude (2d mode only)");
            cat_episode(&sc, run_cat_from(&sc, a.init, &tk).last())
        }
        Algorithm::Rat | Algorithm::Ddpg => {
            let path = a.checkpoint.as_ref().with_context(|| format!("{} needs --checkpoint", a.algorithm))?;
            let ck = load_checkpoint(path, &sc)?;
            evaluate(&ck.agent, &sc, &[tk])[0].clone()
        }
    };
    let dir = &a.out_dir;
    write(&dir.join("slots.csv"), &slots_csv(&log))?;
    write(&dir.join("uavs.csv"), &uavs_csv(&log))?;
    write(&dir.join("ues.csv"), &ues_csv(&log))?;
    println!("{} over {} slots: {} J", a.algorithm, log.slots.len(), fmt_f64(log.energy()));
    Ok(())
}
