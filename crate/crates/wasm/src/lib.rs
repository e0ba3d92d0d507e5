//! Browser bindings: generate a scenario, fly a baseline, run the convex planner.
//!
//! Every entry point returns a JSON string so the page needs no glue beyond
//! `JSON.parse`.

use fmec_core::baselines::{run_cm, run_le, run_rm};
use fmec_core::env::EpisodeLog;
use fmec_core::experiment::{run_cat_from, InitScheme};
use fmec_core::scenario::generate;
use fmec_core::{Scenario, ScenarioConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
pub struct World {
    pub width: f64,
    pub height: f64,
    pub ues: Vec<[f64; 2]>,
    pub takeoff: Vec<[f64; 2]>,
    pub local_energy: f64,
}

#[derive(Serialize)]
pub struct Flight {
    pub energy: f64,
    pub local_energy: f64,
    pub slot_energy: Vec<f64>,
    /// `paths[j]` starts at UAV j's take-off point.
    pub paths: Vec<Vec<[f64; 2]>>,
    /// Serving UAV of every UE in the last slot.
    pub last_assignment: Vec<Option<usize>>,
}

#[derive(Serialize)]
pub struct Plan {
    pub objectives: Vec<f64>,
    pub local_energy: f64,
    pub paths: Vec<Vec<[f64; 2]>>,
}

fn scenario(seed: u64, n_ues: usize, n_uavs: usize) -> fmec_core::Result<Scenario> {
    generate(&ScenarioConfig { seed, n_ues, n_uavs, ..ScenarioConfig::desk() })
}

pub fn world(seed: u64, n_ues: usize, n_uavs: usize) -> fmec_core::Result<World> {
    let sc = scenario(seed, n_ues, n_uavs)?;
    Ok(World {
        width: sc.config.system.area_x,
        height: sc.config.system.area_y,
        ues: sc.ues.iter().map(|u| u.position).collect(),
        takeoff: sc.heldout[0].clone(),
        local_energy: run_le(&sc),
    })
}

fn paths(log: &EpisodeLog) -> Vec<Vec<[f64; 2]>> {
    (0..log.takeoff.len())
        .map(|j| {
            std::iter::once(&log.takeoff[j])
                .chain(log.slots.iter().map(|s| &s.uavs[j]))
                .map(|u| [u.position[0], u.position[1]])
                .collect()
        })
        .collect()
}

/// `algorithm` is `rm` or `cm`.
pub fn flight(seed: u64, n_ues: usize, n_uavs: usize, algorithm: &str) -> fmec_core::Result<Flight> {
    let sc = scenario(seed, n_ues, n_uavs)?;
    let tk = &sc.heldout[0];
    let log = match algorithm {
        "rm" => run_rm(&sc, tk, seed),
        "cm" => run_cm(&sc, tk),
        other => return Err(fmec_core::Error::Config(format!("unknown baseline `{other}` (rm | cm)"))),
    };
    Ok(Flight {
        energy: log.energy(),
        local_energy: run_le(&sc),
        slot_energy: log.slots.iter().map(|s| s.energy).collect(),
        paths: paths(&log),
        last_assignment: log.slots.last().map(|s| s.association.assign.clone()).unwrap_or_default(),
    })
}

pub fn plan(seed: u64, n_ues: usize, n_uavs: usize, radius: f64) -> fmec_core::Result<Plan> {
    let sc = scenario(seed, n_ues, n_uavs)?;
    let init = if radius > 0.0 { InitScheme::Circle(radius) } else { InitScheme::Cluster };
    let trace = run_cat_from(&sc, init, &sc.heldout[0]);
    Ok(Plan {
        objectives: trace.objectives(),
        local_energy: run_le(&sc),
        paths: trace.last().trajectory.waypoints.clone(),
    })
}

fn to_js<T: Serialize>(r: fmec_core::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = world)]
pub fn world_js(seed: u32, n_ues: usize, n_uavs: usize) -> Result<String, JsError> {
    to_js(world(seed.into(), n_ues, n_uavs))
}

#[wasm_bindgen(js_name = flight)]
pub fn flight_js(seed: u32, n_ues: usize, n_uavs: usize, algorithm: &str) -> Result<String, JsError> {
    to_js(flight(seed.into(), n_ues, n_uavs, algorithm))
}

/// A radius of 0 starts from the cluster route instead of a circle.
#[wasm_bindgen(js_name = plan)]
pub fn plan_js(seed: u32, n_ues: usize, n_uavs: usize, radius: f64) -> Result<String, JsError> {
    to_js(plan(seed.into(), n_ues, n_uavs, radius))
}
