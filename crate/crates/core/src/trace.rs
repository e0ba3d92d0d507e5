//! CSV export. Floats are written in scientific notation with nine
//! significant digits so files are compact and byte-stable.

use std::fmt::Write as _;

use crate::cat::CatTrace;
use crate::env::EpisodeLog;
use crate::experiment::{RunResult, Summary};
use crate::rat::EpochRecord;

/// Nine significant digits, e.g. `1.24939419e8`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0.00000000e0".to_string()
    } else {
        format!("{x:.8e}")
    }
}

/// Parses a value written by [`fmt_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

fn table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn cat_trace_csv(trace: &CatTrace) -> String {
    table(
        "iter,objective_J,wall_ms",
        trace.iterations.iter().map(|it| vec![it.iter.to_string(), fmt_f64(it.objective), fmt_f64(it.wall_ms)]),
    )
}

pub fn training_csv(records: &[EpochRecord]) -> String {
    table(
        "epoch,sum_energy_J,sum_reward,noise_rho,critic_loss",
        records.iter().map(|r| {
            vec![r.epoch.to_string(), fmt_f64(r.energy), fmt_f64(r.reward), fmt_f64(r.noise), fmt_f64(r.critic_loss)]
        }),
    )
}

/// One row per slot with the episode totals' constituents.
pub fn slots_csv(log: &EpisodeLog) -> String {
    table(
        "slot,energy_J,uav_energy_J,reward,violations,matched",
        log.slots.iter().map(|s| {
            vec![
                s.slot.to_string(),
                fmt_f64(s.energy),
                fmt_f64(s.uav_energy),
                fmt_f64(s.reward),
                s.violated.iter().filter(|v| **v).count().to_string(),
                s.association.matched_count().to_string(),
            ]
        }),
    )
}

/// One row per (slot, UAV): position after the move, battery, power and action.
pub fn uavs_csv(log: &EpisodeLog) -> String {
    let mut rows = Vec::new();
    for s in &log.slots {
        for (j, u) in s.uavs.iter().enumerate() {
            let a = &s.actions[j];
            rows.push(vec![
                s.slot.to_string(),
                j.to_string(),
                fmt_f64(u.position[0]),
                fmt_f64(u.position[1]),
                fmt_f64(u.position[2]),
                fmt_f64(u.battery),
                fmt_f64(s.power[j]),
                fmt_f64(a.theta_h),
                fmt_f64(a.theta_v),
                fmt_f64(a.dist),
                u8::from(s.violated[j]).to_string(),
            ]);
        }
    }
    table("slot,uav,x_m,y_m,z_m,battery_J,power_W,theta_h,theta_v,dist_m,violated", rows)
}

/// One row per (slot, UE); `uav` is empty for local execution.
pub fn ues_csv(log: &EpisodeLog) -> String {
    let mut rows = Vec::new();
    for s in &log.slots {
        for (i, e) in s.ue_energy.iter().enumerate() {
            let uav = s.association.assign[i].map(|j| j.to_string()).unwrap_or_default();
            rows.push(vec![s.slot.to_string(), i.to_string(), uav, fmt_f64(s.association.f_c[i]), fmt_f64(*e)]);
        }
    }
    table("slot,ue,uav,f_c_Hz,energy_J", rows)
}

pub fn runs_csv(results: &[RunResult]) -> String {
    table(
        "algorithm,run,energy_J",
        results.iter().map(|r| vec![r.algorithm.to_string(), r.run.to_string(), fmt_f64(r.energy)]),
    )
}

pub fn summary_csv(summary: &[Summary]) -> String {
    let mut out = String::from("algorithm,runs,mean_energy_J,std_energy_J\n");
    for s in summary {
        let _ = writeln!(out, "{},{},{},{}", s.algorithm, s.runs, fmt_f64(s.mean), fmt_f64(s.std));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_f64(124939419.3275909), "1.24939419e8");
        assert_eq!(fmt_f64(-0.4212249), "-4.21224900e-1");
        assert_eq!(fmt_f64(0.0), "0.00000000e0");
        assert_eq!(parse_f64("1.24939419e8"), Some(124939419.0));
    }
}
