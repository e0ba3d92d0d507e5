use super::{Task, UserEquipment};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCost {
    /// J
    pub energy: f64,
    /// CPU speed that finishes exactly at the deadline, Hz.
    pub f_local: f64,
}

/// Local execution at the slowest speed meeting the deadline:
/// `f = F/T_max`, `E = k·f^ν·(F/f)`.
pub fn local_energy(task: &Task, ue: &UserEquipment, t_max: f64) -> LocalCost {
    if task.cpu_cycles == 0.0 {
        return LocalCost { energy: 0.0, f_local: 0.0 };
    }
    let f_local = task.cpu_cycles / t_max;
    let energy = ue.kappa * f_local.powf(ue.nu) * (task.cpu_cycles / f_local);
    LocalCost { energy, f_local }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadCost {
    /// Upload time, s.
    pub transmit_s: f64,
    /// Upload plus remote execution, s.
    pub total_s: f64,
    /// UE transmit energy, J.
    pub energy: f64,
}

fn transmit_time(task: &Task, rate: f64, t_max: f64) -> Result<f64> {
    if task.data_bits == 0.0 {
        return Ok(0.0);
    }
    let transmit_s = if rate > 0.0 { task.data_bits / rate } else { f64::INFINITY };
    if transmit_s.is_nan() || transmit_s >= t_max {
        return Err(Error::Infeasible { transmit_s, deadline_s: t_max });
    }
    Ok(transmit_s)
}

/// Time and UE energy of offloading a task at `rate` to a CPU share `f_c`.
pub fn offload_cost(task: &Task, rate: f64, f_c: f64, tx_power: f64, t_max: f64) -> Result<OffloadCost> {
    let transmit_s = transmit_time(task, rate, t_max)?;
    let compute_s = if task.cpu_cycles == 0.0 { 0.0 } else { task.cpu_cycles / f_c };
    Ok(OffloadCost { transmit_s, total_s: transmit_s + compute_s, energy: tx_power * transmit_s })
}

/// Minimal UAV CPU share that meets the deadline, `F/(T_max − D/r)`.
pub fn required_cpu(task: &Task, rate: f64, t_max: f64) -> Result<f64> {
    let transmit_s = transmit_time(task, rate, t_max)?;
    Ok(task.cpu_cycles / (t_max - transmit_s))
}
