//! DDPG with prioritized experience replay steering the UAVs; per-slot
//! association comes from the greedy matcher.
//!
//! States are UAV positions (plus battery in 3-D) normalized by their bounds.
//! The actor ends in a sigmoid, so each action component lives in `[0, 1]`
//! and is mapped affinely onto heading, vertical angle and distance.

mod agent;
mod replay;
mod sumtree;
mod train;

pub use agent::{decode_actions, encode_state, Agent, AgentPilot, TrainStats};
pub use replay::{importance_weight, Batch, Experience, ReplayBuffer, ReplayMode};
pub use sumtree::SumTree;
pub use train::{evaluate, reward_scale, EpochRecord, Trainer, TrainerCheckpoint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatHyperParams {
    pub gamma: f64,
    pub batch: usize,
    pub buffer: usize,
    pub tau: f64,
    /// Prioritization exponent.
    pub beta: f64,
    /// Importance-sampling exponent.
    pub mu: f64,
    /// Added to `|δ|` when refreshing priorities.
    pub eps: f64,
    /// Initial exploration noise scale.
    pub noise: f64,
    /// Per-step multiplicative noise decay.
    pub noise_decay: f64,
    pub epochs: usize,
    pub hidden: Vec<usize>,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub replay: ReplayMode,
    /// Divisor applied to rewards before they reach the networks. `None`
    /// uses the expected all-local energy of one slot.
    pub reward_scale: Option<f64>,
}

impl Default for RatHyperParams {
    fn default() -> Self {
        Self::desk()
    }
}

impl RatHyperParams {
    pub fn desk() -> Self {
        Self {
            gamma: 0.999,
            batch: 64,
            buffer: 5000,
            tau: 0.001,
            beta: 0.6,
            mu: 0.4,
            eps: 0.001,
            noise: 2.0,
            noise_decay: 0.9995,
            epochs: 300,
            hidden: vec![256, 128, 64],
            actor_lr: 1e-3,
            critic_lr: 1e-3,
            replay: ReplayMode::Prioritized,
            reward_scale: None,
        }
    }

    pub fn paper_scale() -> Self {
        Self { batch: 128, buffer: 30_000, epochs: 3000, hidden: vec![1024, 800, 600], ..Self::desk() }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = [("gamma", self.gamma), ("beta", self.beta), ("mu", self.mu), ("tau", self.tau), ("noise_decay", self.noise_decay)];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("rat.{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.batch == 0 || self.batch > self.buffer {
            return Err(Error::Config(format!("rat.batch must be in 1..=buffer ({}), got {}", self.buffer, self.batch)));
        }
        if self.hidden.contains(&0) {
            return Err(Error::Config("rat.hidden layer sizes must be positive".into()));
        }
        for (name, v) in [("eps", self.eps), ("noise", self.noise)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("rat.{name} must be non-negative, got {v}")));
            }
        }
        for (name, v) in [("actor_lr", self.actor_lr), ("critic_lr", self.critic_lr)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("rat.{name} must be positive, got {v}")));
            }
        }
        if let Some(s) = self.reward_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("rat.reward_scale must be positive, got {s}")));
            }
        }
        Ok(())
    }
}
