use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agent::{action_spans, decode_actions, encode_state, Agent, AgentPilot};
use super::replay::{Experience, ReplayBuffer, ReplayMode};
use super::RatHyperParams;
use crate::env::{run_episode, step, EpisodeLog};
use crate::error::{Error, Result};
use crate::model::WorldState;
use crate::scenario::{stream_rng, Scenario, Stream};

pub const TRAINER_FORMAT: &str = "fmec-agent";
pub const TRAINER_VERSION: u32 = 1;

/// Expected all-local UE energy of one slot when cycles are uniform on
/// `[F_lo, F_hi]`: `N·κ·E[F^ν]/T^(ν−1)`.
pub fn reward_scale(scenario: &Scenario) -> f64 {
    let cfg = &scenario.config;
    let [lo, hi] = cfg.cpu_cycles;
    let t = cfg.system.t_max;
    let nu = cfg.ue.nu;
    let moment = if hi > lo { (hi.powf(nu + 1.0) - lo.powf(nu + 1.0)) / ((nu + 1.0) * (hi - lo)) } else { lo.powf(nu) };
    let s = cfg.n_ues as f64 * cfg.ue.kappa * moment / t.powf(nu - 1.0);
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

/// One row of the training trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Total UE energy of the episode, J.
    pub energy: f64,
    /// Unscaled episode reward.
    pub reward: f64,
    /// Noise scale at the end of the epoch.
    pub noise: f64,
    /// Mean critic loss over the epoch's updates; zero before learning starts.
    pub critic_loss: f64,
}

/// Training state that survives between epochs.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub agent: Agent,
    pub buffer: ReplayBuffer,
    pub hp: RatHyperParams,
    pub noise: f64,
    pub epoch: usize,
    pub reward_scale: f64,
    rng: ChaCha8Rng,
}

/// Serialized networks, optimizer states, RNG and schedule position.
/// The replay buffer is not part of a checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainerCheckpoint {
    pub format: String,
    pub version: u32,
    pub hp: RatHyperParams,
    pub agent: Agent,
    pub noise: f64,
    pub epoch: usize,
    pub reward_scale: f64,
    pub rng: ChaCha8Rng,
}

impl Trainer {
    pub fn new(scenario: &Scenario, hp: &RatHyperParams) -> Self {
        let physics = scenario.physics();
        let seed = scenario.config.seed;
        let agent = Agent::for_physics(scenario.config.n_uavs, &physics, hp, &mut stream_rng(seed, Stream::AgentInit));
        Self {
            agent,
            buffer: ReplayBuffer::new(hp.buffer, hp.replay, hp.beta, hp.mu, hp.eps),
            hp: hp.clone(),
            noise: hp.noise,
            epoch: 0,
            reward_scale: hp.reward_scale.unwrap_or_else(|| reward_scale(scenario)),
            rng: stream_rng(seed, Stream::Training),
        }
    }

    /// Uniform-replay variant with otherwise identical settings.
    pub fn uniform(scenario: &Scenario, hp: &RatHyperParams) -> Self {
        Self::new(scenario, &RatHyperParams { replay: ReplayMode::Uniform, ..hp.clone() })
    }

    /// One episode from the next take-off point of the training pool, learning
    /// after every slot once the buffer is full.
    pub fn run_epoch(&mut self, scenario: &Scenario) -> EpochRecord {
        let physics = scenario.physics();
        let takeoff = &scenario.takeoffs[self.epoch % scenario.takeoffs.len()];
        let mut world = WorldState::new(scenario.ues.clone(), scenario.start_states(takeoff));
        let n_slots = scenario.tasks.len();
        let spans = action_spans(&physics, self.agent.action_dim());
        let (mut energy, mut reward, mut loss, mut updates) = (0.0, 0.0, 0.0, 0usize);
        for (t, tasks) in scenario.tasks.iter().enumerate() {
            let state = encode_state(&world, &physics);
            let action = self.agent.act(&state, self.noise, &spans, &mut self.rng);
            let (next, log) = step(&world, &decode_actions(&action, &physics), tasks, &physics, t);
            energy += log.energy;
            reward += log.reward;
            self.buffer.push(Experience {
                state,
                action,
                reward: log.reward / self.reward_scale,
                next_state: encode_state(&next, &physics),
                terminal: t + 1 == n_slots,
            });
            if let Some(batch) = self.buffer.sample(self.hp.batch, &mut self.rng) {
                let stats = self.agent.train_on_batch(&batch);
                self.buffer.update_priorities(&batch.indices, &stats.td);
                loss += stats.critic_loss;
                updates += 1;
            }
            self.noise *= self.hp.noise_decay;
            world = next;
        }
        let record = EpochRecord {
            epoch: self.epoch,
            energy,
            reward,
            noise: self.noise,
            critic_loss: if updates > 0 { loss / updates as f64 } else { 0.0 },
        };
        self.epoch += 1;
        record
    }

    pub fn train(&mut self, scenario: &Scenario, epochs: usize) -> Vec<EpochRecord> {
        (0..epochs).map(|_| self.run_epoch(scenario)).collect()
    }

    pub fn checkpoint(&self) -> TrainerCheckpoint {
        TrainerCheckpoint {
            format: TRAINER_FORMAT.into(),
            version: TRAINER_VERSION,
            hp: self.hp.clone(),
            agent: self.agent.clone(),
            noise: self.noise,
            epoch: self.epoch,
            reward_scale: self.reward_scale,
            rng: self.rng.clone(),
        }
    }

    /// Resumes from a checkpoint with an empty replay buffer.
    pub fn restore(ck: TrainerCheckpoint) -> Result<Self> {
        ck.validate()?;
        Ok(Self {
            buffer: ReplayBuffer::new(ck.hp.buffer, ck.hp.replay, ck.hp.beta, ck.hp.mu, ck.hp.eps),
            agent: ck.agent,
            hp: ck.hp,
            noise: ck.noise,
            epoch: ck.epoch,
            reward_scale: ck.reward_scale,
            rng: ck.rng,
        })
    }
}

impl TrainerCheckpoint {
    pub fn validate(&self) -> Result<()> {
        if self.format != TRAINER_FORMAT {
            return Err(Error::Config(format!("not an agent checkpoint (format `{}`)", self.format)));
        }
        if self.version != TRAINER_VERSION {
            return Err(Error::SchemaVersion { found: self.version, expected: TRAINER_VERSION });
        }
        for net in [&self.agent.actor, &self.agent.critic, &self.agent.actor_target, &self.agent.critic_target] {
            net.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ck: Self = serde_json::from_str(s)?;
        ck.validate()?;
        Ok(ck)
    }
}

/// Noise-free episodes of `agent` from each take-off point.
pub fn evaluate(agent: &Agent, scenario: &Scenario, takeoffs: &[Vec<[f64; 2]>]) -> Vec<EpisodeLog> {
    let physics = scenario.physics();
    takeoffs
        .iter()
        .map(|tk| {
            let start = WorldState::new(scenario.ues.clone(), scenario.start_states(tk));
            let mut pilot = AgentPilot::greedy(agent, &physics, stream_rng(0, Stream::Training));
            run_episode(&mut pilot, start, &scenario.tasks, &physics)
        })
        .collect()
}
