use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::replay::{Batch, Experience};
use super::RatHyperParams;
use crate::env::Pilot;
use crate::model::{Mode, Physics, UavAction, WorldState};
use crate::nn::{Activation, Adam, DenseNet, Gradients, Optimizer, RmsProp};

/// UAV states normalized by their bounds: `[X, Y, Z]` per UAV, plus the
/// battery fraction in 3-D mode.
pub fn encode_state(world: &WorldState, physics: &Physics) -> Vec<f64> {
    let sys = &physics.sys;
    let band = sys.z_max - sys.z_min;
    let mut s = Vec::with_capacity(world.uavs.len() * physics.state_dim());
    for u in &world.uavs {
        let [x, y, z] = u.position;
        s.push(x / sys.area_x);
        s.push(y / sys.area_y);
        s.push(if band > 0.0 { (z - sys.z_min) / band } else { 0.0 });
        if physics.mode == Mode::ThreeD {
            s.push(u.battery / sys.e_max);
        }
    }
    s
}

/// Maps normalized actions onto `θ_h ∈ [0, 2π]`, `θ_v ∈ [0, π]` (3-D only)
/// and `d ∈ [0, d_max]`.
pub fn decode_actions(norm: &[f64], physics: &Physics) -> Vec<UavAction> {
    let d_max = physics.sys.d_max;
    match physics.mode {
        Mode::TwoD => norm.chunks_exact(2).map(|c| UavAction::level(c[0] * TAU, c[1] * d_max)).collect(),
        Mode::ThreeD => norm
            .chunks_exact(3)
            .map(|c| UavAction { theta_h: c[0] * TAU, theta_v: c[1] * PI, dist: c[2] * d_max })
            .collect(),
    }
}

/// Width of each action's physical range, in the layout of
/// [`decode_actions`], for an action vector of length `len`.
pub fn action_spans(physics: &Physics, len: usize) -> Vec<f64> {
    let per_uav: &[f64] = match physics.mode {
        Mode::TwoD => &[TAU, physics.sys.d_max],
        Mode::ThreeD => &[TAU, PI, physics.sys.d_max],
    };
    per_uav.iter().copied().cycle().take(len).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainStats {
    /// Weighted mean squared TD error before the update.
    pub critic_loss: f64,
    /// TD errors of the batch before the update.
    pub td: Vec<f64>,
}

/// Actor, critic and their target copies with the optimizer states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub actor: DenseNet,
    pub critic: DenseNet,
    pub actor_target: DenseNet,
    pub critic_target: DenseNet,
    pub actor_opt: RmsProp,
    pub critic_opt: Adam,
    pub gamma: f64,
    pub tau: f64,
}

fn sizes(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    std::iter::once(input).chain(hidden.iter().copied()).chain(std::iter::once(output)).collect()
}

impl Agent {
    pub fn new<R: Rng + ?Sized>(state_dim: usize, action_dim: usize, hp: &RatHyperParams, rng: &mut R) -> Self {
        let actor = DenseNet::new(&sizes(state_dim, &hp.hidden, action_dim), Activation::Relu, Activation::Sigmoid, rng);
        let critic =
            DenseNet::new(&sizes(state_dim + action_dim, &hp.hidden, 1), Activation::Relu, Activation::Identity, rng);
        Self {
            actor_opt: RmsProp::new(&actor, hp.actor_lr),
            critic_opt: Adam::new(&critic, hp.critic_lr),
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
            gamma: hp.gamma,
            tau: hp.tau,
        }
    }

    /// Sized for the UAV count and mode of `physics`.
    pub fn for_physics<R: Rng + ?Sized>(n_uavs: usize, physics: &Physics, hp: &RatHyperParams, rng: &mut R) -> Self {
        Self::new(n_uavs * physics.state_dim(), n_uavs * physics.action_dim(), hp, rng)
    }

    pub fn state_dim(&self) -> usize {
        self.actor.input_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.actor.output_dim()
    }

    /// Deterministic policy output in `[0, 1]`.
    pub fn policy(&self, state: &[f64]) -> Vec<f64> {
        self.actor.forward(state).expect("state width matches the actor")
    }

    /// Policy output plus `ρ·N(0, 1)` noise in physical units (radians,
    /// metres), clamped to the action ranges. `spans` holds each range's
    /// width; the result stays normalized to `[0, 1]`.
    pub fn act<R: Rng + ?Sized>(&self, state: &[f64], noise: f64, spans: &[f64], rng: &mut R) -> Vec<f64> {
        let mut a = self.policy(state);
        if noise > 0.0 {
            for (v, span) in a.iter_mut().zip(spans) {
                let n: f64 = rng.sample(StandardNormal);
                *v += noise * n / span;
            }
        }
        a.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        a
    }

    fn critic_input(state: &[f64], action: &[f64]) -> Vec<f64> {
        state.iter().chain(action).copied().collect()
    }

    pub fn q(&self, state: &[f64], action: &[f64]) -> f64 {
        self.critic.forward(&Self::critic_input(state, action)).expect("critic width")[0]
    }

    /// `y = z + γ·Q'(s', π'(s'))`, without bootstrapping past a terminal slot.
    fn target(&self, e: &Experience) -> f64 {
        if e.terminal {
            return e.reward;
        }
        let next = self.actor_target.forward(&e.next_state).expect("actor width");
        let q = self.critic_target.forward(&Self::critic_input(&e.next_state, &next)).expect("critic width")[0];
        e.reward + self.gamma * q
    }

    /// `δ = y − Q(s, c)` with the stored action `c`.
    pub fn td_errors(&self, items: &[Experience]) -> Vec<f64> {
        items.iter().map(|e| self.target(e) - self.q(&e.state, &e.action)).collect()
    }

    /// One critic step on the weighted squared TD loss, one actor step along
    /// the deterministic policy gradient, then soft target updates.
    pub fn train_on_batch(&mut self, batch: &Batch) -> TrainStats {
        let k = batch.items.len() as f64;
        let mut critic_grads = Gradients::zeros_like(&self.critic);
        let mut td = Vec::with_capacity(batch.items.len());
        let mut loss = 0.0;
        for (e, &w) in batch.items.iter().zip(&batch.weights) {
            let y = self.target(e);
            let tape = self.critic.forward_tape(&Self::critic_input(&e.state, &e.action)).expect("critic width");
            let delta = y - tape.output()[0];
            loss += w * delta * delta / k;
            self.critic.backward(&tape, &[-2.0 * w * delta / k], &mut critic_grads);
            td.push(delta);
        }
        self.critic_opt.step(&mut self.critic, &critic_grads);

        let mut actor_grads = Gradients::zeros_like(&self.actor);
        let mut scratch = Gradients::zeros_like(&self.critic);
        let s_dim = self.state_dim();
        for e in &batch.items {
            let a_tape = self.actor.forward_tape(&e.state).expect("actor width");
            let q_tape = self.critic.forward_tape(&Self::critic_input(&e.state, a_tape.output())).expect("critic width");
            let dq = self.critic.backward(&q_tape, &[1.0], &mut scratch);
            // ascend Q: descend −Q/K
            let grad_a: Vec<f64> = dq[s_dim..].iter().map(|g| -g / k).collect();
            self.actor.backward(&a_tape, &grad_a, &mut actor_grads);
        }
        self.actor_opt.step(&mut self.actor, &actor_grads);

        self.actor_target.soft_update(&self.actor, self.tau);
        self.critic_target.soft_update(&self.critic, self.tau);
        TrainStats { critic_loss: loss, td }
    }
}

/// Flies with an agent's policy, optionally with exploration noise.
pub struct AgentPilot<'a, R: Rng> {
    pub agent: &'a Agent,
    pub physics: &'a Physics,
    pub noise: f64,
    pub rng: R,
    /// Normalized actions taken, one entry per slot.
    pub taken: Vec<Vec<f64>>,
}

impl<'a, R: Rng> AgentPilot<'a, R> {
    pub fn greedy(agent: &'a Agent, physics: &'a Physics, rng: R) -> Self {
        Self { agent, physics, noise: 0.0, rng, taken: Vec::new() }
    }
}

impl<R: Rng> Pilot for AgentPilot<'_, R> {
    fn actions(&mut self, _slot: usize, world: &WorldState) -> Vec<UavAction> {
        let s = encode_state(world, self.physics);
        let spans = action_spans(self.physics, self.agent.action_dim());
        let a = self.agent.act(&s, self.noise, &spans, &mut self.rng);
        let actions = decode_actions(&a, self.physics);
        self.taken.push(a);
        actions
    }
}
