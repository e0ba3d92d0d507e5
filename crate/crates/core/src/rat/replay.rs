use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sumtree::SumTree;

/// How transitions are drawn from the buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayMode {
    /// Proportional to `p^β`, priorities refreshed to `|δ| + ε` after each update.
    #[default]
    Prioritized,
    /// Independent uniform draws with unit importance weights.
    Uniform,
    /// The prioritized code path with priorities pinned to one.
    Frozen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experience {
    pub state: Vec<f64>,
    /// Normalized action in `[0, 1]` per component.
    pub action: Vec<f64>,
    /// Scaled reward.
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub indices: Vec<usize>,
    /// Sampling probability of each drawn transition.
    pub probs: Vec<f64>,
    /// Importance weights.
    pub weights: Vec<f64>,
    pub items: Vec<Experience>,
}

/// Cyclic replay memory with a sum tree over `p^β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayBuffer {
    pub mode: ReplayMode,
    pub beta: f64,
    pub mu: f64,
    pub eps: f64,
    capacity: usize,
    items: Vec<Experience>,
    head: usize,
    tree: SumTree,
    max_priority: f64,
}

/// `ω = (X·P)^(−μ)`. The product is formed before dividing by the total so
/// equal priorities give exactly one.
pub fn importance_weight(leaf: f64, total: f64, stored: usize, mu: f64) -> f64 {
    (stored as f64 * leaf / total).powf(-mu)
}

impl ReplayBuffer {
    pub fn new(capacity: usize, mode: ReplayMode, beta: f64, mu: f64, eps: f64) -> Self {
        Self { mode, beta, mu, eps, capacity, items: Vec::with_capacity(capacity), head: 0, tree: SumTree::new(capacity), max_priority: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.items.len() == self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn tree(&self) -> &SumTree {
        &self.tree
    }

    pub fn items(&self) -> &[Experience] {
        &self.items
    }

    /// Stores a transition with the largest priority seen so far, overwriting
    /// the oldest one once full.
    pub fn push(&mut self, exp: Experience) {
        if self.items.len() < self.capacity {
            self.items.push(exp);
        } else {
            self.items[self.head] = exp;
        }
        self.tree.set(self.head, self.max_priority.powf(self.beta));
        self.head = (self.head + 1) % self.capacity;
    }

    /// Sampling probability of slot `idx`.
    pub fn probability(&self, idx: usize) -> f64 {
        match self.mode {
            ReplayMode::Uniform => 1.0 / self.items.len() as f64,
            _ => self.tree.get(idx) / self.tree.total(),
        }
    }

    /// Draws `k` transitions; `None` until the buffer is full.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Option<Batch> {
        if !self.is_full() || k == 0 {
            return None;
        }
        let n = self.items.len();
        let mut indices = Vec::with_capacity(k);
        let mut probs = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        match self.mode {
            ReplayMode::Uniform => {
                for _ in 0..k {
                    indices.push(rng.gen_range(0..n));
                    probs.push(1.0 / n as f64);
                    weights.push(1.0);
                }
            }
            ReplayMode::Prioritized | ReplayMode::Frozen => {
                let total = self.tree.total();
                let segment = total / k as f64;
                for s in 0..k {
                    let u = ((s as f64 + rng.gen::<f64>()) * segment).min(total);
                    let idx = self.tree.find(u);
                    let leaf = self.tree.get(idx);
                    indices.push(idx);
                    probs.push(leaf / total);
                    weights.push(importance_weight(leaf, total, n, self.mu));
                }
            }
        }
        let items = indices.iter().map(|&i| self.items[i].clone()).collect();
        Some(Batch { indices, probs, weights, items })
    }

    /// Sets the priority of each sampled slot to `|δ| + ε`.
    pub fn update_priorities(&mut self, indices: &[usize], td: &[f64]) {
        if self.mode != ReplayMode::Prioritized {
            return;
        }
        for (&i, &d) in indices.iter().zip(td) {
            let p = d.abs() + self.eps;
            self.max_priority = self.max_priority.max(p);
            self.tree.set(i, p.powf(self.beta));
        }
    }

    /// Raw priority `p` of slot `idx`.
    pub fn priority(&self, idx: usize) -> f64 {
        self.tree.get(idx).powf(1.0 / self.beta)
    }
}
