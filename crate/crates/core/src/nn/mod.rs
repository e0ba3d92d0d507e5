//! Small dense networks with reverse-mode gradients, enough for an
//! actor-critic pair at desk scale.
//!
//! Weights are stored row-major as `out × in`. A forward pass can record a
//! [`Tape`] that [`DenseNet::backward`] consumes to produce parameter
//! gradients and the gradient with respect to the input.

mod optim;

pub use optim::{Adam, Optimizer, RmsProp};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "fmec-densenet";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed through the activation's output `y`.
    fn derivative(self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub activation: Activation,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn forward_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (row, b) in self.weights.chunks_exact(self.n_in).zip(&self.bias) {
            let z: f64 = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b;
            out.push(self.activation.apply(z));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
}

/// Gradient buffers shaped like a network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.weights.iter_mut().chain(self.bias.iter_mut()).flatten().for_each(|g| *g *= s);
    }

    /// All entries, layer by layer, weights before bias.
    pub fn flatten(&self) -> Vec<f64> {
        self.weights.iter().zip(&self.bias).flat_map(|(w, b)| w.iter().chain(b).copied()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.flatten().iter().all(|&g| g == 0.0)
    }
}

/// Post-activation values of every layer, input first.
#[derive(Debug, Clone)]
pub struct Tape {
    values: Vec<Vec<f64>>,
}

impl Tape {
    pub fn output(&self) -> &[f64] {
        self.values.last().expect("tape holds at least the input")
    }
}

/// On-disk form of a network.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Checkpoint {
    format: String,
    version: u32,
    layers: Vec<Layer>,
}

impl DenseNet {
    /// Random network with uniform fan-in initialization `U(±1/√n_in)` for
    /// weights and biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], hidden: Activation, output: Activation, rng: &mut R) -> Self {
        let mut net = Self::zeros(sizes, hidden, output);
        for layer in &mut net.layers {
            let bound = 1.0 / (layer.n_in as f64).sqrt();
            for w in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *w = rng.gen_range(-bound..=bound);
            }
        }
        net
    }

    pub fn zeros(sizes: &[usize], hidden: Activation, output: Activation) -> Self {
        assert!(sizes.len() >= 2, "a network needs input and output sizes");
        let n = sizes.len() - 1;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| Layer {
                n_in: w[0],
                n_out: w[1],
                activation: if k + 1 == n { output } else { hidden },
                weights: vec![0.0; w[0] * w[1]],
                bias: vec![0.0; w[1]],
            })
            .collect();
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.n_out)
    }

    pub fn sizes(&self) -> Vec<usize> {
        std::iter::once(self.input_dim()).chain(self.layers.iter().map(|l| l.n_out)).collect()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape { expected: self.input_dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Forward pass that keeps every intermediate value for [`backward`](Self::backward).
    pub fn forward_tape(&self, x: &[f64]) -> Result<Tape> {
        self.check_input(x)?;
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        values.push(x.to_vec());
        for layer in &self.layers {
            let mut out = Vec::with_capacity(layer.n_out);
            layer.forward_into(values.last().expect("non-empty"), &mut out);
            values.push(out);
        }
        Ok(Tape { values })
    }

    /// Back-propagates `grad_out` (dLoss/dOutput) through a recorded pass.
    /// Parameter gradients are accumulated into `grads`; the gradient with
    /// respect to the input is returned.
    pub fn backward(&self, tape: &Tape, grad_out: &[f64], grads: &mut Gradients) -> Vec<f64> {
        assert_eq!(grad_out.len(), self.output_dim(), "output gradient shape");
        let mut delta: Vec<f64> = grad_out.to_vec();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let x = &tape.values[k];
            let y = &tape.values[k + 1];
            for (d, &yo) in delta.iter_mut().zip(y) {
                *d *= layer.activation.derivative(yo);
            }
            let gw = &mut grads.weights[k];
            let gb = &mut grads.bias[k];
            let mut dx = vec![0.0; layer.n_in];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                gb[o] += d;
                let row = &layer.weights[o * layer.n_in..(o + 1) * layer.n_in];
                let grow = &mut gw[o * layer.n_in..(o + 1) * layer.n_in];
                for i in 0..layer.n_in {
                    grow[i] += d * x[i];
                    dx[i] += d * row[i];
                }
            }
            delta = dx;
        }
        delta
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// All parameters in the same order as [`Gradients::flatten`].
    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(&l.bias).copied()).collect()
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::Shape { expected: self.param_count(), got: values.len() });
        }
        let mut it = values.iter();
        for l in &mut self.layers {
            for p in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *p = *it.next().expect("length checked");
            }
        }
        Ok(())
    }

    /// `target ← τ·online + (1 − τ)·target`, elementwise.
    pub fn soft_update(&mut self, online: &DenseNet, tau: f64) {
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            for (a, b) in t.weights.iter_mut().chain(t.bias.iter_mut()).zip(o.weights.iter().chain(&o.bias)) {
                *a = tau * b + (1.0 - tau) * *a;
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let ck = Checkpoint { format: CHECKPOINT_FORMAT.into(), version: CHECKPOINT_VERSION, layers: self.layers.clone() };
        Ok(serde_json::to_string(&ck)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(s)?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(Error::Config(format!("not a network checkpoint (format `{}`)", ck.format)));
        }
        if ck.version != CHECKPOINT_VERSION {
            return Err(Error::SchemaVersion { found: ck.version, expected: CHECKPOINT_VERSION });
        }
        let net = Self { layers: ck.layers };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }
        for (k, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.n_in * l.n_out {
                return Err(Error::Shape { expected: l.n_in * l.n_out, got: l.weights.len() });
            }
            if l.bias.len() != l.n_out {
                return Err(Error::Shape { expected: l.n_out, got: l.bias.len() });
            }
            if k > 0 && self.layers[k - 1].n_out != l.n_in {
                return Err(Error::Shape { expected: self.layers[k - 1].n_out, got: l.n_in });
            }
            if l.weights.iter().chain(&l.bias).any(|p| !p.is_finite()) {
                return Err(Error::Config(format!("layer {k} holds non-finite parameters")));
            }
        }
        Ok(())
    }
}
