use serde::{Deserialize, Serialize};

use super::{DenseNet, Gradients};

/// First-order optimizer that descends along the supplied gradients.
pub trait Optimizer {
    fn step(&mut self, net: &mut DenseNet, grads: &Gradients);
}

fn zeros(net: &DenseNet) -> Vec<Vec<f64>> {
    net.layers.iter().map(|l| vec![0.0; l.weights.len() + l.bias.len()]).collect()
}

/// Calls `f(param, grad, slot)` for every parameter, where `slot` indexes
/// the optimizer's per-layer state vectors.
fn for_each(net: &mut DenseNet, grads: &Gradients, mut f: impl FnMut(&mut f64, f64, usize, usize)) {
    for (k, layer) in net.layers.iter_mut().enumerate() {
        let n_w = layer.weights.len();
        for (i, (p, g)) in layer.weights.iter_mut().zip(&grads.weights[k]).enumerate() {
            f(p, *g, k, i);
        }
        for (i, (p, g)) in layer.bias.iter_mut().zip(&grads.bias[k]).enumerate() {
            f(p, *g, k, n_w + i);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(net: &DenseNet, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: zeros(net), v: zeros(net) }
    }
}

impl Optimizer for Adam {
    fn step(&mut self, net: &mut DenseNet, grads: &Gradients) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powf(self.t as f64);
        let c2 = 1.0 - self.beta2.powf(self.t as f64);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let (m, v) = (&mut self.m, &mut self.v);
        for_each(net, grads, |p, g, k, i| {
            let mk = &mut m[k][i];
            let vk = &mut v[k][i];
            *mk = b1 * *mk + (1.0 - b1) * g;
            *vk = b2 * *vk + (1.0 - b2) * g * g;
            *p -= lr * (*mk / c1) / ((*vk / c2).sqrt() + eps);
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsProp {
    pub lr: f64,
    pub decay: f64,
    pub eps: f64,
    ms: Vec<Vec<f64>>,
}

impl RmsProp {
    pub fn new(net: &DenseNet, lr: f64) -> Self {
        Self { lr, decay: 0.9, eps: 1e-8, ms: zeros(net) }
    }
}

impl Optimizer for RmsProp {
    fn step(&mut self, net: &mut DenseNet, grads: &Gradients) {
        let (rho, lr, eps) = (self.decay, self.lr, self.eps);
        let ms = &mut self.ms;
        for_each(net, grads, |p, g, k, i| {
            let s = &mut ms[k][i];
            *s = rho * *s + (1.0 - rho) * g * g;
            *p -= lr * g / (s.sqrt() + eps);
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn scalar(w: f64) -> DenseNet {
        let mut n = DenseNet::zeros(&[1, 1], Activation::Identity, Activation::Identity);
        n.layers[0].weights[0] = w;
        n
    }

    fn grad(net: &DenseNet, g: f64) -> Gradients {
        let mut gr = Gradients::zeros_like(net);
        gr.weights[0][0] = g;
        gr
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut n = scalar(0.7);
        let g = Gradients::zeros_like(&n);
        Adam::new(&n, 1e-3).step(&mut n, &g);
        RmsProp::new(&n, 1e-3).step(&mut n, &g);
        assert_eq!(n.params(), vec![0.7, 0.0]);
    }

    #[test]
    fn first_adam_step_is_learning_rate() {
        let mut n = scalar(0.0);
        let g = grad(&n, 1.0);
        Adam::new(&n, 1e-3).step(&mut n, &g);
        assert!((n.params()[0] + 1e-3).abs() < 1e-10);
    }

    #[test]
    fn repeated_steps_move_against_gradient() {
        for use_adam in [true, false] {
            let mut n = scalar(0.0);
            let g = grad(&n, 2.0);
            let mut adam = Adam::new(&n, 1e-3);
            let mut rms = RmsProp::new(&n, 1e-3);
            let mut prev = 0.0;
            for _ in 0..2 {
                if use_adam {
                    adam.step(&mut n, &g);
                } else {
                    rms.step(&mut n, &g);
                }
                let w = n.params()[0];
                assert!(w < prev);
                prev = w;
            }
        }
    }
}
