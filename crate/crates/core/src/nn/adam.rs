use serde::{Deserialize, Serialize};

use super::{Gradients, Network};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// One bias-corrected Adam update of `params` at step `t` (1-based).
pub fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    cfg: &AdamConfig,
) {
    let bc1 = 1.0 - cfg.beta1.powf(t as f64);
    let bc2 = 1.0 - cfg.beta2.powf(t as f64);
    for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(m.iter_mut()).zip(v.iter_mut()) {
        *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
        *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
        *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + cfg.epsilon);
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Moments {
    m_w: Vec<f64>,
    v_w: Vec<f64>,
    m_b: Vec<f64>,
    v_b: Vec<f64>,
    m_beta: [f64; 1],
    v_beta: [f64; 1],
}

/// Optimizer state for one network. Frozen parameter groups are skipped
/// entirely, moments included.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    step: u64,
    moments: Vec<Moments>,
}

impl AdamState {
    pub fn new(net: &Network) -> Self {
        let moments = net
            .layers()
            .iter()
            .map(|l| {
                let nw = l.weights().as_slice().len();
                let nb = l.bias().len();
                Moments {
                    m_w: vec![0.0; nw],
                    v_w: vec![0.0; nw],
                    m_b: vec![0.0; nb],
                    v_b: vec![0.0; nb],
                    m_beta: [0.0],
                    v_beta: [0.0],
                }
            })
            .collect();
        Self { step: 0, moments }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, net: &mut Network, grads: &Gradients, lr: f64, cfg: &AdamConfig) -> Result<()> {
        if grads.layers.len() != self.moments.len() || net.layers().len() != self.moments.len() {
            return Err(Error::Shape("gradients do not match optimizer state".into()));
        }
        self.step += 1;
        let t = self.step;
        for ((layer, g), mo) in net.layers_mut().iter_mut().zip(&grads.layers).zip(&mut self.moments) {
            let (tw, tb, tbeta) = (layer.trainable_weights(), layer.trainable_bias(), layer.trainable_beta());
            let (w, b, beta) = layer.params_mut();
            if tw {
                adam_update(w, g.weights.as_slice(), &mut mo.m_w, &mut mo.v_w, t, lr, cfg);
            }
            if tb {
                adam_update(b, &g.bias, &mut mo.m_b, &mut mo.v_b, t, lr, cfg);
            }
            if tbeta {
                adam_update(std::slice::from_mut(beta), &[g.beta], &mut mo.m_beta, &mut mo.v_beta, t, lr, cfg);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::default();
        let mut p = [0.5];
        let (mut m, mut v) = ([0.0], [0.0]);
        adam_update(&mut p, &[1.0], &mut m, &mut v, 1, 0.1, &cfg);
        let expected = 0.5 - 0.1 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let cfg = AdamConfig::default();
        let mut p = [1.25, -3.0];
        let (mut m, mut v) = ([0.0; 2], [0.0; 2]);
        for t in 1..=10 {
            adam_update(&mut p, &[0.0, 0.0], &mut m, &mut v, t, 0.1, &cfg);
        }
        assert_eq!(p, [1.25, -3.0]);
    }

    #[test]
    fn step_size_bounded_by_learning_rate() {
        let cfg = AdamConfig::default();
        let mut p = [0.0];
        let (mut m, mut v) = ([0.0], [0.0]);
        for t in 1..=50 {
            let before = p[0];
            let g = if t % 3 == 0 { -5.0 } else { 0.2 };
            adam_update(&mut p, &[g], &mut m, &mut v, t, 0.01, &cfg);
            assert!((p[0] - before).abs() <= 0.01 * 3.5);
        }
    }
}
