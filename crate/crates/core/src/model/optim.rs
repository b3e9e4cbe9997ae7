use alloc::vec;
use alloc::vec::Vec;

use super::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

pub trait Optimizer {
    fn step(&mut self, params: &mut ModelParams, grads: &ModelParams);
}

/// Plain gradient descent.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub learning_rate: f64,
}

impl Optimizer for Sgd {
    fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        let lr = self.learning_rate;
        for (p, (_, g)) in params.tensors_mut().into_iter().zip(grads.named_tensors()) {
            for (x, dx) in p.data_mut().iter_mut().zip(g.data()) {
                *x -= lr * dx;
            }
        }
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    /// β1 = 0.9, β2 = 0.999, ε = 1e-8.
    pub fn new(learning_rate: f64, param_count: usize) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }
}

impl Optimizer for Adam {
    fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        self.t += 1;
        let c1 = 1.0 - libm::pow(self.beta1, f64::from(self.t));
        let c2 = 1.0 - libm::pow(self.beta2, f64::from(self.t));
        let mut k = 0;
        for (p, (_, g)) in params.tensors_mut().into_iter().zip(grads.named_tensors()) {
            for (x, &dx) in p.data_mut().iter_mut().zip(g.data()) {
                let m = &mut self.m[k];
                let v = &mut self.v[k];
                *m = self.beta1 * *m + (1.0 - self.beta1) * dx;
                *v = self.beta2 * *v + (1.0 - self.beta2) * dx * dx;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *x -= self.learning_rate * m_hat / (libm::sqrt(v_hat) + self.epsilon);
                k += 1;
            }
        }
        debug_assert_eq!(k, self.m.len());
    }
}
