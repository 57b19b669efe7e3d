use alloc::vec;
use alloc::vec::Vec;

pub const MOMENTUM: f64 = 0.9;
pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Sgd,
    Momentum,
    Adam,
}

impl OptimizerKind {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "sgd" => Some(OptimizerKind::Sgd),
            "momentum" => Some(OptimizerKind::Momentum),
            "adam" => Some(OptimizerKind::Adam),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Momentum => "momentum",
            OptimizerKind::Adam => "adam",
        }
    }
}

/// `w -= lr * g`
pub fn sgd_step(params: &mut [f64], grads: &[f64], lr: f64) {
    for (w, g) in params.iter_mut().zip(grads) {
        *w -= lr * g;
    }
}

/// Heavy-ball: `v = 0.9 v + g`, `w -= lr * v`.
pub fn momentum_step(params: &mut [f64], grads: &[f64], velocity: &mut [f64], lr: f64) {
    for ((w, g), v) in params.iter_mut().zip(grads).zip(velocity.iter_mut()) {
        *v = MOMENTUM * *v + g;
        *w -= lr * *v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }
}

/// Adam with bias-corrected first and second moments.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, lr: f64) {
    state.t += 1;
    let c1 = 1.0 - libm::pow(ADAM_BETA1, state.t as f64);
    let c2 = 1.0 - libm::pow(ADAM_BETA2, state.t as f64);
    for (((w, &g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *w -= lr * m_hat / (libm::sqrt(v_hat) + ADAM_EPSILON);
    }
}

/// Optimizer together with its per-parameter state.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerState {
    Sgd,
    Momentum(Vec<f64>),
    Adam(AdamState),
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, n_params: usize) -> Self {
        match kind {
            OptimizerKind::Sgd => OptimizerState::Sgd,
            OptimizerKind::Momentum => OptimizerState::Momentum(vec![0.0; n_params]),
            OptimizerKind::Adam => OptimizerState::Adam(AdamState::new(n_params)),
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        match self {
            OptimizerState::Sgd => sgd_step(params, grads, lr),
            OptimizerState::Momentum(v) => momentum_step(params, grads, v, lr),
            OptimizerState::Adam(s) => adam_step(params, grads, s, lr),
        }
    }
}
