//! Learners whose per-epoch accuracies feed the predictor.
//!
//! [`Trainer`] abstracts "train this setting for `epochs` epochs". Two
//! implementations are provided: [`SyntheticSurface`], a learning-curve
//! simulator with a known optimum, and [`ClassifierTrainer`], a small
//! network trained from scratch on Gaussian blobs.

mod classifier;
mod optim;
mod synthetic;

use alloc::vec;
use alloc::vec::Vec;

pub use classifier::{
    accuracy, generate_blobs, loss_and_grad, BlobSpec, ClassifierRun, ClassifierSpec, ClassifierTrainer, Dataset,
    Network,
};
pub use optim::{
    adam_step, momentum_step, sgd_step, AdamState, OptimizerKind, OptimizerState, ADAM_BETA1, ADAM_BETA2,
    ADAM_EPSILON, MOMENTUM,
};
pub use synthetic::SyntheticSurface;

use crate::curves_db::{HyperParamAxis, LearningCurve, Setting};
use crate::error::Result;

pub const LEARNING_RATE_AXIS: &str = "learning_rate";
pub const BATCH_SIZE_AXIS: &str = "batch_size";
pub const OPTIMIZER_AXIS: &str = "optimizer";

/// Produces learning curves for settings of a fixed grid.
pub trait Trainer {
    fn axes(&self) -> &[HyperParamAxis];

    /// Trains `setting` for at most `epochs` epochs. The curve's `fin_epoch`
    /// is `epochs`; early stopping may end it sooner. Must be deterministic
    /// in `(setting, epochs, seed)`.
    fn train(&self, setting: &Setting, epochs: usize, seed: u64) -> Result<LearningCurve>;
}

impl<T: Trainer + ?Sized> Trainer for &T {
    fn axes(&self) -> &[HyperParamAxis] {
        (**self).axes()
    }

    fn train(&self, setting: &Setting, epochs: usize, seed: u64) -> Result<LearningCurve> {
        (**self).train(setting, epochs, seed)
    }
}

/// Training seed for a setting, mixed from a run seed and the setting's grid id.
pub fn run_seed(base: u64, setting_id: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ (setting_id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stops a run once validation accuracy has not improved by more than
/// `min_delta` for `patience` consecutive epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStopping {
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for EarlyStopping {
    fn default() -> Self {
        Self {
            patience: 5,
            min_delta: 1e-4,
        }
    }
}

/// Running state of an [`EarlyStopping`] rule.
#[derive(Debug, Clone)]
pub struct EarlyStopTracker {
    rule: EarlyStopping,
    best: f64,
    stale: usize,
}

impl EarlyStopTracker {
    pub fn new(rule: EarlyStopping) -> Self {
        Self {
            rule,
            best: f64::NEG_INFINITY,
            stale: 0,
        }
    }

    /// Records one epoch; returns true when training should stop after it.
    pub fn observe(&mut self, accuracy: f64) -> bool {
        if accuracy > self.best + self.rule.min_delta {
            self.best = accuracy;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.rule.patience > 0 && self.stale >= self.rule.patience
    }
}

/// Learning rates `1e-4 .. 1e-1` (8 log-spaced), batch sizes 16..128 and the three optimizers.
pub fn default_axes() -> Vec<HyperParamAxis> {
    let lrs = (0..8).map(|i| libm::pow(10.0, -4.0 + 3.0 * i as f64 / 7.0)).collect();
    vec![
        HyperParamAxis::real(LEARNING_RATE_AXIS, lrs).expect("increasing"),
        HyperParamAxis::integer(BATCH_SIZE_AXIS, vec![16, 32, 64, 128]).expect("increasing"),
        HyperParamAxis::tag(OPTIMIZER_AXIS, ["sgd", "momentum", "adam"]).expect("distinct"),
    ]
}
