use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    EarlyStopTracker, EarlyStopping, OptimizerKind, OptimizerState, Trainer, BATCH_SIZE_AXIS, LEARNING_RATE_AXIS,
    OPTIMIZER_AXIS,
};
use crate::curves_db::{AxisValues, HyperParamAxis, LearningCurve, Setting};
use crate::error::{Error, Result};

/// Gaussian-blob classification data set parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub classes: usize,
    pub dim: usize,
    pub samples: usize,
    /// Standard deviation of each blob.
    pub spread: f64,
    /// Blob centers are uniform on `[-center_range, center_range]^dim`.
    pub center_range: f64,
    /// Fraction of samples held out for validation.
    pub val_fraction: f64,
    pub seed: u64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        Self {
            classes: 4,
            dim: 8,
            samples: 800,
            spread: 1.6,
            center_range: 1.5,
            val_fraction: 0.25,
            seed: 7,
        }
    }
}

/// Row-major features with class labels, split into train and validation parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub classes: usize,
    pub train_x: Vec<f64>,
    pub train_y: Vec<usize>,
    pub val_x: Vec<f64>,
    pub val_y: Vec<usize>,
}

impl Dataset {
    pub fn n_train(&self) -> usize {
        self.train_y.len()
    }

    pub fn n_val(&self) -> usize {
        self.val_y.len()
    }
}

/// Balanced blobs, shuffled, then split into disjoint train/validation parts.
pub fn generate_blobs(spec: &BlobSpec) -> Result<Dataset> {
    if spec.classes < 2 {
        return Err(Error::InvalidParameter {
            name: "classes",
            value: spec.classes as f64,
        });
    }
    if spec.dim == 0 {
        return Err(Error::InvalidParameter { name: "dim", value: 0.0 });
    }
    if !(spec.val_fraction > 0.0 && spec.val_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "val_fraction",
            value: spec.val_fraction,
        });
    }
    let n_val = libm::round(spec.samples as f64 * spec.val_fraction) as usize;
    if n_val == 0 || n_val >= spec.samples {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: spec.samples as f64,
        });
    }
    if !(spec.spread >= 0.0 && spec.spread.is_finite() && spec.center_range.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "spread",
            value: spec.spread,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers: Vec<f64> = (0..spec.classes * spec.dim)
        .map(|_| rng.random_range(-spec.center_range..=spec.center_range))
        .collect();
    let mut rows: Vec<(Vec<f64>, usize)> = (0..spec.samples)
        .map(|i| {
            let label = i % spec.classes;
            let x = (0..spec.dim)
                .map(|d| {
                    let z: f64 = rng.sample(StandardNormal);
                    centers[label * spec.dim + d] + spec.spread * z
                })
                .collect();
            (x, label)
        })
        .collect();
    rows.shuffle(&mut rng);
    let mut data = Dataset {
        dim: spec.dim,
        classes: spec.classes,
        train_x: Vec::new(),
        train_y: Vec::new(),
        val_x: Vec::new(),
        val_y: Vec::new(),
    };
    for (i, (x, y)) in rows.into_iter().enumerate() {
        if i < n_val {
            data.val_x.extend(x);
            data.val_y.push(y);
        } else {
            data.train_x.extend(x);
            data.train_y.push(y);
        }
    }
    Ok(data)
}

/// Fully connected network with one rectified-linear hidden layer, or
/// multinomial logistic regression when `hidden == 0`.
///
/// Parameters are one flat vector: `W1 (hidden x dim)`, `b1`, `W2 (classes x hidden)`, `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Network {
    pub dim: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl Network {
    fn out_inputs(&self) -> usize {
        if self.hidden == 0 {
            self.dim
        } else {
            self.hidden
        }
    }

    fn out_offset(&self) -> usize {
        if self.hidden == 0 {
            0
        } else {
            self.hidden * self.dim + self.hidden
        }
    }

    pub fn n_params(&self) -> usize {
        self.out_offset() + self.classes * self.out_inputs() + self.classes
    }

    /// He-uniform hidden weights, Glorot-uniform output weights, zero biases.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut p = vec![0.0; self.n_params()];
        if self.hidden > 0 {
            let lim = libm::sqrt(6.0 / self.dim as f64);
            for w in &mut p[..self.hidden * self.dim] {
                *w = rng.random_range(-lim..=lim);
            }
        }
        let off = self.out_offset();
        let fan_in = self.out_inputs();
        let lim = libm::sqrt(6.0 / (fan_in + self.classes) as f64);
        for w in &mut p[off..off + self.classes * fan_in] {
            *w = rng.random_range(-lim..=lim);
        }
        p
    }

    /// Writes output logits into `logits` and hidden pre-activations into `pre`.
    fn forward(&self, params: &[f64], x: &[f64], pre: &mut [f64], logits: &mut [f64]) {
        let (d, h, c) = (self.dim, self.hidden, self.classes);
        let off = self.out_offset();
        let inputs = self.out_inputs();
        if h > 0 {
            for j in 0..h {
                let row = &params[j * d..(j + 1) * d];
                pre[j] = params[h * d + j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            }
        }
        for k in 0..c {
            let row = &params[off + k * inputs..off + (k + 1) * inputs];
            let z: f64 = if h > 0 {
                row.iter().zip(pre.iter()).map(|(w, &z)| w * z.max(0.0)).sum()
            } else {
                row.iter().zip(x).map(|(w, v)| w * v).sum()
            };
            logits[k] = params[off + c * inputs + k] + z;
        }
    }

    pub fn predict_class(&self, params: &[f64], x: &[f64]) -> usize {
        let mut pre = vec![0.0; self.hidden];
        let mut logits = vec![0.0; self.classes];
        self.forward(params, x, &mut pre, &mut logits);
        let mut best = 0;
        for k in 1..self.classes {
            if logits[k] > logits[best] {
                best = k;
            }
        }
        best
    }
}

/// Mean softmax cross-entropy over the rows in `batch` and its gradient.
pub fn loss_and_grad(net: &Network, params: &[f64], x: &[f64], y: &[usize], batch: &[usize]) -> (f64, Vec<f64>) {
    let (d, h, c) = (net.dim, net.hidden, net.classes);
    let off = net.out_offset();
    let inputs = net.out_inputs();
    let mut grad = vec![0.0; params.len()];
    let mut pre = vec![0.0; h];
    let mut logits = vec![0.0; c];
    let mut dlogits = vec![0.0; c];
    let mut dhidden = vec![0.0; h];
    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    for &i in batch {
        let xi = &x[i * d..(i + 1) * d];
        net.forward(params, xi, &mut pre, &mut logits);
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logits.iter().map(|&z| libm::exp(z - m)).sum();
        let lse = m + libm::log(sum);
        loss += lse - logits[y[i]];
        for k in 0..c {
            dlogits[k] = (libm::exp(logits[k] - lse) - if k == y[i] { 1.0 } else { 0.0 }) * scale;
        }
        for k in 0..c {
            let g = dlogits[k];
            grad[off + c * inputs + k] += g;
            let row = &mut grad[off + k * inputs..off + (k + 1) * inputs];
            if h > 0 {
                for (w, &z) in row.iter_mut().zip(pre.iter()) {
                    *w += g * z.max(0.0);
                }
            } else {
                for (w, &v) in row.iter_mut().zip(xi) {
                    *w += g * v;
                }
            }
        }
        if h > 0 {
            for j in 0..h {
                dhidden[j] = if pre[j] > 0.0 {
                    (0..c).map(|k| params[off + k * inputs + j] * dlogits[k]).sum()
                } else {
                    0.0
                };
            }
            for j in 0..h {
                let g = dhidden[j];
                if g != 0.0 {
                    grad[h * d + j] += g;
                    for (w, &v) in grad[j * d..(j + 1) * d].iter_mut().zip(xi) {
                        *w += g * v;
                    }
                }
            }
        }
    }
    (loss * scale, grad)
}

/// Fraction of rows classified correctly.
pub fn accuracy(net: &Network, params: &[f64], x: &[f64], y: &[usize]) -> f64 {
    let correct = y
        .iter()
        .enumerate()
        .filter(|&(i, &label)| net.predict_class(params, &x[i * net.dim..(i + 1) * net.dim]) == label)
        .count();
    correct as f64 / y.len() as f64
}

/// Data set, model shape and early-stopping rule of the classifier trainer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub data: BlobSpec,
    pub hidden: usize,
    pub early_stopping: EarlyStopping,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        Self {
            data: BlobSpec::default(),
            hidden: 16,
            early_stopping: EarlyStopping::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierRun {
    pub curve: LearningCurve,
    /// Set when the loss or parameters became non-finite.
    pub diverged: bool,
}

/// Mini-batch trainer for [`Network`] on a generated blob data set.
#[derive(Debug, Clone)]
pub struct ClassifierTrainer {
    spec: ClassifierSpec,
    data: Dataset,
    net: Network,
    axes: Vec<HyperParamAxis>,
}

impl ClassifierTrainer {
    /// `axes` must contain a real `learning_rate`, an integer `batch_size` and
    /// an `optimizer` tag axis with values among `sgd`, `momentum`, `adam`.
    pub fn new(spec: ClassifierSpec, axes: Vec<HyperParamAxis>) -> Result<Self> {
        let find = |name: &str| {
            axes.iter().find(|a| a.name() == name).ok_or_else(|| Error::InvalidAxis {
                axis: name.to_string(),
                reason: "required by the classifier trainer".to_string(),
            })
        };
        if !matches!(find(LEARNING_RATE_AXIS)?.values(), AxisValues::Real(_)) {
            return Err(Error::InvalidAxis {
                axis: LEARNING_RATE_AXIS.to_string(),
                reason: "must be real-valued".to_string(),
            });
        }
        if !matches!(find(BATCH_SIZE_AXIS)?.values(), AxisValues::Integer(_)) {
            return Err(Error::InvalidAxis {
                axis: BATCH_SIZE_AXIS.to_string(),
                reason: "must be integer-valued".to_string(),
            });
        }
        match find(OPTIMIZER_AXIS)?.values() {
            AxisValues::Tag(tags) if tags.iter().all(|t| OptimizerKind::parse(t).is_some()) => {}
            _ => {
                return Err(Error::InvalidAxis {
                    axis: OPTIMIZER_AXIS.to_string(),
                    reason: "must be tags among sgd, momentum, adam".to_string(),
                })
            }
        }
        let data = generate_blobs(&spec.data)?;
        let net = Network {
            dim: spec.data.dim,
            hidden: spec.hidden,
            classes: spec.data.classes,
        };
        Ok(Self { spec, data, net, axes })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    fn hyper(&self, setting: &Setting) -> Result<(f64, usize, OptimizerKind)> {
        setting.validate(&self.axes)?;
        let lr = setting
            .value(&self.axes, LEARNING_RATE_AXIS)
            .and_then(|v| v.as_real())
            .expect("validated axis");
        let batch = setting
            .value(&self.axes, BATCH_SIZE_AXIS)
            .and_then(|v| v.as_integer())
            .expect("validated axis") as usize;
        let kind = setting
            .value(&self.axes, OPTIMIZER_AXIS)
            .and_then(|v| v.as_tag().and_then(OptimizerKind::parse))
            .expect("validated axis");
        if !(lr >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "learning rate",
                value: lr,
            });
        }
        Ok((lr, batch, kind))
    }

    /// Trains from a fresh initialization drawn from `seed`, recording the
    /// validation accuracy after every epoch.
    pub fn classifier_train(&self, setting: &Setting, epochs: usize, seed: u64) -> Result<ClassifierRun> {
        if epochs == 0 {
            return Err(Error::InvalidParameter { name: "epochs", value: 0.0 });
        }
        let (lr, batch, kind) = self.hyper(setting)?;
        let data = &self.data;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = self.net.init(&mut rng);
        let mut optimizer = OptimizerState::new(kind, params.len());
        let mut tracker = EarlyStopTracker::new(self.spec.early_stopping);
        let mut order: Vec<usize> = (0..data.n_train()).collect();
        let mut accs = Vec::with_capacity(epochs);
        let mut diverged = false;
        for epoch in 1..=epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(batch.max(1)) {
                let mut rows = chunk.to_vec();
                rows.sort_unstable();
                let (loss, grad) = loss_and_grad(&self.net, &params, &data.train_x, &data.train_y, &rows);
                epoch_loss += loss * rows.len() as f64;
                optimizer.step(&mut params, &grad, lr);
            }
            if !epoch_loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
                diverged = true;
                if epoch == 1 {
                    let chance = 1.0 / data.classes as f64;
                    for _ in 0..epochs {
                        accs.push(chance);
                        if tracker.observe(chance) {
                            break;
                        }
                    }
                }
                break;
            }
            let acc = accuracy(&self.net, &params, &data.val_x, &data.val_y);
            accs.push(acc);
            if tracker.observe(acc) {
                break;
            }
        }
        let curve = LearningCurve::completed(accs, epochs)
            .map_err(|e| Error::Trainer(format!("classifier produced an invalid curve: {e}")))?;
        Ok(ClassifierRun { curve, diverged })
    }
}

impl Trainer for ClassifierTrainer {
    fn axes(&self) -> &[HyperParamAxis] {
        &self.axes
    }

    fn train(&self, setting: &Setting, epochs: usize, seed: u64) -> Result<LearningCurve> {
        self.classifier_train(setting, epochs, seed).map(|run| run.curve)
    }
}
