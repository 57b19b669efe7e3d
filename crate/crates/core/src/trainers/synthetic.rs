use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EarlyStopTracker, EarlyStopping, Trainer};
use crate::curves_db::{grid_size, HyperParamAxis, LearningCurve, Setting};
use crate::error::{Error, Result};

/// Learning-curve simulator: `a(e) = A (1 - exp(-k e)) + noise`, clipped to `[0, 1]`.
///
/// `A` (plateau) and `k` (rate) are tabulated per setting, indexed by grid
/// id. The plateau table has a unique maximum, so exhaustive evaluation of
/// the grid has a known answer. Noise is uniform on `[-noise, noise]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSurface {
    axes: Vec<HyperParamAxis>,
    plateaus: Vec<f64>,
    rates: Vec<f64>,
    noise: f64,
    early_stopping: Option<EarlyStopping>,
}

const PLATEAU_TOP: f64 = 0.92;
const PLATEAU_FLOOR: f64 = 0.1;
const ORDERED_WEIGHTS: [f64; 2] = [0.6, 0.3];
const TAG_STEP: f64 = 0.08;
const RATE_RANGE: (f64, f64) = (0.08, 0.6);

impl SyntheticSurface {
    pub fn new(axes: Vec<HyperParamAxis>, plateaus: Vec<f64>, rates: Vec<f64>, noise: f64) -> Result<Self> {
        let n = grid_size(&axes);
        crate::curves_db::enumerate_grid(&axes)?;
        if plateaus.len() != n || rates.len() != n {
            return Err(Error::InvalidParameter {
                name: "surface table length",
                value: plateaus.len().min(rates.len()) as f64,
            });
        }
        if let Some(&a) = plateaus.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::InvalidParameter { name: "plateau", value: a });
        }
        if let Some(&k) = rates.iter().find(|&&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidParameter { name: "rate", value: k });
        }
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(Error::InvalidParameter { name: "noise", value: noise });
        }
        let best = plateaus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if plateaus.iter().filter(|&&a| a == best).count() != 1 {
            return Err(Error::InvalidParameter {
                name: "plateau argmax (not unique)",
                value: best,
            });
        }
        Ok(Self {
            axes,
            plateaus,
            rates,
            noise,
            early_stopping: None,
        })
    }

    /// A single-peaked surface whose optimum location and rates depend on `seed`.
    ///
    /// Each ordered axis contributes a quadratic penalty in its normalized
    /// index distance to a randomly placed optimum; tag axes contribute a
    /// penalty proportional to a random rank of the tag.
    pub fn peaked(axes: Vec<HyperParamAxis>, seed: u64, noise: f64) -> Result<Self> {
        let settings = crate::curves_db::enumerate_grid(&axes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ordered_seen = 0;
        let shapes: Vec<AxisShape> = axes
            .iter()
            .map(|axis| {
                if axis.is_ordered() {
                    let weight = ORDERED_WEIGHTS[ordered_seen.min(ORDERED_WEIGHTS.len() - 1)];
                    ordered_seen += 1;
                    AxisShape::Ordered {
                        center: rng.random_range(0..axis.len()),
                        weight,
                    }
                } else {
                    let mut ranks: Vec<usize> = (0..axis.len()).collect();
                    ranks.shuffle(&mut rng);
                    AxisShape::Tag(ranks)
                }
            })
            .collect();
        let plateaus = settings
            .iter()
            .map(|s| {
                let penalty: f64 = s
                    .indices()
                    .iter()
                    .zip(&shapes)
                    .zip(&axes)
                    .map(|((&i, shape), axis)| match shape {
                        AxisShape::Ordered { center, weight } => {
                            let span = (axis.len().max(2) - 1) as f64;
                            let d = (i as f64 - *center as f64) / span;
                            weight * d * d
                        }
                        AxisShape::Tag(ranks) => TAG_STEP * ranks[i] as f64,
                    })
                    .sum();
                (PLATEAU_TOP - penalty).max(PLATEAU_FLOOR)
            })
            .collect();
        let rates = settings
            .iter()
            .map(|_| rng.random_range(RATE_RANGE.0..RATE_RANGE.1))
            .collect();
        Self::new(axes, plateaus, rates, noise)
    }

    pub fn with_early_stopping(mut self, rule: EarlyStopping) -> Self {
        self.early_stopping = Some(rule);
        self
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn plateau(&self, setting: &Setting) -> Result<f64> {
        setting.validate(&self.axes)?;
        Ok(self.plateaus[setting.id(&self.axes)])
    }

    pub fn rate(&self, setting: &Setting) -> Result<f64> {
        setting.validate(&self.axes)?;
        Ok(self.rates[setting.id(&self.axes)])
    }

    /// The setting with the largest plateau and that plateau.
    pub fn optimum(&self) -> (Setting, f64) {
        let (id, &best) = self
            .plateaus
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        (Setting::from_id(&self.axes, id).expect("id within grid"), best)
    }

    /// Simulated curve for `setting` over epochs `1..=epochs`.
    pub fn synthetic_train(&self, setting: &Setting, epochs: usize, seed: u64) -> Result<LearningCurve> {
        setting
            .validate(&self.axes)
            .map_err(|e| Error::Trainer(format!("unknown setting: {e}")))?;
        if epochs == 0 {
            return Err(Error::InvalidParameter { name: "epochs", value: 0.0 });
        }
        let id = setting.id(&self.axes);
        let (plateau, rate) = (self.plateaus[id], self.rates[id]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tracker = self.early_stopping.map(EarlyStopTracker::new);
        let mut accs = Vec::with_capacity(epochs);
        for e in 1..=epochs {
            let clean = plateau * (1.0 - libm::exp(-rate * e as f64));
            let jitter = if self.noise > 0.0 {
                rng.random_range(-self.noise..=self.noise)
            } else {
                0.0
            };
            let a = (clean + jitter).clamp(0.0, 1.0);
            accs.push(a);
            if tracker.as_mut().is_some_and(|t| t.observe(a)) {
                break;
            }
        }
        LearningCurve::completed(accs, epochs)
    }
}

enum AxisShape {
    Ordered { center: usize, weight: f64 },
    Tag(Vec<usize>),
}

impl Trainer for SyntheticSurface {
    fn axes(&self) -> &[HyperParamAxis] {
        &self.axes
    }

    fn train(&self, setting: &Setting, epochs: usize, seed: u64) -> Result<LearningCurve> {
        self.synthetic_train(setting, epochs, seed)
    }
}
