//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! out_dir = "out"
//!
//! [database]
//! fraction = 0.1
//! fin_epoch = 30
//!
//! [trainer]
//! kind = "classifier"
//!
//! [trainer.classifier]
//! hidden = 16
//!
//! [explorer]
//! max_iterations = 200
//! ```
//!
//! Every key is optional. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use epochcast_core::curves_db::HyperParamAxis;
use epochcast_core::explorer::ExplorerConfig;
use epochcast_core::svr::{KernelSpec, SvrHyper, DEFAULT_TOL};
use epochcast_core::trainers::{
    default_axes, BlobSpec, ClassifierSpec, ClassifierTrainer, EarlyStopping, SyntheticSurface, Trainer,
    BATCH_SIZE_AXIS, LEARNING_RATE_AXIS, OPTIMIZER_AXIS,
};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub database: DatabaseConfig,
    pub trainer: TrainerConfig,
    pub axes: AxesConfig,
    pub predictor: PredictorConfig,
    pub svr: SvrConfig,
    pub explorer: ExplorerSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: PathBuf::from("out"),
            database: DatabaseConfig::default(),
            trainer: TrainerConfig::default(),
            axes: AxesConfig::default(),
            predictor: PredictorConfig::default(),
            svr: SvrConfig::default(),
            explorer: ExplorerSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatabaseConfig {
    /// Share of the grid trained in full.
    pub fraction: f64,
    /// Exact number of settings; overrides `fraction` when set.
    pub count: Option<usize>,
    pub fin_epoch: usize,
}

impl Default for DatabaseConfig {
    fn default() -> Self {
        Self {
            fraction: 0.1,
            count: None,
            fin_epoch: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainerKind {
    Synthetic,
    Classifier,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub kind: TrainerKind,
    /// Early-stopping patience in epochs; 0 disables it.
    pub patience: usize,
    pub min_delta: f64,
    pub synthetic: SyntheticConfig,
    pub classifier: ClassifierConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        let es = EarlyStopping::default();
        Self {
            kind: TrainerKind::Synthetic,
            patience: es.patience,
            min_delta: es.min_delta,
            synthetic: SyntheticConfig::default(),
            classifier: ClassifierConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub surface_seed: u64,
    pub noise: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            surface_seed: 0,
            noise: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub classes: usize,
    pub dim: usize,
    pub samples: usize,
    pub spread: f64,
    pub center_range: f64,
    pub val_fraction: f64,
    pub data_seed: u64,
    /// Hidden units; 0 gives multinomial logistic regression.
    pub hidden: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let blobs = BlobSpec::default();
        Self {
            classes: blobs.classes,
            dim: blobs.dim,
            samples: blobs.samples,
            spread: blobs.spread,
            center_range: blobs.center_range,
            val_fraction: blobs.val_fraction,
            data_seed: blobs.seed,
            hidden: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxesConfig {
    pub learning_rate: Vec<f64>,
    pub batch_size: Vec<u64>,
    pub optimizer: Vec<String>,
}

impl Default for AxesConfig {
    fn default() -> Self {
        let axes = default_axes();
        let real = |name: &str| match axes.iter().find(|a| a.name() == name).map(|a| a.values()) {
            Some(epochcast_core::curves_db::AxisValues::Real(v)) => v.clone(),
            _ => unreachable!(),
        };
        let int = |name: &str| match axes.iter().find(|a| a.name() == name).map(|a| a.values()) {
            Some(epochcast_core::curves_db::AxisValues::Integer(v)) => v.clone(),
            _ => unreachable!(),
        };
        let tag = |name: &str| match axes.iter().find(|a| a.name() == name).map(|a| a.values()) {
            Some(epochcast_core::curves_db::AxisValues::Tag(v)) => v.clone(),
            _ => unreachable!(),
        };
        Self {
            learning_rate: real(LEARNING_RATE_AXIS),
            batch_size: int(BATCH_SIZE_AXIS),
            optimizer: tag(OPTIMIZER_AXIS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictorConfig {
    /// Prefix epochs used as features.
    pub k: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self { k: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrConfig {
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    /// Defaults to `1 / k`.
    pub gamma: Option<f64>,
    pub degree: u32,
    pub coef0: f64,
    /// Training records in the split; the rest are the test set.
    pub n_train: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        let h = SvrHyper::default();
        Self {
            c: h.c,
            epsilon: h.epsilon,
            tol: DEFAULT_TOL,
            gamma: None,
            degree: 3,
            coef0: 1.0,
            n_train: 35,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorerSection {
    pub delta: f64,
    pub radius: usize,
    /// Single threshold for every axis.
    pub threshold: f64,
    pub max_iterations: usize,
    pub p_floor: f64,
    pub top_n: usize,
}

impl Default for ExplorerSection {
    fn default() -> Self {
        let d = ExplorerConfig::with_defaults(0, 1);
        Self {
            delta: d.delta,
            radius: d.radius,
            threshold: ExplorerConfig::DEFAULT_THRESHOLD,
            max_iterations: d.max_iterations,
            p_floor: d.p_floor,
            top_n: d.top_n,
        }
    }
}

/// Either trainer behind one type.
pub enum AnyTrainer {
    Synthetic(SyntheticSurface),
    Classifier(ClassifierTrainer),
}

impl Trainer for AnyTrainer {
    fn axes(&self) -> &[HyperParamAxis] {
        match self {
            AnyTrainer::Synthetic(t) => t.axes(),
            AnyTrainer::Classifier(t) => t.axes(),
        }
    }

    fn train(
        &self,
        setting: &epochcast_core::curves_db::Setting,
        epochs: usize,
        seed: u64,
    ) -> epochcast_core::Result<epochcast_core::curves_db::LearningCurve> {
        match self {
            AnyTrainer::Synthetic(t) => t.train(setting, epochs, seed),
            AnyTrainer::Classifier(t) => t.train(setting, epochs, seed),
        }
    }
}

impl RunConfig {
    /// Parses TOML text, applying `key.path=value` overrides first.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn axes(&self) -> Result<Vec<HyperParamAxis>> {
        Ok(vec![
            HyperParamAxis::real(LEARNING_RATE_AXIS, self.axes.learning_rate.clone())?,
            HyperParamAxis::integer(BATCH_SIZE_AXIS, self.axes.batch_size.clone())?,
            HyperParamAxis::tag(OPTIMIZER_AXIS, self.axes.optimizer.clone())?,
        ])
    }

    pub fn early_stopping(&self) -> EarlyStopping {
        EarlyStopping {
            patience: self.trainer.patience,
            min_delta: self.trainer.min_delta,
        }
    }

    pub fn trainer(&self) -> Result<AnyTrainer> {
        let axes = self.axes()?;
        Ok(match self.trainer.kind {
            TrainerKind::Synthetic => {
                let s = &self.trainer.synthetic;
                let surface = SyntheticSurface::peaked(axes, s.surface_seed, s.noise)?;
                AnyTrainer::Synthetic(if self.trainer.patience > 0 {
                    surface.with_early_stopping(self.early_stopping())
                } else {
                    surface
                })
            }
            TrainerKind::Classifier => {
                let c = &self.trainer.classifier;
                let spec = ClassifierSpec {
                    data: BlobSpec {
                        classes: c.classes,
                        dim: c.dim,
                        samples: c.samples,
                        spread: c.spread,
                        center_range: c.center_range,
                        val_fraction: c.val_fraction,
                        seed: c.data_seed,
                    },
                    hidden: c.hidden,
                    early_stopping: self.early_stopping(),
                };
                AnyTrainer::Classifier(ClassifierTrainer::new(spec, axes)?)
            }
        })
    }

    pub fn svr_hyper(&self) -> SvrHyper {
        SvrHyper {
            c: self.svr.c,
            epsilon: self.svr.epsilon,
        }
    }

    /// Linear, polynomial and Gaussian kernels, in that order.
    pub fn kernels(&self) -> Result<[KernelSpec; 3]> {
        let gamma = self.svr.gamma.unwrap_or(1.0 / self.predictor.k as f64);
        Ok([
            KernelSpec::Linear,
            KernelSpec::polynomial(self.svr.degree, self.svr.coef0)?,
            KernelSpec::gaussian(gamma)?,
        ])
    }

    pub fn explorer_config(&self, n_axes: usize) -> ExplorerConfig {
        let e = &self.explorer;
        ExplorerConfig {
            delta: e.delta,
            radius: e.radius,
            thresholds: vec![e.threshold; n_axes],
            max_iterations: e.max_iterations,
            p_floor: e.p_floor,
            k: self.predictor.k,
            fin_epoch: self.database.fin_epoch,
            top_n: e.top_n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let axes = self.axes()?;
        let d = &self.database;
        if d.count.is_none() && !(d.fraction > 0.0 && d.fraction <= 1.0) {
            return Err(Error::Config(format!("database.fraction {} outside (0, 1]", d.fraction)));
        }
        if self.predictor.k == 0 || self.predictor.k > d.fin_epoch {
            return Err(Error::Config(format!(
                "predictor.k {} must be in 1..=database.fin_epoch ({})",
                self.predictor.k, d.fin_epoch
            )));
        }
        self.svr_hyper().validate()?;
        if !(self.svr.tol > 0.0) {
            return Err(Error::Config(format!("svr.tol {} must be positive", self.svr.tol)));
        }
        self.kernels()?;
        if !(self.trainer.synthetic.noise >= 0.0) {
            return Err(Error::Config("trainer.synthetic.noise must be nonnegative".into()));
        }
        self.explorer_config(axes.len()).validate(&axes)?;
        Ok(())
    }
}

/// Sets `a.b.c=value` in `table`. The value is parsed as TOML and read as
/// a bare string when that fails.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {item:?} is not key=value")))?;
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let keys: Vec<&str> = path.trim().split('.').collect();
    let (last, parents) = keys.split_last().expect("split yields at least one item");
    let mut cur = table;
    for k in parents {
        cur = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{k}` in override {item:?} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
