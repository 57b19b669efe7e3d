//! Hyper-parameter grid, learning curves and the database of full trainings
//! that the regression model is fit on.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::trainers::{run_seed, Trainer};

/// Admissible values of one hyper-parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    /// Strictly increasing reals (e.g. learning rate).
    Real(Vec<f64>),
    /// Strictly increasing positive integers (e.g. batch size).
    Integer(Vec<u64>),
    /// Unordered symbolic tags (e.g. optimizer kind).
    Tag(Vec<String>),
}

/// Borrowed view of a single axis value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisValue<'a> {
    Real(f64),
    Integer(u64),
    Tag(&'a str),
}

impl AxisValue<'_> {
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            AxisValue::Real(v) => Some(v),
            AxisValue::Integer(v) => Some(v as f64),
            AxisValue::Tag(_) => None,
        }
    }

    pub fn as_integer(&self) -> Option<u64> {
        match *self {
            AxisValue::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_tag(&self) -> Option<&str> {
        match self {
            AxisValue::Tag(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for AxisValue<'_> {
    /// Reals use the shortest representation that parses back to the same `f64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::Real(v) => write!(f, "{v:?}"),
            AxisValue::Integer(v) => write!(f, "{v}"),
            AxisValue::Tag(t) => f.write_str(t),
        }
    }
}

/// One hyper-parameter and the ordered list of values it may take.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParamAxis {
    name: String,
    values: AxisValues,
}

impl HyperParamAxis {
    pub fn new(name: impl Into<String>, values: AxisValues) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: &str| Error::InvalidAxis {
            axis: name.clone(),
            reason: reason.to_string(),
        };
        if name.is_empty() || name.contains([',', '\n', '\r']) {
            return Err(invalid("name must be non-empty and free of commas/newlines"));
        }
        match &values {
            AxisValues::Real(v) => {
                if v.is_empty() {
                    return Err(invalid("no values"));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("non-finite value"));
                }
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("values must be strictly increasing"));
                }
            }
            AxisValues::Integer(v) => {
                if v.is_empty() {
                    return Err(invalid("no values"));
                }
                if v.contains(&0) {
                    return Err(invalid("integer values must be positive"));
                }
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("values must be strictly increasing"));
                }
            }
            AxisValues::Tag(v) => {
                if v.is_empty() {
                    return Err(invalid("no values"));
                }
                if v.iter().any(|t| t.is_empty() || t.contains([',', '\n', '\r'])) {
                    return Err(invalid("tags must be non-empty and free of commas/newlines"));
                }
                for (i, t) in v.iter().enumerate() {
                    if v[..i].contains(t) {
                        return Err(invalid("duplicate tag"));
                    }
                }
            }
        }
        Ok(Self { name, values })
    }

    pub fn real(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(name, AxisValues::Real(values))
    }

    pub fn integer(name: impl Into<String>, values: Vec<u64>) -> Result<Self> {
        Self::new(name, AxisValues::Integer(values))
    }

    pub fn tag<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(name, AxisValues::Tag(values.into_iter().map(Into::into).collect()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &AxisValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        match &self.values {
            AxisValues::Real(v) => v.len(),
            AxisValues::Integer(v) => v.len(),
            AxisValues::Tag(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether index distance carries meaning (false for tag axes).
    pub fn is_ordered(&self) -> bool {
        !matches!(self.values, AxisValues::Tag(_))
    }

    pub fn value(&self, index: usize) -> Option<AxisValue<'_>> {
        match &self.values {
            AxisValues::Real(v) => v.get(index).map(|&x| AxisValue::Real(x)),
            AxisValues::Integer(v) => v.get(index).map(|&x| AxisValue::Integer(x)),
            AxisValues::Tag(v) => v.get(index).map(|t| AxisValue::Tag(t)),
        }
    }

    /// Parses a serialized value and returns its index on this axis.
    pub fn index_of_str(&self, text: &str) -> Option<usize> {
        let text = text.trim();
        match &self.values {
            AxisValues::Real(v) => {
                let x: f64 = text.parse().ok()?;
                v.iter().position(|&y| y == x)
            }
            AxisValues::Integer(v) => {
                let x: u64 = text.parse().ok()?;
                v.iter().position(|&y| y == x)
            }
            AxisValues::Tag(v) => v.iter().position(|t| t == text),
        }
    }
}

fn validate_axes(axes: &[HyperParamAxis]) -> Result<()> {
    if axes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::InvalidAxis {
                axis: a.name.clone(),
                reason: "duplicate axis name".to_string(),
            });
        }
    }
    Ok(())
}

/// Number of settings in the Cartesian product of `axes`.
pub fn grid_size(axes: &[HyperParamAxis]) -> usize {
    axes.iter().map(HyperParamAxis::len).product()
}

/// One value per axis, stored as indices into the axes it was built against.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Setting {
    indices: Vec<usize>,
}

impl Setting {
    pub fn new(axes: &[HyperParamAxis], indices: Vec<usize>) -> Result<Self> {
        let setting = Self { indices };
        setting.validate(axes)?;
        Ok(setting)
    }

    pub(crate) fn from_indices_unchecked(indices: Vec<usize>) -> Self {
        Self { indices }
    }

    /// Inverse of [`Setting::id`].
    pub fn from_id(axes: &[HyperParamAxis], id: usize) -> Result<Self> {
        validate_axes(axes)?;
        if id >= grid_size(axes) {
            return Err(Error::InvalidSetting(format!("setting id {id} outside the grid")));
        }
        let mut rest = id;
        let mut indices = alloc::vec![0; axes.len()];
        for (slot, axis) in indices.iter_mut().zip(axes).rev() {
            *slot = rest % axis.len();
            rest /= axis.len();
        }
        Ok(Self { indices })
    }

    pub fn validate(&self, axes: &[HyperParamAxis]) -> Result<()> {
        if self.indices.len() != axes.len() {
            return Err(Error::InvalidSetting(format!(
                "{} values for {} axes",
                self.indices.len(),
                axes.len()
            )));
        }
        for (&i, axis) in self.indices.iter().zip(axes) {
            if i >= axis.len() {
                return Err(Error::InvalidSetting(format!(
                    "index {i} outside axis `{}` of size {}",
                    axis.name(),
                    axis.len()
                )));
            }
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Position of this setting in the lexicographic enumeration of the grid.
    pub fn id(&self, axes: &[HyperParamAxis]) -> usize {
        self.indices
            .iter()
            .zip(axes)
            .fold(0, |acc, (&i, axis)| acc * axis.len() + i)
    }

    pub fn value<'a>(&self, axes: &'a [HyperParamAxis], axis_name: &str) -> Option<AxisValue<'a>> {
        let pos = axes.iter().position(|a| a.name() == axis_name)?;
        axes[pos].value(*self.indices.get(pos)?)
    }

    /// Human-readable `name=value` pairs.
    pub fn describe(&self, axes: &[HyperParamAxis]) -> String {
        let mut out = String::new();
        for (k, (&i, axis)) in self.indices.iter().zip(axes).enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            match axis.value(i) {
                Some(v) => out.push_str(&format!("{}={}", axis.name(), v)),
                None => out.push_str(&format!("{}=?", axis.name())),
            }
        }
        out
    }
}

/// All settings of the grid in lexicographic axis order (last axis fastest).
pub fn enumerate_grid(axes: &[HyperParamAxis]) -> Result<Vec<Setting>> {
    validate_axes(axes)?;
    (0..grid_size(axes)).map(|id| Setting::from_id(axes, id)).collect()
}

/// Uniform sample without replacement of `ceil(fraction * |grid|)` settings.
pub fn sample_settings(axes: &[HyperParamAxis], fraction: f64, rng_seed: u64) -> Result<Vec<Setting>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    validate_axes(axes)?;
    let total = grid_size(axes);
    // Absorb representation error such as 0.1 * 60 = 6.000000000000001.
    let count = libm::ceil(fraction * total as f64 - 1e-9).max(1.0) as usize;
    sample_count(axes, count.min(total), rng_seed)
}

/// Uniform sample without replacement of exactly `count` settings.
pub fn sample_count(axes: &[HyperParamAxis], count: usize, rng_seed: u64) -> Result<Vec<Setting>> {
    validate_axes(axes)?;
    let total = grid_size(axes);
    if count > total {
        return Err(Error::InvalidSetting(format!(
            "cannot draw {count} distinct settings from a grid of {total}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rand::seq::index::sample(&mut rng, total, count)
        .into_iter()
        .map(|id| Setting::from_id(axes, id))
        .collect()
}

/// Per-epoch validation accuracies of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    epoch_accuracies: Vec<f64>,
    final_accuracy: Option<f64>,
    fin_epoch: usize,
}

fn check_accuracy(value: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidCurve(format!("{what} {value} outside [0, 1]")));
    }
    Ok(())
}

impl LearningCurve {
    pub fn new(epoch_accuracies: Vec<f64>, final_accuracy: Option<f64>, fin_epoch: usize) -> Result<Self> {
        if epoch_accuracies.is_empty() {
            return Err(Error::InvalidCurve("no epochs".to_string()));
        }
        if fin_epoch == 0 {
            return Err(Error::InvalidCurve("fin_epoch must be positive".to_string()));
        }
        if epoch_accuracies.len() > fin_epoch {
            return Err(Error::InvalidCurve(format!(
                "{} epochs exceed fin_epoch {fin_epoch}",
                epoch_accuracies.len()
            )));
        }
        for (e, &a) in epoch_accuracies.iter().enumerate() {
            check_accuracy(a, &format!("accuracy at epoch {}", e + 1))?;
        }
        if let Some(f) = final_accuracy {
            check_accuracy(f, "final accuracy")?;
        }
        Ok(Self {
            epoch_accuracies,
            final_accuracy,
            fin_epoch,
        })
    }

    /// A completed run: the final accuracy is the last observed epoch.
    pub fn completed(epoch_accuracies: Vec<f64>, fin_epoch: usize) -> Result<Self> {
        let last = epoch_accuracies.last().copied();
        Self::new(epoch_accuracies, last, fin_epoch)
    }

    pub fn epoch_accuracies(&self) -> &[f64] {
        &self.epoch_accuracies
    }

    pub fn final_accuracy(&self) -> Option<f64> {
        self.final_accuracy
    }

    pub fn fin_epoch(&self) -> usize {
        self.fin_epoch
    }

    pub fn len(&self) -> usize {
        self.epoch_accuracies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epoch_accuracies.is_empty()
    }

    pub fn acc_max(&self) -> f64 {
        self.epoch_accuracies.iter().copied().fold(0.0, f64::max)
    }

    pub fn last_accuracy(&self) -> f64 {
        *self.epoch_accuracies.last().expect("curve is non-empty")
    }
}

/// One database row: a setting and the curve of its full training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRecord {
    setting: Setting,
    curve: LearningCurve,
}

impl TrainingRecord {
    pub fn new(setting: Setting, curve: LearningCurve) -> Result<Self> {
        if curve.final_accuracy().is_none() {
            return Err(Error::InvalidCurve(
                "database records need a final accuracy".to_string(),
            ));
        }
        Ok(Self { setting, curve })
    }

    pub fn setting(&self) -> &Setting {
        &self.setting
    }

    pub fn curve(&self) -> &LearningCurve {
        &self.curve
    }

    pub fn final_accuracy(&self) -> f64 {
        self.curve.final_accuracy().expect("checked at construction")
    }
}

/// Full-training records over a fixed set of axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    axes: Vec<HyperParamAxis>,
    records: Vec<TrainingRecord>,
    seed: u64,
}

impl Database {
    pub fn new(axes: Vec<HyperParamAxis>, seed: u64) -> Result<Self> {
        validate_axes(&axes)?;
        Ok(Self {
            axes,
            records: Vec::new(),
            seed,
        })
    }

    pub fn from_records(axes: Vec<HyperParamAxis>, records: Vec<TrainingRecord>, seed: u64) -> Result<Self> {
        let mut db = Self::new(axes, seed)?;
        for r in records {
            db.insert(r)?;
        }
        Ok(db)
    }

    /// Appends a record; rejects settings that do not fit the axes or are already present.
    pub fn insert(&mut self, record: TrainingRecord) -> Result<()> {
        record.setting.validate(&self.axes)?;
        if self.records.iter().any(|r| r.setting == record.setting) {
            return Err(Error::DuplicateSetting(record.setting.id(&self.axes)));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn axes(&self) -> &[HyperParamAxis] {
        &self.axes
    }

    pub fn records(&self) -> &[TrainingRecord] {
        &self.records
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Random disjoint partition into `n_train` and `len - n_train` records.
    /// Each part keeps the original record order.
    pub fn split(&self, n_train: usize, rng_seed: u64) -> Result<(Database, Database)> {
        let total = self.records.len();
        if n_train == 0 || n_train >= total {
            return Err(Error::SplitOutOfRange { n_train, total });
        }
        let mut order: Vec<usize> = (0..total).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
        let mut in_train = alloc::vec![false; total];
        for &i in &order[..n_train] {
            in_train[i] = true;
        }
        let part = |keep: bool| Database {
            axes: self.axes.clone(),
            records: self
                .records
                .iter()
                .zip(&in_train)
                .filter(|(_, &t)| t == keep)
                .map(|(r, _)| r.clone())
                .collect(),
            seed: self.seed,
        };
        Ok((part(true), part(false)))
    }
}

/// A setting whose training failed while building a database.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedSetting {
    pub setting: Setting,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutcome {
    pub database: Database,
    pub skipped: Vec<SkippedSetting>,
}

/// Fully trains every setting and collects the resulting curves.
///
/// Each training uses the seed `run_seed(seed, setting_id)`, so a given
/// setting reproduces the same curve regardless of which other settings are
/// in the batch. Trainer failures are reported in [`BuildOutcome::skipped`].
pub fn build_database<T: Trainer + ?Sized>(
    axes: &[HyperParamAxis],
    settings: &[Setting],
    trainer: &T,
    fin_epoch: usize,
    seed: u64,
) -> Result<BuildOutcome> {
    if fin_epoch == 0 {
        return Err(Error::InvalidParameter {
            name: "fin_epoch",
            value: 0.0,
        });
    }
    let mut database = Database::new(axes.to_vec(), seed)?;
    let mut skipped = Vec::new();
    for setting in settings {
        setting.validate(axes)?;
        let trained = trainer
            .train(setting, fin_epoch, run_seed(seed, setting.id(axes)))
            .and_then(|curve| {
                let curve = LearningCurve::completed(curve.epoch_accuracies().to_vec(), fin_epoch)?;
                TrainingRecord::new(setting.clone(), curve)
            });
        match trained.and_then(|record| database.insert(record)) {
            Ok(()) => {}
            Err(error) => {
                log::warn!("skipping setting {}: {}", setting.id(axes), error);
                skipped.push(SkippedSetting {
                    setting: setting.clone(),
                    error,
                });
            }
        }
    }
    Ok(BuildOutcome { database, skipped })
}
