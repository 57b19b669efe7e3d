//! Probability-vector exploration of a hyper-parameter grid.
//!
//! Every axis carries a probability vector over its values, initially
//! uniform. Each iteration samples one value per axis, trains the setting
//! for `k` epochs and uses the predicted final accuracy as the reward. A
//! reward above the previous one moves `delta` of probability mass onto the
//! chosen values and their index neighbourhood; a lower reward moves it
//! away. Exploration stops when every axis has a value whose probability
//! exceeds its threshold, or when the iteration budget runs out. The
//! settings with the highest predicted rewards are then trained in full.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::curves_db::{HyperParamAxis, Setting};
use crate::error::{Error, Result};
use crate::predictor::{predict_final_accuracy, PredictionSource};
use crate::svr::SvrModel;
use crate::trainers::{run_seed, Trainer};

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorerConfig {
    /// Probability mass moved per update.
    pub delta: f64,
    /// Neighbourhood half-width in index space; forced to 0 on tag axes.
    pub radius: usize,
    /// Per-axis convergence thresholds, in axis order.
    pub thresholds: Vec<f64>,
    pub max_iterations: usize,
    /// Lower bound kept on every probability after an update.
    pub p_floor: f64,
    /// Prefix epochs fed to the predictor.
    pub k: usize,
    /// Epoch budget of a full training.
    pub fin_epoch: usize,
    /// Number of best-predicted settings trained in full at the end.
    pub top_n: usize,
}

impl ExplorerConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.8;

    /// Defaults for `n_axes` axes: delta 0.05, radius 1, thresholds 0.8,
    /// 200 iterations, floor 0.01, k = 3, top 10.
    pub fn with_defaults(n_axes: usize, fin_epoch: usize) -> Self {
        Self {
            delta: 0.05,
            radius: 1,
            thresholds: vec![Self::DEFAULT_THRESHOLD; n_axes],
            max_iterations: 200,
            p_floor: 0.01,
            k: 3,
            fin_epoch,
            top_n: 10,
        }
    }

    pub fn validate(&self, axes: &[HyperParamAxis]) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter { name: "delta", value: self.delta });
        }
        if self.thresholds.len() != axes.len() {
            return Err(Error::InvalidParameter {
                name: "threshold count",
                value: self.thresholds.len() as f64,
            });
        }
        if let Some(&t) = self.thresholds.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::InvalidParameter { name: "threshold", value: t });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                value: 0.0,
            });
        }
        if !(self.p_floor >= 0.0) || axes.iter().any(|a| self.p_floor * a.len() as f64 >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p_floor",
                value: self.p_floor,
            });
        }
        if self.k == 0 || self.fin_epoch < self.k {
            return Err(Error::InvalidParameter { name: "k", value: self.k as f64 });
        }
        if self.top_n == 0 {
            return Err(Error::InvalidParameter { name: "top_n", value: 0.0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    /// 1-based iteration number.
    pub iteration: usize,
    pub setting: Setting,
    pub reward: f64,
    pub source: PredictionSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorerState {
    probabilities: Vec<Vec<f64>>,
    last_reward: Option<f64>,
    history: Vec<HistoryEntry>,
    iteration: usize,
}

impl ExplorerState {
    /// Uniform probabilities on every axis, no baseline reward.
    pub fn init(axes: &[HyperParamAxis], config: &ExplorerConfig) -> Result<Self> {
        config.validate(axes)?;
        Ok(Self {
            probabilities: axes.iter().map(|a| vec![1.0 / a.len() as f64; a.len()]).collect(),
            last_reward: None,
            history: Vec::new(),
            iteration: 0,
        })
    }

    /// State with explicit probability vectors, each normalized to sum 1.
    pub fn with_probabilities(axes: &[HyperParamAxis], probabilities: Vec<Vec<f64>>) -> Result<Self> {
        if probabilities.len() != axes.len() {
            return Err(Error::DimensionMismatch {
                expected: axes.len(),
                found: probabilities.len(),
            });
        }
        let mut probabilities = probabilities;
        for (p, a) in probabilities.iter_mut().zip(axes) {
            if p.len() != a.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    found: p.len(),
                });
            }
            let sum: f64 = p.iter().sum();
            if p.iter().any(|&v| !(v >= 0.0)) || !(sum > 0.0 && sum.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "probability vector sum",
                    value: sum,
                });
            }
            p.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Self {
            probabilities,
            last_reward: None,
            history: Vec::new(),
            iteration: 0,
        })
    }

    pub fn probabilities(&self) -> &[Vec<f64>] {
        &self.probabilities
    }

    pub fn last_reward(&self) -> Option<f64> {
        self.last_reward
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Draws one index per axis from its probability vector.
    pub fn sample_setting<R: Rng + ?Sized>(&self, rng: &mut R) -> Setting {
        let indices = self
            .probabilities
            .iter()
            .map(|p| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (i, &pi) in p.iter().enumerate() {
                    acc += pi;
                    if u < acc {
                        return i;
                    }
                }
                p.iter().rposition(|&pi| pi > 0.0).unwrap_or(p.len() - 1)
            })
            .collect();
        Setting::from_indices_unchecked(indices)
    }

    /// Applies the reward comparison to every axis and records the reward.
    ///
    /// The first reward only sets the baseline. Ties leave the
    /// probabilities unchanged.
    pub fn update(
        &mut self,
        axes: &[HyperParamAxis],
        config: &ExplorerConfig,
        chosen: &Setting,
        reward: f64,
        source: PredictionSource,
    ) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::InvalidParameter { name: "reward", value: reward });
        }
        chosen.validate(axes)?;
        if let Some(prev) = self.last_reward {
            if reward != prev {
                let up = reward > prev;
                for ((p, axis), &idx) in self.probabilities.iter_mut().zip(axes).zip(chosen.indices()) {
                    let radius = if axis.is_ordered() { config.radius } else { 0 };
                    shift_mass(p, idx, radius, config.delta, up);
                    project_to_floor(p, config.p_floor);
                }
            }
        }
        self.last_reward = Some(reward);
        self.iteration += 1;
        self.history.push(HistoryEntry {
            iteration: self.iteration,
            setting: chosen.clone(),
            reward,
            source,
        });
        Ok(())
    }

    /// The most probable setting when every axis maximum exceeds its threshold.
    ///
    /// Single-valued axes count as converged. Ties pick the lowest index.
    pub fn converged(&self, config: &ExplorerConfig) -> Option<Setting> {
        let mut indices = Vec::with_capacity(self.probabilities.len());
        for (p, &t) in self.probabilities.iter().zip(&config.thresholds) {
            let (best, &pmax) = p
                .iter()
                .enumerate()
                .fold((0, &f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if !(pmax > t || p.len() == 1) {
                return None;
            }
            indices.push(best);
        }
        Some(Setting::from_indices_unchecked(indices))
    }
}

/// Adds `delta` spread over the neighbourhood of `idx` and removes it from
/// the complement (or the reverse when `up` is false), before clamping.
/// A neighbourhood covering the whole axis leaves it unchanged.
fn shift_mass(p: &mut [f64], idx: usize, radius: usize, delta: f64, up: bool) {
    let lo = idx.saturating_sub(radius);
    let hi = (idx + radius).min(p.len() - 1);
    let inside = hi - lo + 1;
    let outside = p.len() - inside;
    if outside == 0 {
        // Nothing to move mass from or to.
        return;
    }
    let sign = if up { 1.0 } else { -1.0 };
    for (i, v) in p.iter_mut().enumerate() {
        if (lo..=hi).contains(&i) {
            *v += sign * delta / inside as f64;
        } else {
            *v -= sign * delta / outside as f64;
        }
    }
}

/// Closest vector with every entry `>= floor` that sums to 1, keeping the
/// relative proportions of the entries above the floor.
fn project_to_floor(p: &mut [f64], floor: f64) {
    for v in p.iter_mut() {
        *v = v.max(0.0);
    }
    let mut pinned = vec![false; p.len()];
    loop {
        let fixed = pinned.iter().filter(|&&b| b).count() as f64 * floor;
        let free_sum: f64 = p.iter().zip(&pinned).filter(|(_, &b)| !b).map(|(v, _)| *v).sum();
        let scale = if free_sum > 0.0 { (1.0 - fixed) / free_sum } else { 0.0 };
        let mut changed = false;
        for (v, pin) in p.iter_mut().zip(pinned.iter_mut()) {
            if !*pin && *v * scale < floor {
                *pin = true;
                changed = true;
            }
        }
        if !changed {
            for (v, &pin) in p.iter_mut().zip(&pinned) {
                *v = if pin { floor } else { *v * scale };
            }
            if free_sum <= 0.0 {
                let n = p.len() as f64;
                p.iter_mut().for_each(|v| *v = 1.0 / n);
            }
            return;
        }
    }
}

/// One setting of the final full-training round.
#[derive(Debug, Clone, PartialEq)]
pub struct TopEntry {
    pub setting: Setting,
    pub predicted: f64,
    pub full_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationFailure {
    pub iteration: usize,
    pub setting: Setting,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationResult {
    pub best: Setting,
    /// Final accuracy of the full training of `best`.
    pub best_accuracy: f64,
    pub history: Vec<HistoryEntry>,
    /// Fully trained settings, by decreasing predicted reward.
    pub top: Vec<TopEntry>,
    /// Setting the probability vectors converged to, if they did.
    pub converged: Option<Setting>,
    pub failures: Vec<IterationFailure>,
    pub final_probabilities: Vec<Vec<f64>>,
}

/// Runs the exploration loop, then fully trains the `top_n` distinct
/// settings with the highest predicted rewards.
///
/// The run seed for trainer calls is the first draw from `rng`; every
/// training of a given setting uses `run_seed(base, setting_id)`.
pub fn explore<T: Trainer + ?Sized, R: Rng + ?Sized>(
    axes: &[HyperParamAxis],
    config: &ExplorerConfig,
    trainer: &T,
    model: &SvrModel,
    rng: &mut R,
) -> Result<ExplorationResult> {
    config.validate(axes)?;
    if model.dim() != config.k {
        return Err(Error::DimensionMismatch {
            expected: config.k,
            found: model.dim(),
        });
    }
    let base_seed: u64 = rng.random();
    let mut state = ExplorerState::init(axes, config)?;
    let mut failures = Vec::new();
    let mut converged = None;
    for t in 1..=config.max_iterations {
        let setting = state.sample_setting(rng);
        let seed = run_seed(base_seed, setting.id(axes));
        let attempt = trainer.train(&setting, config.k, seed).and_then(|curve| {
            if curve.len() < config.k {
                return Err(Error::Trainer(format!(
                    "run stopped after {} of {} prefix epochs",
                    curve.len(),
                    config.k
                )));
            }
            predict_final_accuracy(model, &curve.epoch_accuracies()[..config.k], config.fin_epoch)
        });
        let outcome = match attempt {
            Ok(o) => o,
            Err(error) => {
                log::warn!("iteration {t} skipped: {error}");
                failures.push(IterationFailure { iteration: t, setting, error });
                continue;
            }
        };
        let reward = outcome.value;
        state.update(axes, config, &setting, reward, outcome.source)?;
        // Keep the attempt number rather than the count of successes.
        if let Some(last) = state.history.last_mut() {
            last.iteration = t;
        }
        if let Some(s) = state.converged(config) {
            converged = Some(s);
            break;
        }
    }
    if state.history.is_empty() {
        return Err(Error::NoSuccessfulIterations);
    }

    let mut ranked: Vec<(Setting, f64)> = Vec::new();
    for entry in &state.history {
        match ranked.iter_mut().find(|(s, _)| *s == entry.setting) {
            Some((_, r)) => *r = r.max(entry.reward),
            None => ranked.push((entry.setting.clone(), entry.reward)),
        }
    }
    // Stable sort keeps first-seen order among equal rewards.
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("rewards are finite"));
    ranked.truncate(config.top_n);

    let mut top = Vec::with_capacity(ranked.len());
    for (setting, predicted) in ranked {
        let seed = run_seed(base_seed, setting.id(axes));
        match trainer.train(&setting, config.fin_epoch, seed) {
            Ok(curve) => top.push(TopEntry {
                full_accuracy: curve.last_accuracy(),
                setting,
                predicted,
            }),
            Err(error) => log::warn!("full training of {} failed: {error}", setting.id(axes)),
        }
    }
    let best = top
        .iter()
        .fold(None::<&TopEntry>, |best, e| match best {
            Some(b) if b.full_accuracy >= e.full_accuracy => Some(b),
            _ => Some(e),
        })
        .ok_or(Error::NoSuccessfulIterations)?;
    Ok(ExplorationResult {
        best: best.setting.clone(),
        best_accuracy: best.full_accuracy,
        history: state.history.clone(),
        top: top.clone(),
        converged,
        failures,
        final_probabilities: state.probabilities.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::cell::Cell;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn axes(sizes: &[usize]) -> Vec<HyperParamAxis> {
        sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| HyperParamAxis::integer(format!("a{i}"), (1..=n as u64).collect()).unwrap())
            .collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn init_is_uniform() {
        let ax = axes(&[4]);
        let s = ExplorerState::init(&ax, &ExplorerConfig::with_defaults(1, 30)).unwrap();
        assert_eq!(s.probabilities(), &[vec![0.25; 4]]);
        let ax = axes(&[2, 3]);
        let s = ExplorerState::init(&ax, &ExplorerConfig::with_defaults(2, 30)).unwrap();
        assert!(close(&s.probabilities()[0], &[0.5, 0.5]));
        assert!(close(&s.probabilities()[1], &[1.0 / 3.0; 3]));
        assert!(s.last_reward().is_none() && s.history().is_empty());
    }

    #[test]
    fn singleton_axis_is_converged() {
        let ax = axes(&[1]);
        let cfg = ExplorerConfig::with_defaults(1, 30);
        let s = ExplorerState::init(&ax, &cfg).unwrap();
        assert_eq!(s.converged(&cfg).unwrap().indices(), &[0]);
    }

    #[test]
    fn degenerate_probabilities_always_sample_first() {
        let ax = axes(&[3]);
        let s = ExplorerState::with_probabilities(&ax, vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..1000).all(|_| s.sample_setting(&mut rng).indices() == [0]));
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let ax = axes(&[4]);
        let s = ExplorerState::init(&ax, &ExplorerConfig::with_defaults(1, 30)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[s.sample_setting(&mut rng).indices()[0]] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn axes_sample_independently() {
        let ax = axes(&[2, 3]);
        let p1 = [0.7, 0.3];
        let p2 = [0.2, 0.5, 0.3];
        let s = ExplorerState::with_probabilities(&ax, vec![p1.to_vec(), p2.to_vec()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut joint = [[0usize; 3]; 2];
        let n = 100_000;
        for _ in 0..n {
            let st = s.sample_setting(&mut rng);
            joint[st.indices()[0]][st.indices()[1]] += 1;
        }
        for i in 0..2 {
            for j in 0..3 {
                let f = joint[i][j] as f64 / n as f64;
                assert!((f - p1[i] * p2[j]).abs() < 0.01, "({i},{j}) {f}");
            }
        }
    }

    #[test]
    fn shift_is_monotone_before_clamping() {
        for radius in 0..4 {
            for idx in 0..5 {
                let base = vec![0.1, 0.3, 0.2, 0.15, 0.25];
                let mut up = base.clone();
                shift_mass(&mut up, idx, radius, 0.05, true);
                let mut down = base.clone();
                shift_mass(&mut down, idx, radius, 0.05, false);
                assert!(up[idx] >= base[idx] && down[idx] <= base[idx]);
                assert!((up.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    fn stepped(reward: f64) -> Vec<f64> {
        let ax = axes(&[4]);
        let mut cfg = ExplorerConfig::with_defaults(1, 30);
        cfg.delta = 0.06;
        cfg.radius = 1;
        let mut s = ExplorerState::init(&ax, &cfg).unwrap();
        let chosen = Setting::new(&ax, vec![1]).unwrap();
        s.update(&ax, &cfg, &chosen, 0.5, PredictionSource::Svr).unwrap();
        assert_eq!(s.probabilities()[0], vec![0.25; 4]);
        s.update(&ax, &cfg, &chosen, reward, PredictionSource::Svr).unwrap();
        s.probabilities()[0].clone()
    }

    #[test]
    fn reward_increase_boosts_neighbourhood() {
        assert!(close(&stepped(0.6), &[0.27, 0.27, 0.27, 0.19]));
    }

    #[test]
    fn reward_decrease_penalizes_neighbourhood() {
        assert!(close(&stepped(0.4), &[0.23, 0.23, 0.23, 0.31]));
    }

    #[test]
    fn equal_reward_changes_nothing() {
        assert_eq!(stepped(0.5), vec![0.25; 4]);
    }

    #[test]
    fn update_rejects_out_of_range_reward() {
        let ax = axes(&[2]);
        let cfg = ExplorerConfig::with_defaults(1, 30);
        let mut s = ExplorerState::init(&ax, &cfg).unwrap();
        let chosen = Setting::new(&ax, vec![0]).unwrap();
        assert!(s.update(&ax, &cfg, &chosen, 1.5, PredictionSource::Svr).is_err());
        assert!(s.history().is_empty());
    }

    #[test]
    fn tag_axis_has_no_neighbourhood() {
        let ax = vec![HyperParamAxis::tag("opt", ["sgd", "momentum", "adam"]).unwrap()];
        let mut cfg = ExplorerConfig::with_defaults(1, 30);
        cfg.delta = 0.06;
        let mut s = ExplorerState::init(&ax, &cfg).unwrap();
        let chosen = Setting::new(&ax, vec![1]).unwrap();
        s.update(&ax, &cfg, &chosen, 0.2, PredictionSource::Svr).unwrap();
        s.update(&ax, &cfg, &chosen, 0.3, PredictionSource::Svr).unwrap();
        let third = 1.0 / 3.0;
        assert!(close(&s.probabilities()[0], &[third - 0.03, third + 0.06, third - 0.03]));
    }

    #[test]
    fn convergence_rule() {
        let ax = axes(&[3, 2]);
        let cfg = ExplorerConfig::with_defaults(2, 30);
        let s = ExplorerState::with_probabilities(&ax, vec![vec![0.05, 0.9, 0.05], vec![0.5, 0.5]]).unwrap();
        assert!(s.converged(&cfg).is_none());
        let s = ExplorerState::with_probabilities(&ax, vec![vec![0.05, 0.9, 0.05], vec![0.1, 0.9]]).unwrap();
        assert_eq!(s.converged(&cfg).unwrap().indices(), &[1, 1]);
        let one = axes(&[3]);
        let cfg1 = ExplorerConfig::with_defaults(1, 30);
        let s = ExplorerState::with_probabilities(&one, vec![vec![0.1, 0.1, 0.8]]).unwrap();
        assert!(s.converged(&cfg1).is_none(), "max must strictly exceed the threshold");
    }

    #[test]
    fn floor_projection_keeps_distribution() {
        let mut p = vec![0.5, -0.1, 0.005, 0.595];
        project_to_floor(&mut p, 0.01);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v >= 0.01 - 1e-15));
        assert_eq!(p[1], 0.01);
        assert_eq!(p[2], 0.01);
        assert!((p[0] / p[3] - 0.5 / 0.595).abs() < 1e-12);
    }

    /// Trainer returning constant curves whose level is given per grid id.
    struct Table {
        axes: Vec<HyperParamAxis>,
        levels: Vec<f64>,
        calls: Cell<usize>,
        fail_all: bool,
    }

    impl Trainer for Table {
        fn axes(&self) -> &[HyperParamAxis] {
            &self.axes
        }

        fn train(&self, setting: &Setting, epochs: usize, _seed: u64) -> Result<crate::curves_db::LearningCurve> {
            self.calls.set(self.calls.get() + 1);
            if self.fail_all {
                return Err(Error::Trainer("boom".into()));
            }
            let a = self.levels[setting.id(&self.axes)];
            let accs = (1..=epochs).map(|e| a * (1.0 - 0.5 / e as f64)).collect();
            crate::curves_db::LearningCurve::completed(accs, epochs)
        }
    }

    fn table(fail_all: bool) -> Table {
        let ax = axes(&[3, 2]);
        Table {
            levels: vec![0.3, 0.4, 0.5, 0.6, 0.9, 0.2],
            axes: ax,
            calls: Cell::new(0),
            fail_all,
        }
    }

    #[test]
    fn single_iteration_budget() {
        let t = table(false);
        let mut cfg = ExplorerConfig::with_defaults(2, 10);
        cfg.max_iterations = 1;
        cfg.k = 2;
        let model = SvrModel::bias_only(2.0, crate::svr::KernelSpec::default_gaussian(2), 2).unwrap();
        let r = explore(&t.axes, &cfg, &t, &model, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.top.len(), 1);
        assert_eq!(r.best, r.history[0].setting);
        assert_eq!(t.calls.get(), 2);
    }

    #[test]
    fn saturated_top_n_retrains_every_explored_setting() {
        let t = table(false);
        let mut cfg = ExplorerConfig::with_defaults(2, 10);
        cfg.max_iterations = 40;
        cfg.k = 2;
        cfg.top_n = 100;
        let model = SvrModel::bias_only(2.0, crate::svr::KernelSpec::default_gaussian(2), 2).unwrap();
        let r = explore(&t.axes, &cfg, &t, &model, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let mut distinct: Vec<&Setting> = r.history.iter().map(|h| &h.setting).collect();
        distinct.sort();
        distinct.dedup();
        assert_eq!(r.top.len(), distinct.len());
        let best_level = r.top.iter().map(|e| e.full_accuracy).fold(0.0, f64::max);
        assert_eq!(r.best_accuracy, best_level);
    }

    #[test]
    fn total_failure_is_an_error() {
        let t = table(true);
        let mut cfg = ExplorerConfig::with_defaults(2, 10);
        cfg.k = 2;
        cfg.max_iterations = 5;
        let model = SvrModel::bias_only(0.5, crate::svr::KernelSpec::default_gaussian(2), 2).unwrap();
        let r = explore(&t.axes, &cfg, &t, &model, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(r, Err(Error::NoSuccessfulIterations));
    }

    #[test]
    fn model_dimension_must_match_k() {
        let t = table(false);
        let cfg = ExplorerConfig::with_defaults(2, 10);
        let model = SvrModel::bias_only(0.5, crate::svr::KernelSpec::default_gaussian(2), 2).unwrap();
        assert!(explore(&t.axes, &cfg, &t, &model, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
    }

    #[test]
    fn exploration_is_deterministic() {
        let t = table(false);
        let mut cfg = ExplorerConfig::with_defaults(2, 10);
        cfg.k = 2;
        cfg.max_iterations = 60;
        let model = SvrModel::bias_only(2.0, crate::svr::KernelSpec::default_gaussian(2), 2).unwrap();
        let a = explore(&t.axes, &cfg, &t, &model, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = explore(&t.axes, &cfg, &t, &model, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn updates_keep_valid_distributions(
                rewards in proptest::collection::vec(0.0f64..=1.0, 1..60),
                picks in proptest::collection::vec((0usize..7, 0usize..3), 60),
                delta in 0.01f64..0.5,
                radius in 0usize..4,
            ) {
                let ax = vec![
                    HyperParamAxis::integer("n", (1..=7).collect()).unwrap(),
                    HyperParamAxis::tag("t", ["x", "y", "z"]).unwrap(),
                ];
                let mut cfg = ExplorerConfig::with_defaults(2, 30);
                cfg.delta = delta;
                cfg.radius = radius;
                let mut s = ExplorerState::init(&ax, &cfg).unwrap();
                for (r, &(i, j)) in rewards.iter().zip(&picks) {
                    let chosen = Setting::new(&ax, vec![i, j]).unwrap();
                    s.update(&ax, &cfg, &chosen, *r, PredictionSource::Svr).unwrap();
                    for p in s.probabilities() {
                        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                        prop_assert!(p.iter().all(|&v| v >= cfg.p_floor - 1e-12 && v <= 1.0));
                    }
                }
                prop_assert_eq!(s.history().len(), rewards.len());
            }
        }
    }
}
