//! Final-accuracy prediction from the first epochs of a run.
//!
//! The regression model's output is accepted when it lies strictly above
//! the best accuracy already observed and does not exceed 1. Otherwise the
//! prefix is extrapolated with the constrained power-law fit.

use alloc::vec::Vec;

use crate::curves_db::{Database, LearningCurve};
use crate::error::{Error, Result};
use crate::power_fit::{self, PowerFit};
use crate::svr::SvrModel;

/// Which estimator produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictionSource {
    Svr,
    CurveFit,
}

impl PredictionSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            PredictionSource::Svr => "svr",
            PredictionSource::CurveFit => "curve_fit",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "svr" => Some(PredictionSource::Svr),
            "curve_fit" => Some(PredictionSource::CurveFit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionOutcome {
    pub value: f64,
    pub source: PredictionSource,
    /// Regression output before gating.
    pub svr_raw: f64,
    /// Present when the curve-fit branch was taken.
    pub fit: Option<PowerFit>,
}

/// The first `k` epoch accuracies of `curve`.
pub fn extract_features(curve: &LearningCurve, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter { name: "k", value: 0.0 });
    }
    if k > curve.len() {
        return Err(Error::InvalidCurve(alloc::format!(
            "need {k} epochs for features, curve has {}",
            curve.len()
        )));
    }
    Ok(curve.epoch_accuracies()[..k].to_vec())
}

/// True when the regression output is kept: `acc_max < svr_raw <= 1`.
pub fn accepts(svr_raw: f64, acc_max: f64) -> bool {
    svr_raw > acc_max && svr_raw <= 1.0
}

/// Predicts the accuracy at `fin_epoch` from accuracies of epochs `1..=k`.
pub fn predict_final_accuracy(model: &SvrModel, prefix: &[f64], fin_epoch: usize) -> Result<PredictionOutcome> {
    if prefix.len() < 2 {
        return Err(Error::TooFewPoints(prefix.len()));
    }
    if let Some(&bad) = prefix.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidCurve(alloc::format!("accuracy {bad} outside [0, 1]")));
    }
    if fin_epoch < prefix.len() {
        return Err(Error::InvalidParameter {
            name: "fin_epoch",
            value: fin_epoch as f64,
        });
    }
    let svr_raw = model.predict(prefix)?;
    let acc_max = prefix.iter().copied().fold(0.0, f64::max);
    if accepts(svr_raw, acc_max) {
        return Ok(PredictionOutcome {
            value: svr_raw,
            source: PredictionSource::Svr,
            svr_raw,
            fit: None,
        });
    }
    let points: Vec<(usize, f64)> = prefix.iter().enumerate().map(|(i, &a)| (i + 1, a)).collect();
    let fit = power_fit::fit_power_law(&points, acc_max, fin_epoch)?;
    Ok(PredictionOutcome {
        value: fit.predict_final(),
        source: PredictionSource::CurveFit,
        svr_raw,
        fit: Some(fit),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRow {
    /// Grid id of the record's setting.
    pub record_id: usize,
    pub true_final: f64,
    pub predicted: f64,
    pub source: PredictionSource,
}

impl EvaluationRow {
    pub fn abs_error(&self) -> f64 {
        (self.predicted - self.true_final).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<EvaluationRow>,
    pub mse: f64,
    /// Fraction of rows answered by the curve fit.
    pub fallback_rate: f64,
}

/// Predicts every test record from its first `k` epochs.
pub fn evaluate_predictor(model: &SvrModel, test_db: &Database, k: usize) -> Result<EvaluationReport> {
    if test_db.is_empty() {
        return Err(Error::EmptyData("test set"));
    }
    let mut rows = Vec::with_capacity(test_db.len());
    for record in test_db.records() {
        let prefix = extract_features(record.curve(), k)?;
        let outcome = predict_final_accuracy(model, &prefix, record.curve().fin_epoch())?;
        rows.push(EvaluationRow {
            record_id: record.setting().id(test_db.axes()),
            true_final: record.final_accuracy(),
            predicted: outcome.value,
            source: outcome.source,
        });
    }
    let n = rows.len() as f64;
    let mse = rows.iter().map(|r| { let d = r.predicted - r.true_final; d * d }).sum::<f64>() / n;
    let fallbacks = rows.iter().filter(|r| r.source == PredictionSource::CurveFit).count();
    Ok(EvaluationReport {
        rows,
        mse,
        fallback_rate: fallbacks as f64 / n,
    })
}
