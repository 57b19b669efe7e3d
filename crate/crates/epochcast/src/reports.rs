//! CSV outputs of the predictor evaluation, kernel comparison and exploration.

use std::io::{Read, Write};

use epochcast_core::curves_db::{HyperParamAxis, Setting};
use epochcast_core::explorer::{HistoryEntry, TopEntry};
use epochcast_core::predictor::{EvaluationReport, PredictionSource};

use crate::error::{from_csv, Error, Result};

pub const EVALUATION_HEADER: [&str; 5] = ["record_id", "true_final", "predicted", "source", "abs_error"];

fn setting_fields(axes: &[HyperParamAxis], s: &Setting) -> Vec<String> {
    axes.iter()
        .zip(s.indices())
        .map(|(a, &i)| a.value(i).expect("valid setting").to_string())
        .collect()
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("report", e))
}

/// `record_id,true_final,predicted,source,abs_error`, then `# mse=.. fallback_rate=..`.
pub fn write_evaluation<W: Write>(report: &EvaluationReport, mut out: W) -> Result<()> {
    {
        let mut w = writer(&mut out);
        w.write_record(EVALUATION_HEADER).map_err(|e| from_csv(e, "evaluation"))?;
        for r in &report.rows {
            w.write_record([
                r.record_id.to_string(),
                format!("{:?}", r.true_final),
                format!("{:?}", r.predicted),
                r.source.as_str().to_string(),
                format!("{:?}", r.abs_error()),
            ])
            .map_err(|e| from_csv(e, "evaluation"))?;
        }
        finish(w)?;
    }
    writeln!(out, "# mse={:?} fallback_rate={:?}", report.mse, report.fallback_rate).map_err(|e| Error::io("report", e))
}

/// `t,<axes...>,reward,source`
pub fn write_history<W: Write>(axes: &[HyperParamAxis], history: &[HistoryEntry], out: W) -> Result<()> {
    let mut w = writer(out);
    let mut head = vec!["t".to_string()];
    head.extend(axes.iter().map(|a| a.name().to_string()));
    head.extend(["reward".to_string(), "source".to_string()]);
    w.write_record(&head).map_err(|e| from_csv(e, "history"))?;
    for h in history {
        let mut row = vec![h.iteration.to_string()];
        row.extend(setting_fields(axes, &h.setting));
        row.push(format!("{:?}", h.reward));
        row.push(h.source.as_str().to_string());
        w.write_record(&row).map_err(|e| from_csv(e, "history"))?;
    }
    finish(w)
}

/// `rank,<axes...>,predicted,full_accuracy`, best predicted first.
pub fn write_top<W: Write>(axes: &[HyperParamAxis], top: &[TopEntry], out: W) -> Result<()> {
    let mut w = writer(out);
    let mut head = vec!["rank".to_string()];
    head.extend(axes.iter().map(|a| a.name().to_string()));
    head.extend(["predicted".to_string(), "full_accuracy".to_string()]);
    w.write_record(&head).map_err(|e| from_csv(e, "report"))?;
    for (rank, e) in top.iter().enumerate() {
        let mut row = vec![(rank + 1).to_string()];
        row.extend(setting_fields(axes, &e.setting));
        row.push(format!("{:?}", e.predicted));
        row.push(format!("{:?}", e.full_accuracy));
        w.write_record(&row).map_err(|e| from_csv(e, "report"))?;
    }
    finish(w)
}

/// One row of the kernel comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    pub kernel: String,
    /// Test MSE of the raw regression output.
    pub svr_mse: f64,
    /// Test MSE of the gated predictor.
    pub predictor_mse: f64,
    pub fallback_rate: f64,
    pub n_sv: usize,
    pub selected: bool,
}

pub fn write_kernels<W: Write>(rows: &[KernelRow], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["kernel", "svr_mse", "predictor_mse", "fallback_rate", "n_sv", "selected"])
        .map_err(|e| from_csv(e, "kernels"))?;
    for r in rows {
        w.write_record([
            r.kernel.clone(),
            format!("{:?}", r.svr_mse),
            format!("{:?}", r.predictor_mse),
            format!("{:?}", r.fallback_rate),
            r.n_sv.to_string(),
            r.selected.to_string(),
        ])
        .map_err(|e| from_csv(e, "kernels"))?;
    }
    finish(w)
}

/// Columns of a plot input file.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotInput {
    /// `(record_id, true_final, predicted)` rows.
    Evaluation(Vec<(usize, f64, f64)>),
    /// `(t, reward)` rows.
    History(Vec<(usize, f64)>),
}

/// Reads an evaluation or history CSV, told apart by their headers.
pub fn read_plot_input<R: Read>(input: R) -> Result<PlotInput> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let head = r.headers().map_err(|e| from_csv(e, "header"))?.clone();
    if head.is_empty() || head.iter().all(|h| h.is_empty()) {
        return Err(Error::format(1, "header", "empty file"));
    }
    let col = |name: &str| head.iter().position(|h| h == name);
    let is_eval = head.iter().eq(EVALUATION_HEADER.iter().copied());
    let history_cols = match (head.get(0), col("reward"), col("source")) {
        (Some("t"), Some(rc), Some(_)) => Some(rc),
        _ => None,
    };
    if !is_eval && history_cols.is_none() {
        return Err(Error::format(1, "header", "neither an evaluation nor a history file"));
    }
    let mut eval = Vec::new();
    let mut hist = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| from_csv(e, "row"))?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |i: usize, name: &str| -> Result<f64> {
            let t = row.get(i).unwrap_or("");
            t.parse().map_err(|_| Error::format(line, name, format!("cannot parse {t:?}")))
        };
        let int = |i: usize, name: &str| -> Result<usize> {
            let t = row.get(i).unwrap_or("");
            t.parse().map_err(|_| Error::format(line, name, format!("cannot parse {t:?}")))
        };
        if is_eval {
            let src = row.get(3).unwrap_or("");
            if PredictionSource::parse(src).is_none() {
                return Err(Error::format(line, "source", format!("unknown source {src:?}")));
            }
            eval.push((int(0, "record_id")?, num(1, "true_final")?, num(2, "predicted")?));
        } else {
            hist.push((int(0, "t")?, num(history_cols.unwrap(), "reward")?));
        }
    }
    if eval.is_empty() && hist.is_empty() {
        return Err(Error::Invalid("no data rows to plot".into()));
    }
    Ok(if is_eval {
        PlotInput::Evaluation(eval)
    } else {
        PlotInput::History(hist)
    })
}
