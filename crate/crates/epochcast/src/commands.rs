//! One function per subcommand. Each writes its files under the configured
//! output directory and returns what it wrote.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use epochcast_core::curves_db::{build_database, grid_size, sample_count, sample_settings, Database};
use epochcast_core::explorer::{explore, ExplorationResult};
use epochcast_core::predictor::{evaluate_predictor, extract_features, predict_final_accuracy, PredictionOutcome};
use epochcast_core::svr::{mse, train_svr, SvrModel};
use epochcast_core::trainers::Trainer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::csv_db::{load_csv, save_csv};
use crate::error::{Error, Result};
use crate::model_io::{load_model, save_model};
use crate::reports::{read_plot_input, write_evaluation, write_history, write_kernels, write_top, KernelRow};
use crate::svg;

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    let dir = cfg.out_dir.as_path();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildDbSummary {
    pub grid_size: usize,
    pub fraction: f64,
    pub sampled: usize,
    pub records: usize,
    pub skipped: usize,
    pub path: PathBuf,
}

/// Samples settings, trains each in full and writes `database.csv`.
pub fn build_db(cfg: &RunConfig) -> Result<BuildDbSummary> {
    let axes = cfg.axes()?;
    let trainer = cfg.trainer()?;
    let settings = match cfg.database.count {
        Some(n) => sample_count(&axes, n, cfg.seed)?,
        None => sample_settings(&axes, cfg.database.fraction, cfg.seed)?,
    };
    let outcome = build_database(&axes, &settings, &trainer, cfg.database.fin_epoch, cfg.seed)?;
    let path = out_dir(cfg)?.join("database.csv");
    save_csv(&outcome.database, &path)?;
    let n = grid_size(&axes);
    Ok(BuildDbSummary {
        grid_size: n,
        fraction: settings.len() as f64 / n as f64,
        sampled: settings.len(),
        records: outcome.database.len(),
        skipped: outcome.skipped.len(),
        path,
    })
}

fn features(db: &Database, k: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut x = Vec::with_capacity(db.len());
    let mut y = Vec::with_capacity(db.len());
    for r in db.records() {
        x.push(extract_features(r.curve(), k)?);
        y.push(r.final_accuracy());
    }
    Ok((x, y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSvrSummary {
    pub n_train: usize,
    pub n_test: usize,
    pub kernels: Vec<KernelRow>,
    pub selected: String,
    pub model_path: PathBuf,
}

/// Splits the database, trains all three kernels and keeps the one with the
/// lowest test MSE.
///
/// Writes `train.csv`, `test.csv`, `kernels.csv`, `evaluation_<kernel>.csv`
/// and `model.txt`.
pub fn train_svr_cmd(cfg: &RunConfig, db_path: &Path) -> Result<TrainSvrSummary> {
    let axes = cfg.axes()?;
    let db = load_csv(db_path, &axes)?;
    let (train, test) = db.split(cfg.svr.n_train, cfg.seed)?;
    let k = cfg.predictor.k;
    let (x_train, y_train) = features(&train, k)?;
    let (x_test, y_test) = features(&test, k)?;
    let dir = out_dir(cfg)?;
    save_csv(&train, &dir.join("train.csv"))?;
    save_csv(&test, &dir.join("test.csv"))?;

    let mut rows = Vec::new();
    let mut models: Vec<SvrModel> = Vec::new();
    for kernel in cfg.kernels()? {
        let model = train_svr(&x_train, &y_train, kernel, cfg.svr_hyper(), cfg.svr.tol)?;
        let report = evaluate_predictor(&model, &test, k)?;
        let path = dir.join(format!("evaluation_{}.csv", kernel.name()));
        write_evaluation(&report, create(&path)?)?;
        rows.push(KernelRow {
            kernel: kernel.name().to_string(),
            svr_mse: mse(&model, &x_test, &y_test)?,
            predictor_mse: report.mse,
            fallback_rate: report.fallback_rate,
            n_sv: model.n_sv(),
            selected: false,
        });
        models.push(model);
    }
    let best = (0..rows.len())
        .reduce(|b, i| if rows[i].svr_mse < rows[b].svr_mse { i } else { b })
        .expect("three kernels");
    rows[best].selected = true;
    write_kernels(&rows, create(&dir.join("kernels.csv"))?)?;
    let model_path = dir.join("model.txt");
    save_model(&models[best], &model_path)?;
    Ok(TrainSvrSummary {
        n_train: train.len(),
        n_test: test.len(),
        selected: rows[best].kernel.clone(),
        kernels: rows,
        model_path,
    })
}

/// Gated prediction for the accuracies of epochs `1..=prefix.len()`.
pub fn predict_cmd(model_path: &Path, prefix: &[f64], fin_epoch: usize) -> Result<PredictionOutcome> {
    let model = load_model(model_path)?;
    Ok(predict_final_accuracy(&model, prefix, fin_epoch)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreSummary {
    pub result: ExplorationResult,
    pub history_path: PathBuf,
    pub report_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Runs the exploration and writes `history.csv`, `report.csv` and `summary.txt`.
pub fn explore_cmd(cfg: &RunConfig, model_path: &Path) -> Result<ExploreSummary> {
    let model = load_model(model_path)?;
    let trainer = cfg.trainer()?;
    let axes = trainer.axes().to_vec();
    let ecfg = cfg.explorer_config(axes.len());
    if model.dim() != ecfg.k {
        return Err(Error::Invalid(format!(
            "model expects {} prefix epochs but predictor.k is {}",
            model.dim(),
            ecfg.k
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let result = explore(&axes, &ecfg, &trainer, &model, &mut rng)?;
    let dir = out_dir(cfg)?;
    let history_path = dir.join("history.csv");
    write_history(&axes, &result.history, create(&history_path)?)?;
    let report_path = dir.join("report.csv");
    write_top(&axes, &result.top, create(&report_path)?)?;
    let summary_path = dir.join("summary.txt");
    let mut text = format!(
        "best={}\nbest_accuracy={:?}\niterations={}\nfailures={}\nconverged={}\n",
        result.best.describe(&axes),
        result.best_accuracy,
        result.history.len(),
        result.failures.len(),
        result.converged.as_ref().map_or("no".to_string(), |s| s.describe(&axes)),
    );
    for (axis, p) in axes.iter().zip(&result.final_probabilities) {
        let probs: Vec<String> = p.iter().map(|v| format!("{v:.4}")).collect();
        text.push_str(&format!("p_{}={}\n", axis.name(), probs.join(" ")));
    }
    fs::write(&summary_path, text).map_err(|e| Error::io(&summary_path, e))?;
    Ok(ExploreSummary {
        result,
        history_path,
        report_path,
        summary_path,
    })
}

/// Evaluates a saved model on every record of a database; writes `evaluation.csv`.
pub fn evaluate_cmd(
    cfg: &RunConfig,
    model_path: &Path,
    db_path: &Path,
) -> Result<(epochcast_core::predictor::EvaluationReport, PathBuf)> {
    let model = load_model(model_path)?;
    let db = load_csv(db_path, &cfg.axes()?)?;
    let report = evaluate_predictor(&model, &db, model.dim())?;
    let path = out_dir(cfg)?.join("evaluation.csv");
    write_evaluation(&report, create(&path)?)?;
    Ok((report, path))
}

/// Renders an evaluation or history CSV as SVG. Without `output`, the chart
/// goes to `<out_dir>/<input stem>.svg`.
pub fn plot_cmd(cfg: &RunConfig, input: &Path, output: Option<&Path>) -> Result<PathBuf> {
    let file = fs::File::open(input).map_err(|e| Error::io(input, e))?;
    let data = read_plot_input(file)?;
    let path = match output {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
            out_dir(cfg)?.join(format!("{stem}.svg"))
        }
    };
    fs::write(&path, svg::render(&data)).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
