use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use epochcast::commands;
use epochcast::config::RunConfig;

/// Predict final accuracies from early epochs and explore hyper-parameters with it.
#[derive(Parser)]
#[command(name = "epochcast", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampling, splitting, training and exploration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a config value, e.g. `--set svr.c=5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a sample of the grid in full and write database.csv.
    BuildDb {
        #[arg(long)]
        fraction: Option<f64>,
        /// Exact number of settings (instead of a fraction).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Fit linear, polynomial and Gaussian models and keep the best.
    TrainSvr {
        #[arg(long)]
        db: PathBuf,
    },
    /// Predict the final accuracy of one curve prefix.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Defaults to database.fin_epoch.
        #[arg(long)]
        fin_epoch: Option<usize>,
        /// Accuracies of epochs 1..k, space or comma separated.
        #[arg(required = true, value_delimiter = ',', num_args = 1..)]
        prefix: Vec<f64>,
    },
    /// Run the probabilistic exploration driven by predicted rewards.
    Explore {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Evaluate a model against every record of a database.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        db: PathBuf,
    },
    /// Draw an evaluation or history CSV as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(out) = &cli.out {
        overrides.push(format!("out_dir={:?}", out.display().to_string()));
    }
    match &cli.command {
        Command::BuildDb { fraction, count } => {
            if let Some(f) = fraction {
                overrides.push(format!("database.fraction={f:?}"));
            }
            if let Some(n) = count {
                overrides.push(format!("database.count={n}"));
            }
        }
        Command::Explore {
            max_iterations: Some(n),
            ..
        } => overrides.push(format!("explorer.max_iterations={n}")),
        _ => {}
    }
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides).context("invalid configuration")?;

    match cli.command {
        Command::BuildDb { .. } => {
            let s = commands::build_db(&cfg)?;
            println!("grid_size={}", s.grid_size);
            println!("sample_fraction={}", s.fraction);
            println!("sampled={}", s.sampled);
            println!("records={}", s.records);
            println!("skipped={}", s.skipped);
            println!("database={}", s.path.display());
        }
        Command::TrainSvr { db } => {
            let s = commands::train_svr_cmd(&cfg, &db)?;
            println!("split={}/{}", s.n_train, s.n_test);
            println!("{:<12} {:>12} {:>14} {:>9} {:>5}", "kernel", "svr_mse", "predictor_mse", "fallback", "n_sv");
            for r in &s.kernels {
                println!(
                    "{:<12} {:>12.6} {:>14.6} {:>9.3} {:>5}{}",
                    r.kernel,
                    r.svr_mse,
                    r.predictor_mse,
                    r.fallback_rate,
                    r.n_sv,
                    if r.selected { "  *" } else { "" }
                );
            }
            println!("selected={}", s.selected);
            println!("model={}", s.model_path.display());
        }
        Command::Predict {
            model,
            fin_epoch,
            prefix,
        } => {
            let out = commands::predict_cmd(&model, &prefix, fin_epoch.unwrap_or(cfg.database.fin_epoch))?;
            println!("value={:?}", out.value);
            println!("source={}", out.source.as_str());
            println!("svr_raw={:?}", out.svr_raw);
            if let Some(fit) = out.fit {
                println!("alpha={:?}", fit.alpha);
                println!("beta={:?}", fit.beta);
            }
        }
        Command::Explore { model, .. } => {
            let s = commands::explore_cmd(&cfg, &model)?;
            print!(
                "{}",
                std::fs::read_to_string(&s.summary_path).with_context(|| s.summary_path.display().to_string())?
            );
            println!("history={}", s.history_path.display());
            println!("report={}", s.report_path.display());
        }
        Command::Evaluate { model, db } => {
            let (report, path) = commands::evaluate_cmd(&cfg, &model, &db)?;
            println!("records={}", report.rows.len());
            println!("mse={:?}", report.mse);
            println!("fallback_rate={:?}", report.fallback_rate);
            println!("evaluation={}", path.display());
        }
        Command::Plot { input, output } => {
            let path = commands::plot_cmd(&cfg, &input, output.as_deref())?;
            println!("svg={}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
