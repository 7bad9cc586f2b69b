//! Experiment driver: dataset preparation, staged training, SNR sweeps,
//! baselines, reports and figures.

pub mod plot;

use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};

use cosc_core::config::{ExperimentConfig, Profile};
use cosc_core::dataset::{generate_toy_dataset, load_retrieval_dataset, write_dataset, DatasetSplit, VeriProfile};
use cosc_core::report::{Method, MetricsReport};
use cosc_nn::eval::{evaluate_baselines, evaluate_learned, EvalData, SeedDiagnostics};
use cosc_nn::pipeline::{load_seed, train_seed, SeedModels};
use cosc_nn::train::TrainLog;
use cosc_nn::NnError;
use serde::Serialize;
use thiserror::Error;

/// Environment variable that overrides `dataset_root`.
pub const DATASET_ENV: &str = "COSC_DATASET_ROOT";

/// Toy corpora are generated from this seed unless read from disk.
pub const TOY_DATA_SEED: u64 = 7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cosc_core::Error),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("output directory {0} is locked by another run")]
    Locked(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Nn(e) => e.kind(),
            CliError::Locked(_) => "locked",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
        }
    }

    /// Machine-readable record printed on failure.
    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exclusive ownership of an output directory for the lifetime of a run.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
    _file: File,
}

impl RunLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".lock");
        let file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::AlreadyExists => CliError::Locked(dir.to_path_buf()),
                _ => CliError::Io(e),
            })?;
        Ok(Self { path, _file: file })
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Command-line overrides applied on top of a profile or config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub profile: Option<Profile>,
    pub snr_grid: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
    pub methods: Option<Vec<Method>>,
    pub dataset_root: Option<PathBuf>,
}

pub fn resolve_config(o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match (&o.config, o.profile) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => ExperimentConfig::for_profile(p),
        (None, None) => ExperimentConfig::toy(),
    };
    if let (Some(p), Some(_)) = (o.profile, &o.config) {
        if p != cfg.profile {
            return Err(cosc_core::Error::config("profile", "--profile disagrees with the config file").into());
        }
    }
    if let Some(g) = &o.snr_grid {
        cfg.snr_grid_db = g.clone();
    }
    if let Some(s) = &o.seeds {
        cfg.seeds = s.clone();
    }
    if let Some(d) = &o.out {
        cfg.output_dir = d.clone();
    }
    if let Some(m) = &o.methods {
        cfg.methods = m.clone();
    }
    if let Some(r) = &o.dataset_root {
        cfg.dataset_root = Some(r.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_list<T: std::str::FromStr>(field: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| cosc_core::Error::config(field, format!("cannot parse `{s}`")).into())
        })
        .collect()
}

/// The corpus for a config: read from `dataset_root` when set, otherwise the
/// generated toy corpus. The full profile always needs a corpus on disk.
pub fn load_split(cfg: &ExperimentConfig) -> Result<DatasetSplit> {
    let profile = match cfg.profile {
        Profile::Toy => VeriProfile {
            image_height: cfg.toy.image_size,
            image_width: cfg.toy.image_size,
            ..VeriProfile::toy()
        },
        Profile::Full => VeriProfile::full(),
    };
    let split = match (&cfg.dataset_root, cfg.profile) {
        (Some(root), _) => load_retrieval_dataset(root, &profile)?,
        (None, Profile::Toy) => generate_toy_dataset(&cfg.toy, TOY_DATA_SEED),
        (None, Profile::Full) => {
            return Err(cosc_core::Error::config(
                "dataset_root",
                format!("the full profile needs a corpus; set --dataset-root or {DATASET_ENV}"),
            )
            .into())
        }
    };
    Ok(split)
}

fn snapshot(cfg: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(cfg.output_dir.join("config.toml"), cfg.to_toml()?)?;
    Ok(())
}

pub fn cmd_make_toy_data(cfg: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    let split = generate_toy_dataset(&cfg.toy, TOY_DATA_SEED);
    write_dataset(&split, dir)?;
    Ok(dir.join("manifest.json"))
}

pub fn cmd_train(cfg: &ExperimentConfig, split: &DatasetSplit) -> Result<Vec<(u64, SeedModels, Vec<TrainLog>)>> {
    snapshot(cfg)?;
    cfg.seeds
        .iter()
        .map(|&seed| {
            log::info!("training seed {seed}");
            let (models, logs) = train_seed(cfg, split, seed, &cfg.output_dir)?;
            Ok((seed, models, logs))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub report: MetricsReport,
    pub diagnostics: Vec<SeedDiagnostics>,
}

fn evaluate_models<'a>(
    cfg: &ExperimentConfig,
    split: &DatasetSplit,
    seeds: impl Iterator<Item = (u64, &'a SeedModels)>,
    methods: &[Method],
) -> Result<Evaluation> {
    let data = EvalData::new(split)?;
    let mut report = MetricsReport::default();
    let mut diagnostics = Vec::new();
    let learned = methods.iter().any(|m| m.is_learned());
    for (seed, models) in seeds {
        if learned {
            let (rows, diag) = evaluate_learned(cfg, &data, models, seed, methods)?;
            report.rows.extend(rows);
            diagnostics.push(diag);
        }
        report
            .rows
            .extend(evaluate_baselines(cfg, split, &data, models, seed, methods)?);
    }
    for row in &report.rows {
        row.check_ranges()?;
    }
    Ok(Evaluation { report, diagnostics })
}

fn load_all(cfg: &ExperimentConfig) -> Result<Vec<(u64, SeedModels)>> {
    cfg.seeds
        .iter()
        .map(|&s| Ok((s, load_seed(cfg, s, &cfg.output_dir)?)))
        .collect()
}

pub fn write_evaluation(cfg: &ExperimentConfig, eval: &Evaluation, stem: &str) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    eval.report.write_csv(&cfg.output_dir.join(format!("{stem}.csv")))?;
    eval.report
        .write_summary_json(&cfg.output_dir.join(format!("{stem}_summary.json")))?;
    if !eval.diagnostics.is_empty() {
        fs::write(
            cfg.output_dir.join(format!("{stem}_diagnostics.json")),
            serde_json::to_string_pretty(&eval.diagnostics)?,
        )?;
    }
    Ok(())
}

/// Evaluates stored checkpoints for the configured methods.
pub fn cmd_evaluate(cfg: &ExperimentConfig, split: &DatasetSplit) -> Result<Evaluation> {
    let models = load_all(cfg)?;
    let eval = evaluate_models(cfg, split, models.iter().map(|(s, m)| (*s, m)), &cfg.methods)?;
    write_evaluation(cfg, &eval, "metrics")?;
    Ok(eval)
}

/// Classical baselines only; retrieval reuses each seed's stored encoder.
pub fn cmd_baseline(cfg: &ExperimentConfig, split: &DatasetSplit) -> Result<Evaluation> {
    let methods: Vec<Method> = cfg.methods.iter().copied().filter(|m| !m.is_learned()).collect();
    if methods.is_empty() {
        return Err(cosc_core::Error::config("methods", "no classical baseline selected").into());
    }
    let models = load_all(cfg)?;
    let eval = evaluate_models(cfg, split, models.iter().map(|(s, m)| (*s, m)), &methods)?;
    write_evaluation(cfg, &eval, "baselines")?;
    Ok(eval)
}

pub fn cmd_plot(report: &MetricsReport, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    Ok(plot::write_figures(
        report,
        &cfg.methods,
        &cfg.snr_grid_db,
        &cfg.seeds,
        &cfg.output_dir,
    )?)
}

/// Train, evaluate and plot in one go.
pub fn cmd_all(cfg: &ExperimentConfig, split: &DatasetSplit) -> Result<(Evaluation, Vec<PathBuf>)> {
    let trained = cmd_train(cfg, split)?;
    let eval = evaluate_models(cfg, split, trained.iter().map(|(s, m, _)| (*s, m)), &cfg.methods)?;
    write_evaluation(cfg, &eval, "metrics")?;
    let figures = cmd_plot(&eval.report, cfg)?;
    Ok((eval, figures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_parse_and_reject_garbage() {
        assert_eq!(parse_list::<f64>("snr", "-6, -3,0").unwrap(), vec![-6.0, -3.0, 0.0]);
        assert_eq!(
            parse_list::<Method>("m", "co-sc,dl-s").unwrap(),
            vec![Method::CoSc, Method::DlS]
        );
        let err = parse_list::<u64>("seeds", "1,x").unwrap_err();
        assert_eq!(err.kind(), "config");
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let lock = RunLock::acquire(dir.path()).unwrap();
        assert_eq!(RunLock::acquire(dir.path()).unwrap_err().kind(), "locked");
        drop(lock);
        RunLock::acquire(dir.path()).unwrap();
    }

    #[test]
    fn full_profile_without_corpus_is_a_config_error() {
        let cfg = ExperimentConfig::full();
        assert_eq!(load_split(&cfg).unwrap_err().kind(), "config");
    }

    #[test]
    fn overrides_apply() {
        let o = Overrides {
            snr_grid: Some(vec![0.0, 6.0]),
            seeds: Some(vec![9]),
            ..Default::default()
        };
        let cfg = resolve_config(&o).unwrap();
        assert_eq!(cfg.snr_grid_db, vec![0.0, 6.0]);
        assert_eq!(cfg.seeds, vec![9]);
    }
}
