use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cosc_cli::{
    cmd_all, cmd_baseline, cmd_evaluate, cmd_make_toy_data, cmd_plot, cmd_train, load_split, parse_list,
    resolve_config, CliError, Overrides, RunLock, DATASET_ENV,
};
use cosc_core::config::{ExperimentConfig, Profile};
use cosc_core::report::{Method, MetricsReport};

#[derive(Parser)]
#[command(name = "cosc", version, about = "Cooperative semantic transmission experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every stage and ablation for each seed.
    Train(Common),
    /// Evaluate stored checkpoints over the SNR grid.
    Evaluate(Common),
    /// Run only the classical baselines.
    Baseline(Common),
    /// Write the procedural toy corpus to disk.
    MakeToyData {
        #[command(flatten)]
        common: Common,
        /// Target directory (defaults to <out>/toy-data).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Draw figures from a metrics CSV.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Report to plot (defaults to <out>/metrics.csv).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Train, evaluate and plot.
    All(Common),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    profile: Option<String>,
    /// Comma-separated SNRs in dB, e.g. "-6,-3,0,6,12,18".
    #[arg(long, allow_hyphen_values = true)]
    snr_grid: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of co-sc, co-sc-no-fusion, dl-s, jpeg-ldpc-bpsk, softcast.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, env = DATASET_ENV)]
    dataset_root: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let o = Overrides {
            config: self.config.clone(),
            profile: self.profile.as_deref().map(str::parse::<Profile>).transpose()?,
            snr_grid: self
                .snr_grid
                .as_deref()
                .map(|s| parse_list("snr_grid_db", s))
                .transpose()?,
            seeds: self.seeds.as_deref().map(|s| parse_list("seeds", s)).transpose()?,
            out: self.out.clone(),
            methods: self
                .method
                .as_deref()
                .map(|s| parse_list::<Method>("methods", s))
                .transpose()?,
            dataset_root: self.dataset_root.clone(),
        };
        resolve_config(&o)
    }
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    match cli.command {
        Command::Train(c) => {
            let cfg = c.resolve()?;
            let _lock = RunLock::acquire(&cfg.output_dir)?;
            let split = load_split(&cfg)?;
            let trained = cmd_train(&cfg, &split)?;
            Ok(serde_json::json!({ "trained_seeds": trained.iter().map(|t| t.0).collect::<Vec<_>>() }))
        }
        Command::Evaluate(c) => {
            let cfg = c.resolve()?;
            let _lock = RunLock::acquire(&cfg.output_dir)?;
            let eval = cmd_evaluate(&cfg, &load_split(&cfg)?)?;
            Ok(serde_json::to_value(eval.report.summary())?)
        }
        Command::Baseline(c) => {
            let cfg = c.resolve()?;
            let _lock = RunLock::acquire(&cfg.output_dir)?;
            let eval = cmd_baseline(&cfg, &load_split(&cfg)?)?;
            Ok(serde_json::to_value(eval.report.summary())?)
        }
        Command::MakeToyData { common, dir } => {
            let cfg = common.resolve()?;
            let dir = dir.unwrap_or_else(|| cfg.output_dir.join("toy-data"));
            let manifest = cmd_make_toy_data(&cfg, &dir)?;
            Ok(serde_json::json!({ "manifest": manifest }))
        }
        Command::Plot { common, report } => {
            let cfg = common.resolve()?;
            let path = report.unwrap_or_else(|| cfg.output_dir.join("metrics.csv"));
            let report = MetricsReport::read_csv(&path)?;
            let files = cmd_plot(&report, &cfg)?;
            Ok(serde_json::json!({ "figures": files }))
        }
        Command::All(c) => {
            let cfg = c.resolve()?;
            let _lock = RunLock::acquire(&cfg.output_dir)?;
            let split = load_split(&cfg)?;
            let (eval, files) = cmd_all(&cfg, &split)?;
            Ok(serde_json::json!({ "summary": eval.report.summary(), "figures": files }))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(match e.kind() {
                "config" => 2,
                "dependency" => 3,
                _ => 1,
            })
        }
    }
}
