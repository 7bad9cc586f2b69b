//! Declarative experiment configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::ToyConfig;
use crate::report::Method;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Toy,
    Full,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(Profile::Toy),
            "full" => Ok(Profile::Full),
            other => Err(Error::config(
                "profile",
                format!("expected `toy` or `full`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageSettings {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    /// Per-batch training SNR is drawn uniformly from this range.
    pub snr_range_db: [f64; 2],
    /// Share of same-vehicle samples among training pairs.
    pub correlated_fraction: f64,
    pub pairs_per_epoch: usize,
    /// Weight of an auxiliary feature-MSE term in stage 3 (0 disables it).
    pub stage3_mse_weight: f64,
    pub stage1: StageSettings,
    pub stage2: StageSettings,
    pub stage3: StageSettings,
    pub stage4: StageSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub pairs: usize,
    pub correlated_fraction: f64,
    /// Threshold on the same-identity gate output.
    pub gate_threshold: f64,
    /// Use the N>2 generalization (pairwise gates, fuse the largest
    /// mutually-gated subset). With two users it changes nothing.
    pub pairwise_gating: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub jpeg_quality: u8,
    pub ldpc_iterations: usize,
    pub softcast_chunk: usize,
    pub coherence_symbols: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            jpeg_quality: 90,
            ldpc_iterations: 50,
            softcast_chunk: 8,
            coherence_symbols: 324,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub profile: Profile,
    /// Cooperating cameras N.
    pub users: usize,
    /// Receive antennas M.
    pub antennas: usize,
    /// Complex channel symbols per user B.
    pub symbols: usize,
    /// Semantic feature length F.
    pub feature_dim: usize,
    /// Identifier width S (training identities).
    pub identities: usize,
    /// Per-user power budget P.
    pub power: f64,
    pub snr_grid_db: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_root: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub toy: ToyConfig,
    pub training: TrainingConfig,
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub baselines: BaselineConfig,
}

impl ExperimentConfig {
    /// Desk-scale profile: 20 identities, 32×32 glyphs, F=64, B=8.
    pub fn toy() -> Self {
        Self {
            profile: Profile::Toy,
            users: 2,
            antennas: 4,
            symbols: 8,
            feature_dim: 64,
            identities: 20,
            power: 1.0,
            snr_grid_db: vec![-6.0, -3.0, 0.0, 6.0, 12.0, 18.0],
            seeds: vec![1, 2, 3],
            dataset_root: None,
            output_dir: PathBuf::from("runs/toy"),
            methods: Method::ALL.to_vec(),
            toy: ToyConfig::default(),
            training: TrainingConfig {
                snr_range_db: [-6.0, 18.0],
                correlated_fraction: 0.5,
                pairs_per_epoch: 600,
                stage3_mse_weight: 0.0,
                stage1: StageSettings {
                    epochs: 20,
                    learning_rate: 1e-3,
                    batch_size: 32,
                },
                stage2: StageSettings {
                    epochs: 1000,
                    learning_rate: 1e-3,
                    batch_size: 32,
                },
                stage3: StageSettings {
                    epochs: 8,
                    learning_rate: 1e-4,
                    batch_size: 32,
                },
                stage4: StageSettings {
                    epochs: 200,
                    learning_rate: 1e-2,
                    batch_size: 32,
                },
            },
            evaluation: EvaluationConfig {
                pairs: 300,
                correlated_fraction: 0.5,
                gate_threshold: 0.5,
                pairwise_gating: false,
            },
            baselines: BaselineConfig::default(),
        }
    }

    /// VeRi-776 scale: ResNet-50 features (F=2048), B=16, 576 identities.
    pub fn full() -> Self {
        let mut cfg = Self::toy();
        cfg.profile = Profile::Full;
        cfg.symbols = 16;
        cfg.feature_dim = 2048;
        cfg.identities = 576;
        cfg.output_dir = PathBuf::from("runs/full");
        cfg.training.pairs_per_epoch = 20_000;
        cfg.training.stage1 = StageSettings {
            epochs: 60,
            learning_rate: 1e-4,
            batch_size: 64,
        };
        cfg.training.stage2 = StageSettings {
            epochs: 60,
            learning_rate: 1e-3,
            batch_size: 64,
        };
        cfg.training.stage3 = StageSettings {
            epochs: 20,
            learning_rate: 1e-4,
            batch_size: 64,
        };
        cfg.training.stage4 = StageSettings {
            epochs: 20,
            learning_rate: 1e-3,
            batch_size: 64,
        };
        cfg.evaluation.pairs = 2000;
        cfg
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Toy => Self::toy(),
            Profile::Full => Self::full(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate_settings()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Settings and dataset location.
    pub fn validate(&self) -> Result<()> {
        self.validate_settings()?;
        self.validate_dataset()
    }

    /// Everything except the dataset location, which command-line or
    /// environment overrides may still supply.
    pub fn validate_settings(&self) -> Result<()> {
        let positive = |field: &str, v: usize| {
            if v == 0 {
                Err(Error::config(field, "must be at least 1"))
            } else {
                Ok(())
            }
        };
        positive("users", self.users)?;
        positive("symbols", self.symbols)?;
        positive("feature_dim", self.feature_dim)?;
        if self.antennas < self.users {
            return Err(Error::config(
                "antennas",
                "must be at least the number of users for MMSE detection",
            ));
        }
        if self.identities < 2 {
            return Err(Error::config("identities", "need at least 2 identities"));
        }
        if !(self.power > 0.0) {
            return Err(Error::config("power", "must be positive"));
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("snr_grid_db", "needs at least one finite SNR"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "needs at least one seed"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "needs at least one method"));
        }
        let t = &self.training;
        if !(t.snr_range_db[0] <= t.snr_range_db[1]) {
            return Err(Error::config(
                "training.snr_range_db",
                "lower bound exceeds upper bound",
            ));
        }
        if !(0.0..=1.0).contains(&t.correlated_fraction) {
            return Err(Error::config("training.correlated_fraction", "must lie in [0, 1]"));
        }
        positive("training.pairs_per_epoch", t.pairs_per_epoch)?;
        for (name, s) in [
            ("stage1", &t.stage1),
            ("stage2", &t.stage2),
            ("stage3", &t.stage3),
            ("stage4", &t.stage4),
        ] {
            positive(&format!("training.{name}.batch_size"), s.batch_size)?;
            if !(s.learning_rate > 0.0) {
                return Err(Error::config(
                    format!("training.{name}.learning_rate"),
                    "must be positive",
                ));
            }
        }
        let e = &self.evaluation;
        positive("evaluation.pairs", e.pairs)?;
        if !(0.0..=1.0).contains(&e.correlated_fraction) {
            return Err(Error::config("evaluation.correlated_fraction", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&e.gate_threshold) {
            return Err(Error::config("evaluation.gate_threshold", "must lie in [0, 1]"));
        }
        positive("baselines.coherence_symbols", self.baselines.coherence_symbols)?;
        positive("baselines.softcast_chunk", self.baselines.softcast_chunk)?;
        if !(1..=100).contains(&self.baselines.jpeg_quality) {
            return Err(Error::config("baselines.jpeg_quality", "must lie in 1..=100"));
        }
        Ok(())
    }

    pub fn validate_dataset(&self) -> Result<()> {
        if self.profile == Profile::Full && self.dataset_root.is_none() {
            return Err(Error::config(
                "dataset_root",
                "the full profile needs a dataset directory",
            ));
        }
        if let Some(root) = &self.dataset_root {
            if !root.is_dir() {
                return Err(Error::config(
                    "dataset_root",
                    format!("{} does not exist", root.display()),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::toy();
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn defaults_follow_setup() {
        let full = ExperimentConfig::full();
        assert_eq!((full.users, full.antennas, full.symbols, full.power), (2, 4, 16, 1.0));
        assert_eq!(full.feature_dim, 2048);
        assert_eq!(full.identities, 576);
    }

    #[test]
    fn invalid_field_is_named() {
        let mut cfg = ExperimentConfig::toy();
        cfg.antennas = 1;
        match cfg.validate().unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "antennas"),
            e => panic!("{e:?}"),
        }
        let mut cfg = ExperimentConfig::toy();
        cfg.training.stage3.learning_rate = 0.0;
        match cfg.validate().unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "training.stage3.learning_rate"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn missing_dataset_path() {
        let mut cfg = ExperimentConfig::toy();
        cfg.dataset_root = Some(PathBuf::from("/definitely/not/here"));
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
        assert!(ExperimentConfig::full().validate().is_err());
    }
}
