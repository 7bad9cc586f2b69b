//! Per-seed training schedule and checkpoint layout.
//!
//! ```text
//! seed{s}/stage1.safetensors          encoder + identifier
//! seed{s}/stage2-co-sc.safetensors    cooperative codec after feature-MSE training
//! seed{s}/stage2-dl-s.safetensors     separate codec after feature-MSE training
//! seed{s}/stage3-{variant}.safetensors
//! seed{s}/stage4-co-sc.safetensors    final cooperative system with the gate
//! seed{s}/train_log.json
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use candle_core::DType;
use cosc_core::config::ExperimentConfig;
use cosc_core::dataset::DatasetSplit;

use crate::data::ImageBank;
use crate::model::{ModelConfig, Transceiver, Variant};
use crate::params::{load_checkpoint, save_checkpoint};
use crate::train::{encode_bank, train_stage1, train_stage2, train_stage3, train_stage4, TrainLog};
use crate::{NnError, Result};

pub const TRAIN_DTYPE: DType = DType::F32;

/// Everything evaluation needs from one seed.
pub struct SeedModels {
    /// Stage-2 cooperative model; its encoder and identifier are the stage-1 ones.
    pub coop_stage2: Transceiver,
    pub separate_stage2: Transceiver,
    pub cooperative: Transceiver,
    pub no_fusion: Transceiver,
    pub separate: Transceiver,
}

impl SeedModels {
    pub fn final_model(&self, variant: Variant) -> &Transceiver {
        match variant {
            Variant::Cooperative => &self.cooperative,
            Variant::NoFusion => &self.no_fusion,
            Variant::Separate => &self.separate,
        }
    }

    /// Stage-2 model whose decoder the variant inherits.
    pub fn stage2_model(&self, variant: Variant) -> &Transceiver {
        match variant {
            Variant::Separate => &self.separate_stage2,
            _ => &self.coop_stage2,
        }
    }
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed{seed}"))
}

fn checkpoint(dir: &Path, stage: u8, variant: Variant) -> PathBuf {
    match stage {
        1 => dir.join("stage1.safetensors"),
        _ => dir.join(format!("stage{stage}-{}.safetensors", variant.name())),
    }
}

fn save(dir: &Path, stage: u8, model: &Transceiver) -> Result<()> {
    let stores = if stage == 1 {
        vec![model.encoder.store(), model.identifier.store()]
    } else {
        model.all_stores()
    };
    save_checkpoint(&checkpoint(dir, stage, model.variant), model.config.stamp(), &stores)
}

fn check_frozen(logs: &[TrainLog]) -> Result<()> {
    for log in logs {
        if !log.frozen_constant {
            return Err(NnError::Dependency(format!(
                "stage {} ({}) modified frozen modules",
                log.stage,
                log.variant.name()
            )));
        }
    }
    Ok(())
}

/// Runs stages 1–4 for the cooperative system and the stage-2/3 trainings of
/// both ablations, writing checkpoints under `seed_dir(out, seed)`.
pub fn train_seed(
    cfg: &ExperimentConfig,
    split: &DatasetSplit,
    seed: u64,
    out: &Path,
) -> Result<(SeedModels, Vec<TrainLog>)> {
    let dir = seed_dir(out, seed);
    fs::create_dir_all(&dir)?;
    let mc = ModelConfig::from_experiment(cfg);
    let t = &cfg.training;
    let classes = split.class_map();
    let bank = ImageBank::new(&split.train, split.image_height, split.image_width, split.normalization)?;
    let mut logs = Vec::new();

    let coop2 = Transceiver::new(mc, Variant::Cooperative, seed, TRAIN_DTYPE)?;
    logs.push(train_stage1(&coop2, &bank, &classes, &t.stage1, seed)?);
    save(&dir, 1, &coop2)?;
    let features = encode_bank(&coop2, &bank, t.stage1.batch_size)?;

    logs.push(train_stage2(&coop2, &features, &split.train, &t.stage2, t, seed)?);
    save(&dir, 2, &coop2)?;
    let sep2 = Transceiver::new(mc, Variant::Separate, seed, TRAIN_DTYPE)?;
    sep2.copy_shared_from(&coop2)?;
    logs.push(train_stage2(&sep2, &features, &split.train, &t.stage2, t, seed)?);
    save(&dir, 2, &sep2)?;

    let derive = |variant: Variant, from: &Transceiver| -> Result<Transceiver> {
        let m = Transceiver::new(mc, variant, seed, TRAIN_DTYPE)?;
        m.copy_shared_from(from)?;
        Ok(m)
    };
    let cooperative = derive(Variant::Cooperative, &coop2)?;
    let no_fusion = derive(Variant::NoFusion, &coop2)?;
    let separate = derive(Variant::Separate, &sep2)?;
    for m in [&cooperative, &no_fusion, &separate] {
        logs.push(train_stage3(m, &bank, &classes, &t.stage3, t, seed)?);
        save(&dir, 3, m)?;
    }

    let features = encode_bank(&cooperative, &bank, t.stage4.batch_size)?;
    logs.push(train_stage4(&cooperative, &features, &split.train, &t.stage4, t, seed)?);
    save(&dir, 4, &cooperative)?;

    let json = serde_json::to_string_pretty(&logs)?;
    fs::write(dir.join("train_log.json"), json)?;
    check_frozen(&logs)?;
    Ok((
        SeedModels {
            coop_stage2: coop2,
            separate_stage2: sep2,
            cooperative,
            no_fusion,
            separate,
        },
        logs,
    ))
}

/// Rebuilds a seed's models from the checkpoints written by [`train_seed`].
pub fn load_seed(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<SeedModels> {
    let dir = seed_dir(out, seed);
    let mc = ModelConfig::from_experiment(cfg);
    let stamp = mc.stamp();
    let load = |variant: Variant, stage: u8| -> Result<Transceiver> {
        let m = Transceiver::new(mc, variant, seed, TRAIN_DTYPE)?;
        load_checkpoint(&checkpoint(&dir, stage, variant), stamp, &m.all_stores())?;
        Ok(m)
    };
    Ok(SeedModels {
        coop_stage2: load(Variant::Cooperative, 2)?,
        separate_stage2: load(Variant::Separate, 2)?,
        cooperative: load(Variant::Cooperative, 4)?,
        no_fusion: load(Variant::NoFusion, 3)?,
        separate: load(Variant::Separate, 3)?,
    })
}

pub fn read_train_log(out: &Path, seed: u64) -> Result<Vec<TrainLog>> {
    let path = seed_dir(out, seed).join("train_log.json");
    let text = fs::read_to_string(&path)
        .map_err(|_| NnError::Dependency(format!("missing training log {}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}
