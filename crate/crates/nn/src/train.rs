//! The four training stages and their freezing bookkeeping.

use std::collections::{BTreeMap, BTreeSet};

use candle_core::{DType, Device, Tensor, Var};
use candle_nn::{AdamW, Optimizer, ParamsAdamW};
use cosc_core::config::{StageSettings, TrainingConfig};
use cosc_core::dataset::{build_pairs, MultiViewSample, Record};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::ImageBank;
use crate::link::LinkBatch;
use crate::model::{Transceiver, Variant};
use crate::params::ParamStore;
use crate::{NnError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    /// Stage-specific progress figure (accuracy or validation MSE).
    pub metric: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub stage: u8,
    pub variant: Variant,
    pub trainable: Vec<String>,
    pub frozen: Vec<String>,
    pub metric_name: String,
    /// Metric before the first update.
    pub initial_metric: Option<f64>,
    pub epochs: Vec<EpochRecord>,
    pub checksums_before: BTreeMap<String, String>,
    pub checksums_after: BTreeMap<String, String>,
    /// Every frozen module kept its checksum after every epoch.
    pub frozen_constant: bool,
}

impl TrainLog {
    pub fn final_metric(&self) -> Option<f64> {
        self.epochs.last().and_then(|e| e.metric)
    }

    pub fn changed_modules(&self) -> Vec<String> {
        self.checksums_before
            .iter()
            .filter(|(k, v)| self.checksums_after.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .collect()
    }
}

/// Tracks which modules a stage may touch and verifies the rest stay put.
struct Freezer {
    trainable: BTreeSet<String>,
    frozen_sums: BTreeMap<String, String>,
    before: BTreeMap<String, String>,
    constant: bool,
}

impl Freezer {
    fn new(model: &Transceiver, trainable: &[&ParamStore]) -> Result<Self> {
        let trainable: BTreeSet<String> = trainable.iter().map(|s| s.name().to_string()).collect();
        let before = model.checksums()?;
        let frozen_sums = before
            .iter()
            .filter(|(k, _)| !trainable.contains(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(Self {
            trainable,
            frozen_sums,
            before,
            constant: true,
        })
    }

    fn check(&mut self, model: &Transceiver) -> Result<()> {
        let now = model.checksums()?;
        for (k, v) in &self.frozen_sums {
            if now.get(k) != Some(v) {
                log::error!("frozen module {k} changed");
                self.constant = false;
            }
        }
        Ok(())
    }

    fn finish(
        self,
        model: &Transceiver,
        stage: u8,
        metric_name: &str,
        initial: Option<f64>,
        epochs: Vec<EpochRecord>,
    ) -> Result<TrainLog> {
        Ok(TrainLog {
            stage,
            variant: model.variant,
            trainable: self.trainable.iter().cloned().collect(),
            frozen: self.frozen_sums.keys().cloned().collect(),
            metric_name: metric_name.to_string(),
            initial_metric: initial,
            epochs,
            checksums_before: self.before,
            checksums_after: model.checksums()?,
            frozen_constant: self.constant,
        })
    }
}

fn optimizer(stores: &[&ParamStore], settings: &StageSettings) -> Result<AdamW> {
    let vars: Vec<Var> = stores.iter().flat_map(|s| s.vars()).collect();
    Ok(AdamW::new(
        vars,
        ParamsAdamW {
            lr: settings.learning_rate,
            weight_decay: 0.0,
            ..Default::default()
        },
    )?)
}

/// Cosine decay from the base rate to a tenth of it over the stage.
fn schedule(opt: &mut AdamW, settings: &StageSettings, epoch: usize) {
    let progress = epoch as f64 / settings.epochs.max(1) as f64;
    let factor = 0.1 + 0.45 * (1.0 + (std::f64::consts::PI * progress).cos());
    opt.set_learning_rate(settings.learning_rate * factor);
}

fn scalar(t: &Tensor) -> Result<f64> {
    Ok(t.to_dtype(DType::F64)?.to_scalar::<f64>()?)
}

fn guarded(loss: &Tensor, stage: &str, step: usize) -> Result<f64> {
    let v = scalar(loss)?;
    if !v.is_finite() {
        return Err(NnError::NonFinite {
            stage: stage.to_string(),
            step,
            value: v,
        });
    }
    Ok(v)
}

fn labels_tensor(labels: &[u32]) -> Result<Tensor> {
    Ok(Tensor::from_vec(labels.to_vec(), labels.len(), &Device::Cpu)?)
}

/// Mean binary cross-entropy of `sigmoid(logits)` against `targets`.
pub fn bce_with_logits(logits: &Tensor, targets: &Tensor) -> Result<Tensor> {
    // max(z, 0) - z·y + log(1 + exp(-|z|))
    let pos = logits.relu()?;
    let soft = (logits.abs()?.neg()?.exp()? + 1.0)?.log()?;
    Ok(((pos - (logits * targets)?)? + soft)?.mean_all()?)
}

pub fn mse(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    Ok((a - b)?.sqr()?.mean_all()?)
}

/// Class index of every record; records whose identity is unknown are rejected.
pub fn class_labels(records: &[Record], classes: &BTreeMap<u32, usize>) -> Result<Vec<u32>> {
    records
        .iter()
        .map(|r| {
            classes
                .get(&r.identity)
                .map(|&c| c as u32)
                .ok_or_else(|| NnError::shape(format!("identity {} is not a training class", r.identity)))
        })
        .collect()
}

fn check_identities(classes: &BTreeMap<u32, usize>, model: &Transceiver) -> Result<()> {
    if classes.len() < 2 {
        return Err(cosc_core::Error::config("dataset.train", "stage 1 needs at least 2 identities").into());
    }
    if classes.len() != model.config.identities {
        return Err(cosc_core::Error::config(
            "identities",
            format!(
                "identifier has {} outputs but the training split has {} identities",
                model.config.identities,
                classes.len()
            ),
        )
        .into());
    }
    Ok(())
}

/// Stage 1: semantic encoder and identifier with identity cross-entropy.
pub fn train_stage1(
    model: &Transceiver,
    bank: &ImageBank,
    classes: &BTreeMap<u32, usize>,
    settings: &StageSettings,
    seed: u64,
) -> Result<TrainLog> {
    check_identities(classes, model)?;
    let labels = class_labels(bank.records(), classes)?;
    let trainable = [model.encoder.store(), model.identifier.store()];
    let mut freezer = Freezer::new(model, &trainable)?;
    let mut opt = optimizer(&trainable, settings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5747_0001);
    let dtype = model.dtype();
    let mut order: Vec<usize> = (0..bank.len()).collect();
    let mut epochs = Vec::new();
    let mut step = 0;
    for epoch in 0..settings.epochs {
        schedule(&mut opt, settings, epoch);
        order.shuffle(&mut rng);
        let (mut total, mut correct, mut seen) = (0.0, 0usize, 0usize);
        for chunk in order.chunks(settings.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            let images = bank.batch(chunk, dtype)?;
            let y: Vec<u32> = chunk.iter().map(|&i| labels[i]).collect();
            let logits = model.identifier.logits(&model.encoder.forward(&images, true)?)?;
            let loss = candle_nn::loss::cross_entropy(&logits, &labels_tensor(&y)?)?;
            let v = guarded(&loss, "stage1", step)?;
            opt.backward_step(&loss)?;
            step += 1;
            let pred = logits.argmax(1)?.to_vec1::<u32>()?;
            correct += pred.iter().zip(&y).filter(|(a, b)| a == b).count();
            seen += chunk.len();
            total += v * chunk.len() as f64;
        }
        freezer.check(model)?;
        let rec = EpochRecord {
            epoch,
            loss: total / seen.max(1) as f64,
            metric: Some(correct as f64 / seen.max(1) as f64),
        };
        log::info!(
            "stage1 epoch {epoch}: loss {:.4} acc {:.3}",
            rec.loss,
            rec.metric.unwrap_or(0.0)
        );
        epochs.push(rec);
    }
    freezer.finish(model, 1, "train_accuracy", None, epochs)
}

/// Clean features of every record, `(n, F)`, in inference mode.
pub fn encode_bank(model: &Transceiver, bank: &ImageBank, batch: usize) -> Result<Tensor> {
    let mut parts = Vec::new();
    let idx: Vec<usize> = (0..bank.len()).collect();
    for chunk in idx.chunks(batch.max(1)) {
        parts.push(
            model
                .encoder
                .forward(&bank.batch(chunk, model.dtype())?, false)?
                .detach(),
        );
    }
    Ok(Tensor::cat(&parts, 0)?)
}

fn member_features(features: &Tensor, pairs: &[&MultiViewSample], user: usize) -> Result<Tensor> {
    let idx: Vec<u32> = pairs.iter().map(|p| p.members[user] as u32).collect();
    Ok(features.index_select(&Tensor::from_vec(idx, pairs.len(), &Device::Cpu)?, 0)?)
}

fn uniform_snr<R: Rng + ?Sized>(range: [f64; 2], rng: &mut R) -> f64 {
    if range[1] > range[0] {
        rng.random_range(range[0]..=range[1])
    } else {
        range[0]
    }
}

/// Feature-recovery MSE over fixed pairs and channel draws.
pub fn recovery_mse(
    model: &Transceiver,
    features: &Tensor,
    pairs: &[MultiViewSample],
    links: &LinkBatch,
) -> Result<f64> {
    let refs: Vec<&MultiViewSample> = pairs.iter().collect();
    let g: Vec<Tensor> = (0..model.config.users)
        .map(|u| member_features(features, &refs, u))
        .collect::<Result<_>>()?;
    let rec = model.transmit(&g, links, false)?;
    scalar(&mse(&Tensor::cat(&rec, 1)?, &Tensor::cat(&g, 1)?)?)
}

/// Stage 2: JSC encoders and decoder(s) minimise feature MSE through the
/// channel; the semantic encoder is frozen and its features precomputed.
pub fn train_stage2(
    model: &Transceiver,
    features: &Tensor,
    records: &[Record],
    settings: &StageSettings,
    training: &TrainingConfig,
    seed: u64,
) -> Result<TrainLog> {
    let mut trainable = model.jsc_stores();
    trainable.extend(model.decoder.stores());
    let mut freezer = Freezer::new(model, &trainable)?;
    let mut opt = optimizer(&trainable, settings)?;
    let c = model.config;
    let dtype = model.dtype();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5747_0002);

    let mut vrng = ChaCha8Rng::seed_from_u64(seed ^ 0x7A11_0002);
    let val_pairs = build_pairs(records, c.users, 200, training.correlated_fraction, &mut vrng)?.samples;
    let val_links = LinkBatch::draw(
        &vec![0.0; val_pairs.len()],
        c.users,
        c.antennas,
        c.symbols,
        c.power,
        dtype,
        &mut vrng,
    )?;
    let initial = recovery_mse(model, features, &val_pairs, &val_links)?;
    log::info!(
        "stage2 {}: initial 0 dB validation MSE {initial:.5}",
        model.variant.name()
    );

    let mut epochs = Vec::new();
    let mut step = 0;
    for epoch in 0..settings.epochs {
        schedule(&mut opt, settings, epoch);
        let pairs = build_pairs(
            records,
            c.users,
            training.pairs_per_epoch,
            training.correlated_fraction,
            &mut rng,
        )?;
        let mut total = 0.0;
        let mut n = 0;
        for chunk in pairs.samples.chunks(settings.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            let refs: Vec<&MultiViewSample> = chunk.iter().collect();
            let g: Vec<Tensor> = (0..c.users)
                .map(|u| member_features(features, &refs, u))
                .collect::<Result<_>>()?;
            let snr = uniform_snr(training.snr_range_db, &mut rng);
            let link = LinkBatch::draw(
                &vec![snr; chunk.len()],
                c.users,
                c.antennas,
                c.symbols,
                c.power,
                dtype,
                &mut rng,
            )?;
            let rec = model.transmit(&g, &link, true)?;
            let loss = mse(&Tensor::cat(&rec, 1)?, &Tensor::cat(&g, 1)?)?;
            total += guarded(&loss, "stage2", step)? * chunk.len() as f64;
            n += chunk.len();
            opt.backward_step(&loss)?;
            step += 1;
        }
        freezer.check(model)?;
        let val = recovery_mse(model, features, &val_pairs, &val_links)?;
        log::info!(
            "stage2 {} epoch {epoch}: loss {:.5} val@0dB {val:.5}",
            model.variant.name(),
            total / n.max(1) as f64
        );
        epochs.push(EpochRecord {
            epoch,
            loss: total / n.max(1) as f64,
            metric: Some(val),
        });
    }
    freezer.finish(model, 2, "validation_mse_0db", Some(initial), epochs)
}

/// One stage-3 mini-batch.
pub struct JointBatch {
    /// `(k·N, 3, H, W)`, user-major within each sample: sample 0 user 0, sample 0 user 1, ...
    pub images: Tensor,
    /// Class index per sample and user.
    pub labels: Vec<Vec<u32>>,
    pub correlated: Vec<bool>,
}

/// Stage-3 objective: identity cross-entropy on every recovered feature,
/// plus on the fused feature of correlated samples when the model fuses.
pub fn stage3_loss(
    model: &Transceiver,
    batch: &JointBatch,
    link: &LinkBatch,
    mse_weight: f64,
    train: bool,
) -> Result<Tensor> {
    let n = model.config.users;
    let k = batch.labels.len();
    let g = model.encoder.forward(&batch.images, train)?;
    let f = g.dim(1)?;
    let g = g.reshape((k, n, f))?;
    let per_user: Vec<Tensor> = (0..n)
        .map(|u| Ok(g.narrow(1, u, 1)?.squeeze(1)?.contiguous()?))
        .collect::<Result<_>>()?;
    let rec = model.transmit(&per_user, link, train)?;
    let mut loss = Tensor::zeros((), model.dtype(), &Device::Cpu)?;
    for (u, r) in rec.iter().enumerate() {
        let y: Vec<u32> = batch.labels.iter().map(|l| l[u]).collect();
        let ce = candle_nn::loss::cross_entropy(&model.identifier.logits(r)?, &labels_tensor(&y)?)?;
        loss = (loss + ce)?;
    }
    if let Some(fusion) = &model.fusion {
        let rows: Vec<u32> = (0..k as u32).filter(|&i| batch.correlated[i as usize]).collect();
        if !rows.is_empty() {
            let idx = Tensor::from_vec(rows.clone(), rows.len(), &Device::Cpu)?;
            let picked: Vec<Tensor> = rec
                .iter()
                .map(|r| Ok(r.index_select(&idx, 0)?))
                .collect::<Result<_>>()?;
            let fused = fusion.forward(&picked)?;
            let y: Vec<u32> = rows.iter().map(|&i| batch.labels[i as usize][0]).collect();
            let ce = candle_nn::loss::cross_entropy(&model.identifier.logits(&fused)?, &labels_tensor(&y)?)?;
            loss = (loss + ce)?;
        }
    }
    if mse_weight > 0.0 {
        let target = Tensor::cat(&per_user, 1)?.detach();
        loss = (loss + (mse(&Tensor::cat(&rec, 1)?, &target)? * mse_weight)?)?;
    }
    Ok(loss)
}

pub fn joint_batch(bank: &ImageBank, samples: &[MultiViewSample], labels: &[u32], dtype: DType) -> Result<JointBatch> {
    let idx: Vec<usize> = samples.iter().flat_map(|s| s.members.iter().copied()).collect();
    Ok(JointBatch {
        images: bank.batch(&idx, dtype)?,
        labels: samples
            .iter()
            .map(|s| s.members.iter().map(|&m| labels[m]).collect())
            .collect(),
        correlated: samples.iter().map(|s| s.correlated).collect(),
    })
}

/// Stage 3: everything except the gate trained end to end through the channel.
pub fn train_stage3(
    model: &Transceiver,
    bank: &ImageBank,
    classes: &BTreeMap<u32, usize>,
    settings: &StageSettings,
    training: &TrainingConfig,
    seed: u64,
) -> Result<TrainLog> {
    check_identities(classes, model)?;
    let labels = class_labels(bank.records(), classes)?;
    let mut trainable = vec![model.encoder.store(), model.identifier.store()];
    trainable.extend(model.jsc_stores());
    trainable.extend(model.decoder.stores());
    trainable.extend(model.fusion.as_ref().map(|f| f.store()));
    let mut freezer = Freezer::new(model, &trainable)?;
    let mut opt = optimizer(&trainable, settings)?;
    let c = model.config;
    let dtype = model.dtype();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5747_0003);
    let mut epochs = Vec::new();
    let mut step = 0;
    for epoch in 0..settings.epochs {
        schedule(&mut opt, settings, epoch);
        let pairs = build_pairs(
            bank.records(),
            c.users,
            training.pairs_per_epoch,
            training.correlated_fraction,
            &mut rng,
        )?;
        let (mut total, mut n) = (0.0, 0);
        for chunk in pairs.samples.chunks(settings.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            let batch = joint_batch(bank, chunk, &labels, dtype)?;
            let snr = uniform_snr(training.snr_range_db, &mut rng);
            let link = LinkBatch::draw(
                &vec![snr; chunk.len()],
                c.users,
                c.antennas,
                c.symbols,
                c.power,
                dtype,
                &mut rng,
            )?;
            let loss = stage3_loss(model, &batch, &link, training.stage3_mse_weight, true)?;
            total += guarded(&loss, "stage3", step)? * chunk.len() as f64;
            n += chunk.len();
            opt.backward_step(&loss)?;
            step += 1;
        }
        freezer.check(model)?;
        log::info!(
            "stage3 {} epoch {epoch}: loss {:.4}",
            model.variant.name(),
            total / n.max(1) as f64
        );
        epochs.push(EpochRecord {
            epoch,
            loss: total / n.max(1) as f64,
            metric: None,
        });
    }
    freezer.finish(model, 3, "none", None, epochs)
}

/// Recovered feature pairs and same-identity labels for gate training or scoring.
pub fn gate_inputs<R: Rng + ?Sized>(
    model: &Transceiver,
    features: &Tensor,
    pairs: &[MultiViewSample],
    snr_db: &[f64],
    rng: &mut R,
) -> Result<(Tensor, Tensor, Tensor)> {
    let c = model.config;
    let refs: Vec<&MultiViewSample> = pairs.iter().collect();
    let g: Vec<Tensor> = (0..c.users)
        .map(|u| member_features(features, &refs, u))
        .collect::<Result<_>>()?;
    let link = LinkBatch::draw(snr_db, c.users, c.antennas, c.symbols, c.power, model.dtype(), rng)?;
    let rec = model.transmit(&g, &link, false)?;
    let targets: Vec<f64> = pairs
        .iter()
        .flat_map(|p| {
            let same = f64::from(p.gate_label());
            [1.0 - same, same]
        })
        .collect();
    let targets = Tensor::from_vec(targets, (pairs.len(), 2), &Device::Cpu)?.to_dtype(model.dtype())?;
    Ok((rec[0].detach(), rec[1].detach(), targets))
}

/// Stage 4: only the gate, on features recovered by the frozen backbone.
pub fn train_stage4(
    model: &Transceiver,
    features: &Tensor,
    records: &[Record],
    settings: &StageSettings,
    training: &TrainingConfig,
    seed: u64,
) -> Result<TrainLog> {
    let gate = model
        .gate
        .as_ref()
        .ok_or_else(|| NnError::Dependency(format!("variant {} has no gating module", model.variant.name())))?;
    if model.config.users != 2 {
        return Err(NnError::shape("gate training is defined for pairs of users"));
    }
    let trainable = [gate.store()];
    let mut freezer = Freezer::new(model, &trainable)?;
    let mut opt = optimizer(&trainable, settings)?;
    let c = model.config;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5747_0004);
    let mut epochs = Vec::new();
    let mut step = 0;
    for epoch in 0..settings.epochs {
        schedule(&mut opt, settings, epoch);
        let pairs = build_pairs(records, c.users, training.pairs_per_epoch, 0.5, &mut rng)?;
        let correlated = pairs.correlated_count() as f64 / pairs.samples.len().max(1) as f64;
        if !(0.1..=0.9).contains(&correlated) {
            log::warn!("stage4 epoch {epoch}: unbalanced pairs ({correlated:.2} correlated)");
        }
        let (mut total, mut n, mut correct) = (0.0, 0, 0);
        for chunk in pairs.samples.chunks(settings.batch_size) {
            let snr = uniform_snr(training.snr_range_db, &mut rng);
            let (a, b, t) = gate_inputs(model, features, chunk, &vec![snr; chunk.len()], &mut rng)?;
            let logits = gate.logits(&a, &b)?;
            let loss = bce_with_logits(&logits, &t)?;
            total += guarded(&loss, "stage4", step)? * chunk.len() as f64;
            n += chunk.len();
            let decisions = gate.decide(&a, &b, 0.5)?;
            correct += decisions
                .iter()
                .zip(chunk)
                .filter(|(d, p)| f32::from(d.phi) == p.gate_label())
                .count();
            opt.backward_step(&loss)?;
            step += 1;
        }
        freezer.check(model)?;
        let acc = correct as f64 / n.max(1) as f64;
        log::info!("stage4 epoch {epoch}: loss {:.4} acc {acc:.3}", total / n.max(1) as f64);
        epochs.push(EpochRecord {
            epoch,
            loss: total / n.max(1) as f64,
            metric: Some(acc),
        });
    }
    freezer.finish(model, 4, "train_gate_accuracy", None, epochs)
}

/// Gate accuracy on balanced pairs drawn from `records`, one channel draw per pair.
pub fn gate_accuracy(
    model: &Transceiver,
    features: &Tensor,
    records: &[Record],
    pairs: usize,
    snr_db: &[f64],
    threshold: f64,
    seed: u64,
) -> Result<f64> {
    let gate = model
        .gate
        .as_ref()
        .ok_or_else(|| NnError::Dependency("no gating module".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6A7E);
    let mut correct = 0;
    let mut total = 0;
    for &snr in snr_db {
        let set = build_pairs(records, model.config.users, pairs, 0.5, &mut rng)?;
        let (a, b, _) = gate_inputs(model, features, &set.samples, &vec![snr; set.samples.len()], &mut rng)?;
        let d = gate.decide(&a, &b, threshold)?;
        correct += d
            .iter()
            .zip(&set.samples)
            .filter(|(d, p)| f32::from(d.phi) == p.gate_label())
            .count();
        total += set.samples.len();
    }
    Ok(correct as f64 / total.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bce_matches_direct_formula() {
        let z = Tensor::new(&[[0.3f64, -2.0], [4.0, 0.0]], &Device::Cpu).unwrap();
        let y = Tensor::new(&[[1.0f64, 0.0], [0.0, 1.0]], &Device::Cpu).unwrap();
        let got = scalar(&bce_with_logits(&z, &y).unwrap()).unwrap();
        let s = |x: f64| 1.0 / (1.0 + (-x).exp());
        let want = -((s(0.3)).ln() + (1.0 - s(-2.0)).ln() + (1.0 - s(4.0)).ln() + s(0.0).ln()) / 4.0;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn perfect_prediction_has_near_zero_cross_entropy() {
        let logits = Tensor::new(&[[50.0f64, 0.0, 0.0], [0.0, 0.0, 50.0]], &Device::Cpu).unwrap();
        let y = labels_tensor(&[0, 2]).unwrap();
        let ce = scalar(&candle_nn::loss::cross_entropy(&logits, &y).unwrap()).unwrap();
        assert!(ce < 1e-12);
    }

    #[test]
    fn identical_features_have_zero_mse() {
        let a = Tensor::randn(0f64, 1.0, (3, 8), &Device::Cpu).unwrap();
        assert_eq!(scalar(&mse(&a, &a).unwrap()).unwrap(), 0.0);
    }
}
