//! SNR-sweep evaluation of the learned variants and the classical baselines.

use candle_core::{DType, Device, Tensor};
use cosc_core::baselines::{digital_pipeline, softcast_pipeline, DigitalConfig, LdpcCode, LinkConfig, SoftCastConfig};
use cosc_core::config::ExperimentConfig;
use cosc_core::dataset::{build_pairs, DatasetSplit, MultiViewSample, Record};
use cosc_core::report::{Method, MetricsRow};
use cosc_core::retrieval::{mean_average_precision, rank_n_accuracy, retrieve, Query, RankedList, RetrievalIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::ImageBank;
use crate::link::LinkBatch;
use crate::model::{Transceiver, Variant};
use crate::pipeline::SeedModels;
use crate::train::{encode_bank, gate_accuracy, recovery_mse};
use crate::{NnError, Result};

const EVAL_BATCH: usize = 64;

/// Query and gallery images shared by every seed.
pub struct EvalData {
    pub query: ImageBank,
    pub gallery: ImageBank,
}

impl EvalData {
    pub fn new(split: &DatasetSplit) -> Result<Self> {
        let (h, w, n) = (split.image_height, split.image_width, split.normalization);
        Ok(Self {
            query: ImageBank::new(&split.query, h, w, n)?,
            gallery: ImageBank::new(&split.gallery, h, w, n)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedDiagnostics {
    pub seed: u64,
    /// Gate accuracy on balanced held-out pairs, pooled over the SNR grid.
    pub gate_accuracy: f64,
    /// Gate decision for two identical features.
    pub identical_phi: u8,
    pub fused_queries: usize,
}

fn rows(t: &Tensor) -> Result<Vec<Vec<f64>>> {
    Ok(t.to_dtype(DType::F64)?.to_vec2::<f64>()?)
}

fn gallery_index(model: &Transceiver, bank: &ImageBank) -> Result<RetrievalIndex> {
    let feats = rows(&encode_bank(model, bank, EVAL_BATCH)?)?;
    let ids = bank.records().iter().map(|r| r.identity).collect();
    let cams = bank.records().iter().map(|r| r.camera).collect();
    Ok(RetrievalIndex::from_rows(&feats, ids, cams)?)
}

fn member_rows(features: &Tensor, pairs: &[MultiViewSample], user: usize) -> Result<Tensor> {
    let idx: Vec<u32> = pairs.iter().map(|p| p.members[user] as u32).collect();
    Ok(features.index_select(&Tensor::from_vec(idx, pairs.len(), &Device::Cpu)?, 0)?)
}

fn score(method: Method, snr_db: f64, seed: u64, lists: &[RankedList]) -> MetricsRow {
    let map = mean_average_precision(lists);
    if map.skipped > 0 {
        log::warn!(
            "{method} at {snr_db} dB: {} queries without relevant gallery items",
            map.skipped
        );
    }
    MetricsRow {
        method,
        snr_db,
        seed,
        rank1: rank_n_accuracy(lists, 1),
        rank5: rank_n_accuracy(lists, 5),
        map: map.map,
        feature_mse: None,
        symbol_count: 0.0,
        decode_failure_rate: None,
        queries: lists.len(),
    }
}

fn single_query(feature: &[f64], pair: &MultiViewSample, user: usize) -> Query {
    Query {
        feature: feature.to_vec(),
        identity: pair.identities[user],
        cameras: vec![pair.cameras[user]],
    }
}

/// Largest set of users whose pairwise gate decisions are all φ = 1.
fn largest_agreeing_set(users: usize, same: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut best = vec![0];
    for mask in 1u32..(1 << users) {
        let set: Vec<usize> = (0..users).filter(|u| mask & (1 << u) != 0).collect();
        if set.len() > best.len()
            && set
                .iter()
                .enumerate()
                .all(|(i, &a)| set[i + 1..].iter().all(|&b| same(a, b)))
        {
            best = set;
        }
    }
    best
}

/// Queries issued by the cooperative system for each sample, with the gate
/// deciding which recovered features are fused.
fn cooperative_queries(
    model: &Transceiver,
    recovered: &[Tensor],
    pairs: &[MultiViewSample],
    threshold: f64,
    pairwise: bool,
) -> Result<(Vec<Query>, usize)> {
    let (fusion, gate) = match (&model.fusion, &model.gate) {
        (Some(f), Some(g)) => (f, g),
        _ => return Err(NnError::Dependency("cooperative model lacks fusion or gate".into())),
    };
    let n = recovered.len();
    if n > 2 && !pairwise {
        return Err(
            cosc_core::Error::config("evaluation.pairwise_gating", "more than two users need pairwise gating").into(),
        );
    }
    let per_user: Vec<Vec<Vec<f64>>> = recovered.iter().map(rows).collect::<Result<_>>()?;
    let fused_all = rows(&fusion.forward(recovered)?)?;
    let mut decisions = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            decisions[a][b] = gate.decide(&recovered[a], &recovered[b], threshold)?;
        }
    }
    let mut queries = Vec::new();
    let mut fused = 0;
    for (k, pair) in pairs.iter().enumerate() {
        let set = largest_agreeing_set(n, |a, b| decisions[a][b][k].phi == 1);
        if set.len() < 2 {
            queries.extend((0..n).map(|u| single_query(&per_user[u][k], pair, u)));
            continue;
        }
        fused += 1;
        let feature: Vec<f64> = if set.len() == n {
            fused_all[k].clone()
        } else {
            let d = per_user[0][k].len();
            (0..d)
                .map(|j| set.iter().map(|&u| per_user[u][k][j]).sum::<f64>() / set.len() as f64)
                .collect()
        };
        // One query per distinct identity among the fused users; a wrong
        // fusion of different vehicles is still scored against each of them.
        let mut ids: Vec<u32> = set.iter().map(|&u| pair.identities[u]).collect();
        ids.sort_unstable();
        ids.dedup();
        for id in ids {
            let cameras = set
                .iter()
                .filter(|&&u| pair.identities[u] == id)
                .map(|&u| pair.cameras[u])
                .collect();
            queries.push(Query {
                feature: feature.clone(),
                identity: id,
                cameras,
            });
        }
        queries.extend(
            (0..n)
                .filter(|u| !set.contains(u))
                .map(|u| single_query(&per_user[u][k], pair, u)),
        );
    }
    Ok((queries, fused))
}

fn evaluation_pairs(cfg: &ExperimentConfig, records: &[Record], seed: u64) -> Result<Vec<MultiViewSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE7A1_0000);
    let set = build_pairs(
        records,
        cfg.users,
        cfg.evaluation.pairs,
        cfg.evaluation.correlated_fraction,
        &mut rng,
    )?;
    if set.samples.is_empty() {
        return Err(NnError::shape(
            "no evaluation pairs could be built from the query split",
        ));
    }
    Ok(set.samples)
}

fn link_rng(seed: u64, snr_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003) ^ (0x11AC_0000 + snr_index as u64))
}

/// Rank/mAP rows for the learned variants plus stage-2 feature MSE.
/// Every variant sees the same pairs and the same channel draws.
pub fn evaluate_learned(
    cfg: &ExperimentConfig,
    data: &EvalData,
    models: &SeedModels,
    seed: u64,
    methods: &[Method],
) -> Result<(Vec<MetricsRow>, SeedDiagnostics)> {
    let pairs = evaluation_pairs(cfg, data.query.records(), seed)?;
    let variants: Vec<(Method, Variant)> = [
        (Method::CoSc, Variant::Cooperative),
        (Method::CoScNoFusion, Variant::NoFusion),
        (Method::DlS, Variant::Separate),
    ]
    .into_iter()
    .filter(|(m, _)| methods.contains(m))
    .collect();

    let stage1_query = encode_bank(&models.coop_stage2, &data.query, EVAL_BATCH)?;
    let prepared = variants
        .iter()
        .map(|&(m, v)| {
            let model = models.final_model(v);
            Ok((
                m,
                v,
                gallery_index(model, &data.gallery)?,
                encode_bank(model, &data.query, EVAL_BATCH)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    let mut fused_total = 0;
    for (i, &snr) in cfg.snr_grid_db.iter().enumerate() {
        let mut rng = link_rng(seed, i);
        let link = LinkBatch::draw(
            &vec![snr; pairs.len()],
            cfg.users,
            cfg.antennas,
            cfg.symbols,
            cfg.power,
            models.cooperative.dtype(),
            &mut rng,
        )?;
        let coop_mse = recovery_mse(&models.coop_stage2, &stage1_query, &pairs, &link)?;
        let sep_mse = recovery_mse(&models.separate_stage2, &stage1_query, &pairs, &link)?;
        for (method, variant, index, feats) in &prepared {
            let model = models.final_model(*variant);
            let g: Vec<Tensor> = (0..cfg.users)
                .map(|u| member_rows(feats, &pairs, u))
                .collect::<Result<_>>()?;
            let recovered = model.transmit(&g, &link, false)?;
            let queries = match variant {
                Variant::Cooperative => {
                    let (q, fused) = cooperative_queries(
                        model,
                        &recovered,
                        &pairs,
                        cfg.evaluation.gate_threshold,
                        cfg.evaluation.pairwise_gating,
                    )?;
                    fused_total += fused;
                    q
                }
                _ => {
                    let per_user: Vec<Vec<Vec<f64>>> = recovered.iter().map(rows).collect::<Result<_>>()?;
                    pairs
                        .iter()
                        .enumerate()
                        .flat_map(|(k, p)| (0..cfg.users).map(move |u| (k, p, u)))
                        .map(|(k, p, u)| single_query(&per_user[u][k], p, u))
                        .collect()
                }
            };
            let lists = queries
                .iter()
                .map(|q| retrieve(q, index))
                .collect::<cosc_core::Result<Vec<_>>>()?;
            let mut row = score(*method, snr, seed, &lists);
            row.feature_mse = Some(if *variant == Variant::Separate {
                sep_mse
            } else {
                coop_mse
            });
            row.symbol_count = cfg.symbols as f64;
            out.push(row);
        }
    }

    let diagnostics = match &models.cooperative.gate {
        Some(gate) => {
            let feats = encode_bank(&models.cooperative, &data.query, EVAL_BATCH)?;
            let acc = gate_accuracy(
                &models.cooperative,
                &feats,
                data.query.records(),
                cfg.evaluation.pairs,
                &cfg.snr_grid_db,
                cfg.evaluation.gate_threshold,
                seed,
            )?;
            let probe = feats.narrow(0, 0, 1)?;
            let identical_phi = gate.decide(&probe, &probe, cfg.evaluation.gate_threshold)?[0].phi;
            SeedDiagnostics {
                seed,
                gate_accuracy: acc,
                identical_phi,
                fused_queries: fused_total,
            }
        }
        None => return Err(NnError::Dependency("cooperative model has no gate".into())),
    };
    Ok((out, diagnostics))
}

/// Per-user image transmission with a classical scheme, then retrieval with
/// the stage-1 encoder on whatever was reconstructed. Failed decodes count
/// as queries with nothing relevant retrieved.
pub fn evaluate_baselines(
    cfg: &ExperimentConfig,
    split: &DatasetSplit,
    data: &EvalData,
    models: &SeedModels,
    seed: u64,
    methods: &[Method],
) -> Result<Vec<MetricsRow>> {
    let wanted: Vec<Method> = [Method::Digital, Method::SoftCast]
        .into_iter()
        .filter(|m| methods.contains(m))
        .collect();
    if wanted.is_empty() {
        return Ok(Vec::new());
    }
    let pairs = evaluation_pairs(cfg, data.query.records(), seed)?;
    let encoder = &models.coop_stage2;
    let index = gallery_index(encoder, &data.gallery)?;
    let link = LinkConfig {
        users: cfg.users,
        antennas: cfg.antennas,
        power: cfg.power,
        coherence_symbols: cfg.baselines.coherence_symbols,
    };
    let digital = DigitalConfig {
        jpeg_quality: cfg.baselines.jpeg_quality,
        max_iterations: cfg.baselines.ldpc_iterations,
    };
    let softcast = SoftCastConfig {
        chunk: cfg.baselines.softcast_chunk,
    };
    let code = LdpcCode::ieee80211n_648_r34();
    let (h, w) = (split.image_height, split.image_width);
    let images = pairs
        .iter()
        .flat_map(|p| p.members.iter().map(|&m| data.query.record(m).load(h, w)))
        .collect::<cosc_core::Result<Vec<_>>>()?;

    let mut out = Vec::new();
    for (i, &snr) in cfg.snr_grid_db.iter().enumerate() {
        for &method in &wanted {
            let mut rng = link_rng(seed, i);
            let mut failures = 0;
            let mut symbols = 0usize;
            let mut recovered = Vec::with_capacity(images.len());
            for img in &images {
                let (outcome, budget) = match method {
                    Method::Digital => {
                        let (o, b, _) = digital_pipeline(img, snr, &link, &digital, &code, &mut rng)?;
                        (o, b)
                    }
                    _ => {
                        let (o, b, _) = softcast_pipeline(img, snr, &link, &softcast, &mut rng)?;
                        (o, b)
                    }
                };
                symbols += budget.complex_symbols;
                if outcome.failed {
                    failures += 1;
                }
                recovered.push(outcome.image);
            }
            let ok: Vec<usize> = (0..recovered.len()).filter(|&j| recovered[j].is_some()).collect();
            let mut feats: Vec<Option<Vec<f64>>> = vec![None; recovered.len()];
            for chunk in ok.chunks(EVAL_BATCH) {
                let mut pixels = Vec::new();
                for &j in chunk {
                    if let Some(img) = &recovered[j] {
                        pixels.extend(split.normalization.apply(img));
                    }
                }
                let batch =
                    Tensor::from_vec(pixels, (chunk.len(), 3, h, w), &Device::Cpu)?.to_dtype(encoder.dtype())?;
                let f = rows(&encoder.encode_images(&batch, false)?)?;
                for (&j, row) in chunk.iter().zip(f) {
                    feats[j] = Some(row);
                }
            }
            let mut lists = Vec::with_capacity(recovered.len());
            for (j, f) in feats.iter().enumerate() {
                let (pair, user) = (&pairs[j / cfg.users], j % cfg.users);
                let list = match f {
                    Some(f) => retrieve(&single_query(f, pair, user), &index)?,
                    None => {
                        let q = single_query(&[], pair, user);
                        RankedList::miss(index.relevant_count(&q))
                    }
                };
                lists.push(list);
            }
            let mut row = score(method, snr, seed, &lists);
            row.symbol_count = symbols as f64 / images.len() as f64;
            row.decode_failure_rate = Some(failures as f64 / images.len() as f64);
            log::info!(
                "{method} seed {seed} at {snr} dB: failure rate {:.3}, rank-1 {:.3}",
                row.decode_failure_rate.unwrap_or(0.0),
                row.rank1
            );
            out.push(row);
        }
    }
    Ok(out)
}
