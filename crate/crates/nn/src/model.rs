//! Assembled transceivers for the cooperative system and its ablations.

use std::collections::BTreeMap;

use candle_core::{DType, Tensor};
use cosc_core::config::{ExperimentConfig, Profile};
use serde::{Deserialize, Serialize};

use crate::backbone::{BackboneKind, SemanticEncoder};
use crate::codec::{split_users, CoopDecoder, JscEncoder, SeparateDecoder};
use crate::link::LinkBatch;
use crate::params::{ConfigStamp, ParamStore};
use crate::task::{Fusion, Gate, Identifier};
use crate::{NnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub users: usize,
    pub antennas: usize,
    pub symbols: usize,
    pub feature_dim: usize,
    pub identities: usize,
    pub power: f64,
    pub backbone: BackboneKind,
}

impl ModelConfig {
    pub fn from_experiment(cfg: &ExperimentConfig) -> Self {
        Self {
            users: cfg.users,
            antennas: cfg.antennas,
            symbols: cfg.symbols,
            feature_dim: cfg.feature_dim,
            identities: cfg.identities,
            power: cfg.power,
            backbone: match cfg.profile {
                Profile::Toy => BackboneKind::Toy,
                Profile::Full => BackboneKind::ResNet50,
            },
        }
    }

    pub fn stamp(&self) -> ConfigStamp {
        ConfigStamp {
            feature_dim: self.feature_dim,
            symbols: self.symbols,
            users: self.users,
            antennas: self.antennas,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Cooperative decoder, fusion and gating.
    Cooperative,
    /// Cooperative decoder, per-user retrieval.
    NoFusion,
    /// Per-user decoders, per-user retrieval.
    Separate,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Cooperative, Variant::NoFusion, Variant::Separate];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Cooperative => "co-sc",
            Variant::NoFusion => "co-sc-no-fusion",
            Variant::Separate => "dl-s",
        }
    }
}

pub enum Decoder {
    Cooperative(CoopDecoder),
    Separate(Vec<SeparateDecoder>),
}

impl Decoder {
    pub fn stores(&self) -> Vec<&ParamStore> {
        match self {
            Decoder::Cooperative(d) => vec![d.store()],
            Decoder::Separate(ds) => ds.iter().map(|d| d.store()).collect(),
        }
    }
}

/// Every module of one variant, each with its own parameter store.
pub struct Transceiver {
    pub config: ModelConfig,
    pub variant: Variant,
    pub encoder: SemanticEncoder,
    pub identifier: Identifier,
    pub jsc: Vec<JscEncoder>,
    pub decoder: Decoder,
    pub fusion: Option<Fusion>,
    pub gate: Option<Gate>,
    dtype: DType,
}

impl Transceiver {
    pub fn new(config: ModelConfig, variant: Variant, seed: u64, dtype: DType) -> Result<Self> {
        let c = &config;
        let encoder = SemanticEncoder::new(c.backbone, c.feature_dim, seed, dtype)?;
        let identifier = Identifier::new(c.feature_dim, c.identities, seed, dtype)?;
        let jsc = (0..c.users)
            .map(|u| {
                JscEncoder::new(
                    &format!("jsc_encoder{u}"),
                    c.feature_dim,
                    c.symbols,
                    c.power,
                    seed,
                    dtype,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let decoder = match variant {
            Variant::Cooperative | Variant::NoFusion => {
                Decoder::Cooperative(CoopDecoder::new(c.users, c.symbols, c.feature_dim, seed, dtype)?)
            }
            Variant::Separate => Decoder::Separate(
                (0..c.users)
                    .map(|u| SeparateDecoder::new(&format!("jsc_decoder{u}"), c.symbols, c.feature_dim, seed, dtype))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let (fusion, gate) = match variant {
            Variant::Cooperative => (
                Some(Fusion::new(c.users, seed, dtype)?),
                Some(Gate::new(c.feature_dim, seed, dtype)?),
            ),
            _ => (None, None),
        };
        Ok(Self {
            config,
            variant,
            encoder,
            identifier,
            jsc,
            decoder,
            fusion,
            gate,
            dtype,
        })
    }

    pub fn dtype(&self) -> DType {
        self.dtype
    }

    pub fn jsc_stores(&self) -> Vec<&ParamStore> {
        self.jsc.iter().map(|j| j.store()).collect()
    }

    pub fn all_stores(&self) -> Vec<&ParamStore> {
        let mut s = vec![self.encoder.store(), self.identifier.store()];
        s.extend(self.jsc_stores());
        s.extend(self.decoder.stores());
        s.extend(self.fusion.as_ref().map(|f| f.store()));
        s.extend(self.gate.as_ref().map(|g| g.store()));
        s
    }

    pub fn checksums(&self) -> Result<BTreeMap<String, String>> {
        self.all_stores()
            .into_iter()
            .map(|s| Ok((s.name().to_string(), s.checksum()?)))
            .collect()
    }

    /// Copies every module that exists in both transceivers with the same name.
    pub fn copy_shared_from(&self, other: &Transceiver) -> Result<()> {
        let theirs: BTreeMap<&str, &ParamStore> = other.all_stores().into_iter().map(|s| (s.name(), s)).collect();
        for mine in self.all_stores() {
            if let Some(src) = theirs.get(mine.name()) {
                mine.copy_from(src)?;
            }
        }
        Ok(())
    }

    pub fn encode_images(&self, images: &Tensor, train: bool) -> Result<Tensor> {
        self.encoder.forward(images, train)
    }

    /// Symbols `(k, N, 2B)` for per-user features.
    pub fn channel_input(&self, features: &[Tensor], train: bool) -> Result<Tensor> {
        if features.len() != self.config.users {
            return Err(NnError::shape(format!(
                "{} user features for {} users",
                features.len(),
                self.config.users
            )));
        }
        let symbols = features
            .iter()
            .zip(&self.jsc)
            .map(|(g, enc)| enc.forward(g, train))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tensor::stack(&symbols, 1)?)
    }

    pub fn decode(&self, detected: &Tensor, train: bool) -> Result<Vec<Tensor>> {
        match &self.decoder {
            Decoder::Cooperative(d) => split_users(&d.forward(detected, train)?, self.config.users),
            Decoder::Separate(ds) => ds
                .iter()
                .enumerate()
                .map(|(u, d)| d.forward(&detected.narrow(1, u, 1)?.squeeze(1)?.contiguous()?, train))
                .collect(),
        }
    }

    /// Features through JSC encoders, the uplink and the decoder(s).
    pub fn transmit(&self, features: &[Tensor], link: &LinkBatch, train: bool) -> Result<Vec<Tensor>> {
        let x = self.channel_input(features, train)?;
        self.decode(&link.apply(&x)?, train)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::Device;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tiny() -> ModelConfig {
        ModelConfig {
            users: 2,
            antennas: 4,
            symbols: 4,
            feature_dim: 8,
            identities: 3,
            power: 1.0,
            backbone: BackboneKind::Toy,
        }
    }

    #[test]
    fn separate_decoder_is_separable_and_coop_is_not() {
        let cfg = tiny();
        let x = Tensor::randn(0f64, 1.0, (3, 2, 8), &Device::Cpu).unwrap();
        let bump = Tensor::randn(0f64, 1.0, (3, 1, 8), &Device::Cpu).unwrap();
        let x2 = Tensor::cat(
            &[x.narrow(1, 0, 1).unwrap(), (x.narrow(1, 1, 1).unwrap() + bump).unwrap()],
            1,
        )
        .unwrap();

        let sep = Transceiver::new(cfg, Variant::Separate, 1, DType::F64).unwrap();
        let a = sep.decode(&x, false).unwrap()[0].to_vec2::<f64>().unwrap();
        let b = sep.decode(&x2, false).unwrap()[0].to_vec2::<f64>().unwrap();
        assert_eq!(a, b);

        let coop = Transceiver::new(cfg, Variant::Cooperative, 1, DType::F64).unwrap();
        let a = coop.decode(&x, false).unwrap()[0].to_vec2::<f64>().unwrap();
        let b = coop.decode(&x2, false).unwrap()[0].to_vec2::<f64>().unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn transmit_shapes_and_determinism() {
        let cfg = tiny();
        let t = Transceiver::new(cfg, Variant::Cooperative, 2, DType::F32).unwrap();
        let g: Vec<Tensor> = (0..2)
            .map(|_| Tensor::randn(0f32, 1.0, (5, 8), &Device::Cpu).unwrap())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let link = LinkBatch::draw(&[0.0; 5], 2, 4, 4, 1.0, DType::F32, &mut rng).unwrap();
        let out = t.transmit(&g, &link, false).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].dims(), &[5, 8]);
        let again = t.transmit(&g, &link, false).unwrap();
        assert_eq!(out[0].to_vec2::<f32>().unwrap(), again[0].to_vec2::<f32>().unwrap());
    }

    #[test]
    fn distinct_inputs_give_distinct_symbols() {
        let t = Transceiver::new(tiny(), Variant::Separate, 3, DType::F64).unwrap();
        let g: Vec<Tensor> = (0..2)
            .map(|_| Tensor::randn(0f64, 1.0, (2, 8), &Device::Cpu).unwrap())
            .collect();
        let x = t.channel_input(&g, false).unwrap().to_vec3::<f64>().unwrap();
        assert_ne!(x[0][0], x[1][0]);
    }

    #[test]
    fn shared_modules_copy_by_name() {
        let a = Transceiver::new(tiny(), Variant::Cooperative, 1, DType::F32).unwrap();
        let b = Transceiver::new(tiny(), Variant::Separate, 2, DType::F32).unwrap();
        b.copy_shared_from(&a).unwrap();
        let (ca, cb) = (a.checksums().unwrap(), b.checksums().unwrap());
        assert_eq!(ca["semantic_encoder"], cb["semantic_encoder"]);
        assert_eq!(ca["jsc_encoder1"], cb["jsc_encoder1"]);
        assert!(!cb.contains_key("coop_decoder"));
    }
}
