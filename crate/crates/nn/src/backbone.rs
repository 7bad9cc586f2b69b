//! Semantic encoders: image batch `(k, 3, H, W)` to features `(k, F)`.

use candle_core::Tensor;
use serde::{Deserialize, Serialize};

use crate::layers::{leaky_relu, BatchNorm, Conv2d};
use crate::params::ParamStore;
use crate::{NnError, Result};

pub const IMAGE_CHANNELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackboneKind {
    /// Four 3×3 convolutions and global average pooling.
    Toy,
    /// 50-layer bottleneck residual network.
    ResNet50,
}

struct ConvBn {
    conv: Conv2d,
    bn: BatchNorm,
}

impl ConvBn {
    fn new(store: &mut ParamStore, prefix: &str, cin: usize, cout: usize, k: usize, stride: usize) -> Result<Self> {
        Ok(Self {
            conv: Conv2d::new(store, &format!("{prefix}.conv"), cin, cout, k, stride)?,
            bn: BatchNorm::new(store, &format!("{prefix}.bn"), cout)?,
        })
    }

    fn forward(&self, x: &Tensor, train: bool) -> Result<Tensor> {
        self.bn.forward(&self.conv.forward(x)?, train)
    }
}

struct Bottleneck {
    reduce: ConvBn,
    spatial: ConvBn,
    expand: ConvBn,
    shortcut: Option<ConvBn>,
}

impl Bottleneck {
    fn forward(&self, x: &Tensor, train: bool) -> Result<Tensor> {
        let y = leaky_relu(&self.reduce.forward(x, train)?)?;
        let y = leaky_relu(&self.spatial.forward(&y, train)?)?;
        let y = self.expand.forward(&y, train)?;
        let skip = match &self.shortcut {
            Some(s) => s.forward(x, train)?,
            None => x.clone(),
        };
        leaky_relu(&(y + skip)?)
    }
}

enum Body {
    Toy(Vec<ConvBn>),
    ResNet { stem: ConvBn, blocks: Vec<Bottleneck> },
}

pub struct SemanticEncoder {
    store: ParamStore,
    body: Body,
    feature_dim: usize,
}

impl SemanticEncoder {
    pub fn new(kind: BackboneKind, feature_dim: usize, seed: u64, dtype: candle_core::DType) -> Result<Self> {
        let mut store = ParamStore::new("semantic_encoder", seed, dtype);
        let body = match kind {
            BackboneKind::Toy => {
                let widths = [IMAGE_CHANNELS, 16, 32, 64, feature_dim];
                let strides = [2, 2, 2, 1];
                let layers = (0..4)
                    .map(|i| ConvBn::new(&mut store, &format!("conv{i}"), widths[i], widths[i + 1], 3, strides[i]))
                    .collect::<Result<Vec<_>>>()?;
                Body::Toy(layers)
            }
            BackboneKind::ResNet50 => {
                if feature_dim != 2048 {
                    return Err(NnError::shape(format!(
                        "the 50-layer residual backbone emits 2048 features, config asks for {feature_dim}"
                    )));
                }
                let stem = ConvBn::new(&mut store, "stem", IMAGE_CHANNELS, 64, 7, 2)?;
                let mut blocks = Vec::new();
                let mut cin = 64;
                for (stage, (&count, &width)) in [3usize, 4, 6, 3].iter().zip(&[64usize, 128, 256, 512]).enumerate() {
                    for b in 0..count {
                        let stride = if b == 0 && stage > 0 { 2 } else { 1 };
                        let p = format!("layer{}.{b}", stage + 1);
                        let cout = width * 4;
                        let shortcut = if b == 0 {
                            Some(ConvBn::new(&mut store, &format!("{p}.down"), cin, cout, 1, stride)?)
                        } else {
                            None
                        };
                        blocks.push(Bottleneck {
                            reduce: ConvBn::new(&mut store, &format!("{p}.a"), cin, width, 1, 1)?,
                            spatial: ConvBn::new(&mut store, &format!("{p}.b"), width, width, 3, stride)?,
                            expand: ConvBn::new(&mut store, &format!("{p}.c"), width, cout, 1, 1)?,
                            shortcut,
                        });
                        cin = cout;
                    }
                }
                Body::ResNet { stem, blocks }
            }
        };
        Ok(Self {
            store,
            body,
            feature_dim,
        })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn forward(&self, images: &Tensor, train: bool) -> Result<Tensor> {
        let dims = images.dims();
        if dims.len() != 4 || dims[1] != IMAGE_CHANNELS {
            return Err(NnError::shape(format!(
                "semantic encoder expects (k, {IMAGE_CHANNELS}, H, W) images, got {dims:?}"
            )));
        }
        let x = match &self.body {
            Body::Toy(layers) => {
                let mut x = images.clone();
                for l in layers {
                    x = leaky_relu(&l.forward(&x, train)?)?;
                }
                x
            }
            Body::ResNet { stem, blocks } => {
                let x = leaky_relu(&stem.forward(images, train)?)?;
                let mut x = x
                    .pad_with_same(2, 1, 1)?
                    .pad_with_same(3, 1, 1)?
                    .max_pool2d_with_stride(3, 2)?;
                for b in blocks {
                    x = b.forward(&x, train)?;
                }
                x
            }
        };
        Ok(x.mean((2, 3))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::{DType, Device};

    #[test]
    fn toy_feature_shape() {
        let enc = SemanticEncoder::new(BackboneKind::Toy, 64, 1, DType::F32).unwrap();
        let x = Tensor::randn(0f32, 1.0, (5, 3, 32, 32), &Device::Cpu).unwrap();
        let g = enc.forward(&x, false).unwrap();
        assert_eq!(g.dims(), &[5, 64]);
        let grey = Tensor::zeros((1, 1, 32, 32), DType::F32, &Device::Cpu).unwrap();
        assert!(matches!(enc.forward(&grey, false), Err(NnError::Shape(_))));
    }

    #[test]
    fn inference_is_deterministic() {
        let enc = SemanticEncoder::new(BackboneKind::Toy, 16, 2, DType::F32).unwrap();
        let x = Tensor::randn(0f32, 1.0, (2, 3, 32, 32), &Device::Cpu).unwrap();
        let a = enc.forward(&x, false).unwrap().to_vec2::<f32>().unwrap();
        let b = enc.forward(&x, false).unwrap().to_vec2::<f32>().unwrap();
        assert_eq!(a, b);
    }
}
