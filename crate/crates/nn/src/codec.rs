//! JSC encoder and the cooperative / separate JSC decoders.

use candle_core::{DType, Tensor, D};

use crate::layers::{leaky_relu, BatchNorm, Conv1d, Linear};
use crate::params::ParamStore;
use crate::{NnError, Result};

pub const DECODER_KERNEL: usize = 5;
/// Output channels of the cooperative decoder's convolution per user.
pub const COOP_CHANNELS_PER_USER: usize = 4;
pub const SEPARATE_CHANNELS: usize = 4;

/// Scales each row of `(k, 2B)` so the mean complex-symbol power is `power`.
pub fn normalize_power_rows(raw: &Tensor, power: f64) -> Result<Tensor> {
    let (_, width) = raw.dims2()?;
    if width % 2 != 0 {
        return Err(NnError::shape(format!("symbol rows need an even length, got {width}")));
    }
    let symbols = (width / 2) as f64;
    let energy = raw.sqr()?.sum_keepdim(1)?;
    let min = energy.to_dtype(DType::F64)?.flatten_all()?.min(0)?.to_scalar::<f64>()?;
    if !(min > 0.0) {
        return Err(cosc_core::Error::DegenerateSymbols.into());
    }
    let scale = (energy.affine(1.0 / (symbols * power), 0.0)?).sqrt()?;
    Ok(raw.broadcast_div(&scale)?)
}

/// Feature `(k, F)` to normalised symbols `(k, 2B)`.
pub struct JscEncoder {
    store: ParamStore,
    fc1: Linear,
    bn1: BatchNorm,
    fc2: Linear,
    power: f64,
}

impl JscEncoder {
    pub fn new(name: &str, feature_dim: usize, symbols: usize, power: f64, seed: u64, dtype: DType) -> Result<Self> {
        let mut store = ParamStore::new(name, seed, dtype);
        let width = 2 * symbols;
        Ok(Self {
            fc1: Linear::new(&mut store, "fc1", feature_dim, width, true)?,
            bn1: BatchNorm::new(&mut store, "bn1", width)?,
            fc2: Linear::new(&mut store, "fc2", width, width, true)?,
            store,
            power,
        })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn raw(&self, g: &Tensor, train: bool) -> Result<Tensor> {
        let h = leaky_relu(&self.bn1.forward(&self.fc1.forward(g)?, train)?)?;
        self.fc2.forward(&h)
    }

    pub fn forward(&self, g: &Tensor, train: bool) -> Result<Tensor> {
        normalize_power_rows(&self.raw(g, train)?, self.power)
    }
}

/// Detected symbols `(k, N, 2B)` of all users to `(k, N·F)`.
pub struct CoopDecoder {
    store: ParamStore,
    conv: Conv1d,
    fc1: Linear,
    bn1: BatchNorm,
    fc2: Linear,
    users: usize,
    symbols: usize,
}

impl CoopDecoder {
    pub fn new(users: usize, symbols: usize, feature_dim: usize, seed: u64, dtype: DType) -> Result<Self> {
        let mut store = ParamStore::new("coop_decoder", seed, dtype);
        let channels = COOP_CHANNELS_PER_USER * users;
        let flat = channels * 2 * symbols;
        Ok(Self {
            conv: Conv1d::new(&mut store, "conv", users, channels, DECODER_KERNEL)?,
            fc1: Linear::new(&mut store, "fc1", flat, feature_dim, true)?,
            bn1: BatchNorm::new(&mut store, "bn1", feature_dim)?,
            fc2: Linear::new(&mut store, "fc2", feature_dim, users * feature_dim, true)?,
            store,
            users,
            symbols,
        })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    /// Width after the convolution stage (16B for two users).
    pub fn conv_width(&self) -> usize {
        COOP_CHANNELS_PER_USER * self.users * 2 * self.symbols
    }

    pub fn forward(&self, detected: &Tensor, train: bool) -> Result<Tensor> {
        let (k, n, w) = detected.dims3()?;
        if n != self.users || w != 2 * self.symbols {
            return Err(NnError::shape(format!(
                "cooperative decoder expects (k, {}, {}), got {:?}",
                self.users,
                2 * self.symbols,
                detected.dims()
            )));
        }
        let c = self.conv.forward(detected)?.reshape((k, self.conv_width()))?;
        let h = leaky_relu(&self.bn1.forward(&self.fc1.forward(&c)?, train)?)?;
        leaky_relu(&self.fc2.forward(&h)?)
    }
}

/// One user's detected symbols `(k, 2B)` to `(k, F)`.
pub struct SeparateDecoder {
    store: ParamStore,
    conv: Conv1d,
    fc1: Linear,
    bn1: BatchNorm,
    fc2: Linear,
    symbols: usize,
}

impl SeparateDecoder {
    pub fn new(name: &str, symbols: usize, feature_dim: usize, seed: u64, dtype: DType) -> Result<Self> {
        let mut store = ParamStore::new(name, seed, dtype);
        let flat = SEPARATE_CHANNELS * 2 * symbols;
        Ok(Self {
            conv: Conv1d::new(&mut store, "conv", 1, SEPARATE_CHANNELS, DECODER_KERNEL)?,
            fc1: Linear::new(&mut store, "fc1", flat, feature_dim, true)?,
            bn1: BatchNorm::new(&mut store, "bn1", feature_dim)?,
            fc2: Linear::new(&mut store, "fc2", feature_dim, feature_dim, true)?,
            store,
            symbols,
        })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn conv_width(&self) -> usize {
        SEPARATE_CHANNELS * 2 * self.symbols
    }

    pub fn forward(&self, detected: &Tensor, train: bool) -> Result<Tensor> {
        let (k, w) = detected.dims2()?;
        if w != 2 * self.symbols {
            return Err(NnError::shape(format!(
                "separate decoder expects {} values per user, got {w}",
                2 * self.symbols
            )));
        }
        let c = self
            .conv
            .forward(&detected.unsqueeze(1)?)?
            .reshape((k, self.conv_width()))?;
        let h = leaky_relu(&self.bn1.forward(&self.fc1.forward(&c)?, train)?)?;
        leaky_relu(&self.fc2.forward(&h)?)
    }
}

/// Splits `(k, N·F)` into N tensors of `(k, F)`.
pub fn split_users(joint: &Tensor, users: usize) -> Result<Vec<Tensor>> {
    let width = joint.dim(D::Minus1)?;
    if width % users != 0 {
        return Err(NnError::shape(format!(
            "{width} features do not split across {users} users"
        )));
    }
    let f = width / users;
    (0..users)
        .map(|u| Ok(joint.narrow(1, u * f, f)?.contiguous()?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::Device;

    #[test]
    fn encoder_output_meets_power_budget() {
        let enc = JscEncoder::new("jsc0", 64, 8, 1.0, 3, DType::F64).unwrap();
        let g = Tensor::randn(0f64, 1.0, (6, 64), &Device::Cpu).unwrap();
        let x = enc.forward(&g, true).unwrap();
        assert_eq!(x.dims(), &[6, 16]);
        for row in x.to_vec2::<f64>().unwrap() {
            let p = row.iter().map(|v| v * v).sum::<f64>() / 8.0;
            assert!((p - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_rows_are_degenerate() {
        let raw = Tensor::zeros((2, 4), DType::F32, &Device::Cpu).unwrap();
        let err = normalize_power_rows(&raw, 1.0).unwrap_err();
        assert_eq!(err.kind(), "degenerate_symbols");
    }

    #[test]
    fn table_widths() {
        let coop = CoopDecoder::new(2, 16, 2048, 1, DType::F32).unwrap();
        assert_eq!(coop.conv_width(), 16 * 16);
        let sep = SeparateDecoder::new("sep0", 16, 2048, 1, DType::F32).unwrap();
        assert_eq!(sep.conv_width(), 8 * 16);
        let x = Tensor::zeros((1, 2, 32), DType::F32, &Device::Cpu).unwrap();
        let out = coop.forward(&x, false).unwrap();
        assert_eq!(out.dims(), &[1, 4096]);
        assert!(out.to_vec2::<f32>().unwrap()[0].iter().all(|v| v.is_finite()));
        let s = sep
            .forward(&Tensor::zeros((1, 32), DType::F32, &Device::Cpu).unwrap(), false)
            .unwrap();
        assert_eq!(s.dims(), &[1, 2048]);
    }

    proptest::proptest! {
        #[test]
        fn normalized_rows_meet_the_budget(
            rows in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 8), 1..6),
            power in 0.1f64..4.0,
        ) {
            proptest::prop_assume!(rows.iter().all(|r| r.iter().any(|v| v.abs() > 1e-3)));
            let flat: Vec<f64> = rows.concat();
            let raw = Tensor::from_vec(flat, (rows.len(), 8), &Device::Cpu).unwrap();
            for row in normalize_power_rows(&raw, power).unwrap().to_vec2::<f64>().unwrap() {
                let p = row.iter().map(|v| v * v).sum::<f64>() / 4.0;
                proptest::prop_assert!((p - power).abs() <= 1e-6 * power);
            }
        }
    }

    #[test]
    fn coop_rejects_wrong_user_count() {
        let coop = CoopDecoder::new(2, 4, 8, 1, DType::F32).unwrap();
        let x = Tensor::zeros((1, 3, 8), DType::F32, &Device::Cpu).unwrap();
        assert!(matches!(coop.forward(&x, false), Err(NnError::Shape(_))));
    }
}
