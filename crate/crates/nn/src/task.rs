//! Task performer: fusion, same-identity gate and identity classifier.

use candle_core::{DType, Tensor};

use crate::layers::{Conv1d, Linear};
use crate::params::ParamStore;
use crate::{NnError, Result};

/// Per-position weighted combination of N features `(k, N, F) -> (k, F)`.
pub struct Fusion {
    store: ParamStore,
    conv: Conv1d,
    users: usize,
}

impl Fusion {
    /// Starts as the plain average of the inputs.
    pub fn new(users: usize, seed: u64, dtype: DType) -> Result<Self> {
        let mut store = ParamStore::new("fusion", seed, dtype);
        let conv = Conv1d::with_constants(&mut store, "conv", users, 1, 1, 1.0 / users as f64, 0.0)?;
        Ok(Self { store, conv, users })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn forward(&self, features: &[Tensor]) -> Result<Tensor> {
        if features.len() != self.users {
            return Err(NnError::shape(format!(
                "fusion expects {} features, got {}",
                self.users,
                features.len()
            )));
        }
        let stacked = Tensor::stack(features, 1)?;
        Ok(self.conv.forward(&stacked)?.squeeze(1)?)
    }
}

/// Same-identity verifier on two recovered features.
pub struct Gate {
    store: ParamStore,
    fc: Linear,
}

/// Index of the "same identity" output (φ = 1).
pub const SAME_INDEX: usize = 1;

impl Gate {
    pub fn new(feature_dim: usize, seed: u64, dtype: DType) -> Result<Self> {
        let mut store = ParamStore::new("gate", seed, dtype);
        let fc = Linear::new(&mut store, "fc", feature_dim, 2, true)?;
        Ok(Self { store, fc })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    /// Pre-sigmoid scores `(k, 2)` from the elementwise difference magnitude.
    pub fn logits(&self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        if a.dims() != b.dims() {
            return Err(NnError::shape(format!(
                "gate inputs differ: {:?} vs {:?}",
                a.dims(),
                b.dims()
            )));
        }
        self.fc.forward(&(a - b)?.abs()?)
    }

    pub fn scores(&self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        Ok(candle_nn::ops::sigmoid(&self.logits(a, b)?)?)
    }

    pub fn decide(&self, a: &Tensor, b: &Tensor, threshold: f64) -> Result<Vec<GateDecision>> {
        let scores = self.scores(a, b)?.to_dtype(DType::F64)?.to_vec2::<f64>()?;
        Ok(scores
            .into_iter()
            .map(|s| GateDecision::from_scores([s[0], s[1]], threshold))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDecision {
    /// 1 when the two features describe the same vehicle.
    pub phi: u8,
    pub scores: [f64; 2],
}

impl GateDecision {
    pub fn from_scores(scores: [f64; 2], threshold: f64) -> Self {
        let phi = u8::from(scores[SAME_INDEX] > threshold || threshold <= 0.0);
        Self { phi, scores }
    }
}

/// Identity classifier, shared by every camera.
pub struct Identifier {
    store: ParamStore,
    fc: Linear,
}

impl Identifier {
    pub fn new(feature_dim: usize, identities: usize, seed: u64, dtype: DType) -> Result<Self> {
        let mut store = ParamStore::new("identifier", seed, dtype);
        let fc = Linear::new(&mut store, "fc", feature_dim, identities, true)?;
        Ok(Self { store, fc })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn logits(&self, f: &Tensor) -> Result<Tensor> {
        self.fc.forward(f)
    }

    pub fn probabilities(&self, f: &Tensor) -> Result<Tensor> {
        Ok(candle_nn::ops::softmax(&self.logits(f)?, 1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::Device;

    #[test]
    fn fusion_starts_as_average() {
        let fusion = Fusion::new(2, 0, DType::F64).unwrap();
        let a = Tensor::new(&[[1.0f64, 2.0, 3.0]], &Device::Cpu).unwrap();
        let b = Tensor::new(&[[3.0f64, 2.0, 1.0]], &Device::Cpu).unwrap();
        let f = fusion.forward(&[a.clone(), b]).unwrap();
        assert_eq!(f.to_vec2::<f64>().unwrap(), vec![vec![2.0, 2.0, 2.0]]);
        assert!(fusion.forward(&[a]).is_err());
    }

    #[test]
    fn identifier_is_a_distribution() {
        let id = Identifier::new(8, 5, 1, DType::F64).unwrap();
        let x = Tensor::randn(0f64, 3.0, (4, 8), &Device::Cpu).unwrap();
        for row in id.probabilities(&x).unwrap().to_vec2::<f64>().unwrap() {
            assert!(row.iter().all(|p| *p >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gate_threshold_endpoints() {
        let gate = Gate::new(4, 2, DType::F64).unwrap();
        let a = Tensor::randn(0f64, 1.0, (20, 4), &Device::Cpu).unwrap();
        let b = Tensor::randn(0f64, 1.0, (20, 4), &Device::Cpu).unwrap();
        assert!(gate.decide(&a, &b, 0.0).unwrap().iter().all(|d| d.phi == 1));
        assert!(gate.decide(&a, &b, 1.0).unwrap().iter().all(|d| d.phi == 0));
        for d in gate.decide(&a, &b, 0.5).unwrap() {
            assert!(d.scores.iter().all(|s| (0.0..=1.0).contains(s)));
        }
    }
}
