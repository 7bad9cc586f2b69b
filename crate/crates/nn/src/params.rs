//! Named parameter sets, seeded initialisation, checksums and checkpoints.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use candle_core::{DType, Device, Tensor, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{NnError, Result};

/// Learnable tensors and non-learnable buffers of one module.
///
/// Every tensor draws its initial values from a ChaCha stream keyed by the
/// store seed and the tensor name, so creation order does not matter.
#[derive(Debug, Clone)]
pub struct ParamStore {
    name: String,
    seed: u64,
    dtype: DType,
    device: Device,
    trainable: BTreeMap<String, Var>,
    buffers: BTreeMap<String, Var>,
}

impl ParamStore {
    pub fn new(name: impl Into<String>, seed: u64, dtype: DType) -> Self {
        Self {
            name: name.into(),
            seed,
            dtype,
            device: Device::Cpu,
            trainable: BTreeMap::new(),
            buffers: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dtype(&self) -> DType {
        self.dtype
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    fn stream(&self, key: &str) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(self.name.as_bytes());
        h.update([0u8]);
        h.update(key.as_bytes());
        let digest = h.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest[..32]);
        ChaCha8Rng::from_seed(seed)
    }

    fn make(&self, shape: &[usize], values: Vec<f64>) -> Result<Var> {
        let t = Tensor::from_vec(values, shape, &self.device)?.to_dtype(self.dtype)?;
        Ok(Var::from_tensor(&t)?)
    }

    fn insert(&mut self, key: &str, var: Var, trainable: bool) -> Result<Var> {
        let map = if trainable {
            &mut self.trainable
        } else {
            &mut self.buffers
        };
        if map.insert(key.to_string(), var.clone()).is_some() {
            return Err(NnError::shape(format!("duplicate parameter `{}.{key}`", self.name)));
        }
        Ok(var)
    }

    /// Trainable tensor with entries uniform in `[-bound, bound]`.
    pub fn uniform(&mut self, key: &str, shape: &[usize], bound: f64) -> Result<Var> {
        let n: usize = shape.iter().product();
        let mut rng = self.stream(key);
        let values = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
        let var = self.make(shape, values)?;
        self.insert(key, var, true)
    }

    pub fn constant(&mut self, key: &str, shape: &[usize], value: f64) -> Result<Var> {
        let n: usize = shape.iter().product();
        let var = self.make(shape, vec![value; n])?;
        self.insert(key, var, true)
    }

    /// Non-learnable state such as running statistics.
    pub fn buffer(&mut self, key: &str, shape: &[usize], value: f64) -> Result<Var> {
        let n: usize = shape.iter().product();
        let var = self.make(shape, vec![value; n])?;
        self.insert(key, var, false)
    }

    pub fn vars(&self) -> Vec<Var> {
        self.trainable.values().cloned().collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.trainable.values().map(|v| v.elem_count()).sum()
    }

    pub fn get(&self, key: &str) -> Option<&Var> {
        self.trainable.get(key).or_else(|| self.buffers.get(key))
    }

    /// All tensors keyed `module.name`.
    pub fn tensors(&self) -> BTreeMap<String, Tensor> {
        self.trainable
            .iter()
            .chain(&self.buffers)
            .map(|(k, v)| (format!("{}.{k}", self.name), v.as_tensor().clone()))
            .collect()
    }

    /// SHA-256 over names and f64 little-endian values of every tensor.
    pub fn checksum(&self) -> Result<String> {
        let mut h = Sha256::new();
        for (k, t) in self.tensors() {
            h.update(k.as_bytes());
            for v in t.flatten_all()?.to_dtype(DType::F64)?.to_vec1::<f64>()? {
                h.update(v.to_le_bytes());
            }
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Overwrites every tensor from `source`, casting to this store's dtype.
    pub fn load_from(&self, source: &HashMap<String, Tensor>, origin: &str) -> Result<()> {
        for (k, var) in self.trainable.iter().chain(&self.buffers) {
            let name = format!("{}.{k}", self.name);
            let t = source.get(&name).ok_or_else(|| NnError::MissingTensor {
                path: origin.to_string(),
                name: name.clone(),
            })?;
            if t.dims() != var.dims() {
                return Err(NnError::shape(format!(
                    "{name}: checkpoint has {:?}, model expects {:?}",
                    t.dims(),
                    var.dims()
                )));
            }
            var.set(&t.to_dtype(self.dtype)?)?;
        }
        Ok(())
    }

    /// Copies values (not identity) from another store of the same layout.
    pub fn copy_from(&self, other: &ParamStore) -> Result<()> {
        let renamed: HashMap<String, Tensor> = other
            .trainable
            .iter()
            .chain(&other.buffers)
            .map(|(k, v)| (format!("{}.{k}", self.name), v.as_tensor().clone()))
            .collect();
        self.load_from(&renamed, other.name())
    }

    /// Deep copy with fresh storage, optionally renamed.
    pub fn duplicate(&self, name: impl Into<String>) -> Result<ParamStore> {
        let copy_map = |m: &BTreeMap<String, Var>| -> Result<BTreeMap<String, Var>> {
            m.iter()
                .map(|(k, v)| Ok((k.clone(), Var::from_tensor(&v.as_tensor().copy()?)?)))
                .collect()
        };
        Ok(ParamStore {
            name: name.into(),
            seed: self.seed,
            dtype: self.dtype,
            device: self.device.clone(),
            trainable: copy_map(&self.trainable)?,
            buffers: copy_map(&self.buffers)?,
        })
    }
}

/// Configuration a checkpoint was produced for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigStamp {
    pub feature_dim: usize,
    pub symbols: usize,
    pub users: usize,
    pub antennas: usize,
}

impl ConfigStamp {
    const KEY: &'static str = "__config_stamp__";

    fn to_tensor(self) -> Result<Tensor> {
        let v = [self.feature_dim, self.symbols, self.users, self.antennas].map(|x| x as f64);
        Ok(Tensor::new(&v, &Device::Cpu)?)
    }

    fn from_tensor(t: &Tensor) -> Result<Self> {
        let v = t.to_dtype(DType::F64)?.to_vec1::<f64>()?;
        if v.len() != 4 {
            return Err(NnError::shape("config stamp must have 4 entries"));
        }
        Ok(Self {
            feature_dim: v[0] as usize,
            symbols: v[1] as usize,
            users: v[2] as usize,
            antennas: v[3] as usize,
        })
    }
}

impl std::fmt::Display for ConfigStamp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "F={} B={} N={} M={}",
            self.feature_dim, self.symbols, self.users, self.antennas
        )
    }
}

/// Writes the given stores into one safetensors archive with a config stamp.
pub fn save_checkpoint(path: &Path, stamp: ConfigStamp, stores: &[&ParamStore]) -> Result<()> {
    let mut all: HashMap<String, Tensor> = HashMap::new();
    for s in stores {
        for (k, t) in s.tensors() {
            // Stored in f64 so a checkpoint can be reloaded at any precision.
            all.insert(k, t.to_dtype(DType::F64)?);
        }
    }
    all.insert(ConfigStamp::KEY.to_string(), stamp.to_tensor()?);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    candle_core::safetensors::save(&all, path)?;
    Ok(())
}

/// Loads an archive into `stores` after verifying its stamp.
pub fn load_checkpoint(path: &Path, stamp: ConfigStamp, stores: &[&ParamStore]) -> Result<()> {
    if !path.exists() {
        return Err(NnError::Dependency(format!("checkpoint {} not found", path.display())));
    }
    let map = candle_core::safetensors::load(path, &Device::Cpu)?;
    let origin = path.display().to_string();
    let found = map.get(ConfigStamp::KEY).ok_or_else(|| NnError::MissingTensor {
        path: origin.clone(),
        name: ConfigStamp::KEY.into(),
    })?;
    let found = ConfigStamp::from_tensor(found)?;
    if found != stamp {
        return Err(NnError::StampMismatch {
            expected: stamp.to_string(),
            found: found.to_string(),
        });
    }
    for s in stores {
        s.load_from(&map, &origin)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stamp() -> ConfigStamp {
        ConfigStamp {
            feature_dim: 4,
            symbols: 2,
            users: 2,
            antennas: 4,
        }
    }

    #[test]
    fn init_is_order_independent() {
        let mut a = ParamStore::new("m", 3, DType::F32);
        a.uniform("w", &[3, 2], 0.5).unwrap();
        a.uniform("v", &[4], 0.5).unwrap();
        let mut b = ParamStore::new("m", 3, DType::F32);
        b.uniform("v", &[4], 0.5).unwrap();
        b.uniform("w", &[3, 2], 0.5).unwrap();
        assert_eq!(a.checksum().unwrap(), b.checksum().unwrap());
        let mut c = ParamStore::new("m", 4, DType::F32);
        c.uniform("v", &[4], 0.5).unwrap();
        c.uniform("w", &[3, 2], 0.5).unwrap();
        assert_ne!(a.checksum().unwrap(), c.checksum().unwrap());
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.safetensors");
        let mut a = ParamStore::new("m", 1, DType::F32);
        a.uniform("w", &[3, 2], 1.0).unwrap();
        a.buffer("running", &[2], 0.25).unwrap();
        save_checkpoint(&path, stamp(), &[&a]).unwrap();

        let mut b = ParamStore::new("m", 2, DType::F32);
        b.uniform("w", &[3, 2], 1.0).unwrap();
        b.buffer("running", &[2], 0.0).unwrap();
        assert_ne!(a.checksum().unwrap(), b.checksum().unwrap());
        load_checkpoint(&path, stamp(), &[&b]).unwrap();
        assert_eq!(a.checksum().unwrap(), b.checksum().unwrap());
    }

    #[test]
    fn stamp_is_verified() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.safetensors");
        let mut a = ParamStore::new("m", 1, DType::F32);
        a.uniform("w", &[2], 1.0).unwrap();
        save_checkpoint(&path, stamp(), &[&a]).unwrap();
        let other = ConfigStamp { symbols: 16, ..stamp() };
        assert!(matches!(
            load_checkpoint(&path, other, &[&a]),
            Err(NnError::StampMismatch { .. })
        ));
        assert!(matches!(
            load_checkpoint(&dir.path().join("missing"), stamp(), &[&a]),
            Err(NnError::Dependency(_))
        ));
    }

    #[test]
    fn duplicate_is_detached() {
        let mut a = ParamStore::new("m", 1, DType::F64);
        let w = a.uniform("w", &[2], 1.0).unwrap();
        let b = a.duplicate("m").unwrap();
        w.set(&Tensor::new(&[5.0f64, 5.0], &Device::Cpu).unwrap()).unwrap();
        assert_ne!(a.checksum().unwrap(), b.checksum().unwrap());
    }
}
