//! Normalised image tensors for a list of records.

use candle_core::{DType, Device, Tensor};
use cosc_core::dataset::{Normalization, Record};

use crate::Result;

/// Records plus their normalised pixels; in-memory corpora are cached,
/// file-backed ones are decoded per batch.
pub struct ImageBank {
    records: Vec<Record>,
    height: usize,
    width: usize,
    normalization: Normalization,
    cache: Option<Vec<Vec<f32>>>,
}

impl ImageBank {
    pub fn new(records: &[Record], height: usize, width: usize, normalization: Normalization) -> Result<Self> {
        let in_memory = records.iter().all(|r| r.path().is_none());
        let cache = if in_memory {
            Some(
                records
                    .iter()
                    .map(|r| Ok(normalization.apply(&r.load(height, width)?)))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            records: records.to_vec(),
            height,
            width,
            normalization,
            cache,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn record(&self, i: usize) -> &Record {
        &self.records[i]
    }

    /// `(k, 3, H, W)` tensor for the given record indices.
    pub fn batch(&self, indices: &[usize], dtype: DType) -> Result<Tensor> {
        let per = 3 * self.height * self.width;
        let mut data = Vec::with_capacity(indices.len() * per);
        for &i in indices {
            match &self.cache {
                Some(c) => data.extend_from_slice(&c[i]),
                None => {
                    let img = self.records[i].load(self.height, self.width)?;
                    data.extend(self.normalization.apply(&img));
                }
            }
        }
        Ok(Tensor::from_vec(data, (indices.len(), 3, self.height, self.width), &Device::Cpu)?.to_dtype(dtype)?)
    }
}
