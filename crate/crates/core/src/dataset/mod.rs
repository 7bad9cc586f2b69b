//! Multi-camera vehicle corpora: records, splits, manifests and pairing.

mod pairs;
mod toy;
mod veri;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::image::{Image, CHANNELS};
use crate::{Error, Result};

pub use pairs::{build_pairs, MultiViewSample, PairSet};
pub use toy::{generate_toy_dataset, render_capture, render_vehicle, ToyConfig, VehicleSignature};
pub use veri::{load_retrieval_dataset, parse_veri_name, write_dataset, VeriProfile};

#[derive(Debug, Clone)]
pub enum ImageSource {
    Memory(Arc<Image>),
    File(PathBuf),
}

/// One captured image with its identity label and camera id.
#[derive(Debug, Clone)]
pub struct Record {
    pub source: ImageSource,
    pub identity: u32,
    pub camera: u32,
}

impl Record {
    /// Loads the pixels, resizing file-backed images to `height`×`width`.
    pub fn load(&self, height: usize, width: usize) -> Result<Image> {
        match &self.source {
            ImageSource::Memory(img) => Ok((**img).clone()),
            ImageSource::File(path) => {
                let img = Image::load(path)?;
                if img.height() == height && img.width() == width {
                    Ok(img)
                } else {
                    Ok(img.resize_center_crop(height, width))
                }
            }
        }
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.source {
            ImageSource::File(p) => Some(p),
            ImageSource::Memory(_) => None,
        }
    }
}

/// Per-channel mean and standard deviation of the training images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: [f32; 3],
    pub std: [f32; 3],
}

impl Default for Normalization {
    fn default() -> Self {
        Self {
            mean: [0.5; 3],
            std: [0.25; 3],
        }
    }
}

impl Normalization {
    pub fn estimate<'a>(images: impl IntoIterator<Item = &'a Image>) -> Self {
        let mut sum = [0f64; 3];
        let mut sq = [0f64; 3];
        let mut count = 0f64;
        for img in images {
            for c in 0..CHANNELS {
                for &v in img.plane(c) {
                    sum[c] += v as f64;
                    sq[c] += (v as f64) * (v as f64);
                }
            }
            count += (img.height() * img.width()) as f64;
        }
        if count == 0.0 {
            return Self::default();
        }
        let mut out = Self::default();
        for c in 0..CHANNELS {
            let m = sum[c] / count;
            let var = (sq[c] / count - m * m).max(1e-12);
            out.mean[c] = m as f32;
            out.std[c] = var.sqrt() as f32;
        }
        out
    }

    /// Standardized C×H×W samples ready for the network.
    pub fn apply(&self, img: &Image) -> Vec<f32> {
        let n = img.height() * img.width();
        let mut out = img.data().to_vec();
        for c in 0..CHANNELS {
            for v in &mut out[c * n..(c + 1) * n] {
                *v = (*v - self.mean[c]) / self.std[c];
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub profile: String,
    pub image_height: usize,
    pub image_width: usize,
    pub train: Vec<Record>,
    pub query: Vec<Record>,
    pub gallery: Vec<Record>,
    pub normalization: Normalization,
}

impl DatasetSplit {
    pub fn train_identities(&self) -> Vec<u32> {
        distinct(self.train.iter().map(|r| r.identity))
    }

    /// Maps training identities onto contiguous class indices `0..S`.
    pub fn class_map(&self) -> BTreeMap<u32, usize> {
        self.train_identities()
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect()
    }

    pub fn manifest(&self) -> DatasetManifest {
        let summary = |name: &str, recs: &[Record]| SplitSummary {
            name: name.to_string(),
            images: recs.len(),
            identities: distinct(recs.iter().map(|r| r.identity)).len(),
            cameras: distinct(recs.iter().map(|r| r.camera)).len(),
        };
        DatasetManifest {
            profile: self.profile.clone(),
            image_height: self.image_height,
            image_width: self.image_width,
            splits: vec![
                summary("train", &self.train),
                summary("query", &self.query),
                summary("gallery", &self.gallery),
            ],
            normalization: self.normalization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, recs) in [
            ("train", &self.train),
            ("query", &self.query),
            ("gallery", &self.gallery),
        ] {
            if recs.is_empty() {
                return Err(Error::config(format!("dataset.{name}"), "split is empty"));
            }
        }
        if self.train_identities().len() < 2 {
            return Err(Error::config("dataset.train", "needs at least 2 identities"));
        }
        let gallery_ids: BTreeSet<u32> = self.gallery.iter().map(|r| r.identity).collect();
        if let Some(r) = self.query.iter().find(|r| !gallery_ids.contains(&r.identity)) {
            return Err(Error::config(
                "dataset.query",
                format!("query identity {} has no gallery images", r.identity),
            ));
        }
        Ok(())
    }
}

fn distinct(it: impl Iterator<Item = u32>) -> Vec<u32> {
    it.collect::<BTreeSet<_>>().into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub name: String,
    pub images: usize,
    pub identities: usize,
    pub cameras: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub profile: String,
    pub image_height: usize,
    pub image_width: usize,
    pub splits: Vec<SplitSummary>,
    pub normalization: Normalization,
}

impl DatasetManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
