//! VeRi-style directory corpora.
//!
//! Layout: `image_train/`, `image_query/` and `image_test/` (the gallery),
//! each holding files named `<identity>_c<camera>_<frame>_<index>.<ext>`,
//! for example `0002_c002_00030600_0.jpg`.

use std::path::{Path, PathBuf};

use super::{DatasetManifest, DatasetSplit, ImageSource, Normalization, Record};
use crate::{Error, Result};

const SPLIT_DIRS: [&str; 3] = ["image_train", "image_query", "image_test"];

#[derive(Debug, Clone, PartialEq)]
pub struct VeriProfile {
    pub name: String,
    pub image_height: usize,
    pub image_width: usize,
}

impl VeriProfile {
    pub fn full() -> Self {
        Self {
            name: "full".into(),
            image_height: 256,
            image_width: 128,
        }
    }

    pub fn toy() -> Self {
        Self {
            name: "toy".into(),
            image_height: 32,
            image_width: 32,
        }
    }
}

/// Extracts `(identity, camera)` from a corpus file name.
pub fn parse_veri_name(path: &Path) -> Result<(u32, u32)> {
    let bad = |reason: &str| Error::Parse {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| bad("file name is not valid UTF-8"))?;
    let mut parts = stem.split('_');
    let identity = parts
        .next()
        .and_then(|p| p.parse::<u32>().ok())
        .ok_or_else(|| bad("expected a numeric identity prefix"))?;
    let camera = parts
        .next()
        .and_then(|p| p.strip_prefix('c'))
        .and_then(|p| p.parse::<u32>().ok())
        .ok_or_else(|| bad("expected a camera field like `c001`"))?;
    Ok((identity, camera))
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()),
        Some(ref e) if e == "jpg" || e == "jpeg" || e == "png"
    )
}

fn load_split(dir: &Path) -> Result<Vec<Record>> {
    if !dir.is_dir() {
        return Err(Error::config(
            format!("dataset.{}", dir.file_name().and_then(|s| s.to_str()).unwrap_or("?")),
            format!("missing directory {}", dir.display()),
        ));
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_image(p))
        .collect();
    paths.sort();
    let mut records = Vec::with_capacity(paths.len());
    for path in paths {
        let (identity, camera) = parse_veri_name(&path)?;
        ::image::image_dimensions(&path).map_err(|e| Error::Parse {
            path: path.clone(),
            reason: format!("cannot decode image header: {e}"),
        })?;
        records.push(Record {
            source: ImageSource::File(path),
            identity,
            camera,
        });
    }
    Ok(records)
}

/// Parses all three splits, sorted by path. Normalization statistics come
/// from `manifest.json` when present, otherwise from a sample of at most
/// 512 training images.
pub fn load_retrieval_dataset(root: &Path, profile: &VeriProfile) -> Result<DatasetSplit> {
    if !root.is_dir() {
        return Err(Error::config(
            "dataset_root",
            format!("{} is not a directory", root.display()),
        ));
    }
    let train = load_split(&root.join(SPLIT_DIRS[0]))?;
    let query = load_split(&root.join(SPLIT_DIRS[1]))?;
    let gallery = load_split(&root.join(SPLIT_DIRS[2]))?;

    let manifest_path = root.join("manifest.json");
    let normalization = if manifest_path.is_file() {
        DatasetManifest::read(&manifest_path)?.normalization
    } else {
        let step = (train.len() / 512).max(1);
        let sample: Vec<_> = train
            .iter()
            .step_by(step)
            .map(|r| r.load(profile.image_height, profile.image_width))
            .collect::<Result<_>>()?;
        Normalization::estimate(sample.iter())
    };
    let split = DatasetSplit {
        profile: profile.name.clone(),
        image_height: profile.image_height,
        image_width: profile.image_width,
        train,
        query,
        gallery,
        normalization,
    };
    split.validate()?;
    Ok(split)
}

/// Writes every record as a PNG under the corpus layout plus `manifest.json`.
pub fn write_dataset(split: &DatasetSplit, root: &Path) -> Result<DatasetManifest> {
    for (dir, records) in SPLIT_DIRS.iter().zip([&split.train, &split.query, &split.gallery]) {
        let dir = root.join(dir);
        std::fs::create_dir_all(&dir)?;
        for (i, r) in records.iter().enumerate() {
            let img = r.load(split.image_height, split.image_width)?;
            let name = format!("{:04}_c{:03}_{:08}_0.png", r.identity, r.camera, i);
            img.save(&dir.join(name))?;
        }
    }
    let manifest = split.manifest();
    manifest.write(&root.join("manifest.json"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_corpus_names() {
        assert_eq!(
            parse_veri_name(Path::new("a/0002_c002_00030600_0.jpg")).unwrap(),
            (2, 2)
        );
        assert_eq!(parse_veri_name(Path::new("0776_c020_1.png")).unwrap(), (776, 20));
    }

    #[test]
    fn malformed_name_names_the_file() {
        let err = parse_veri_name(Path::new("dir/car_front.jpg")).unwrap_err();
        match err {
            Error::Parse { path, .. } => assert_eq!(path, Path::new("dir/car_front.jpg")),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_veri_name(Path::new("0002_x2_0.jpg")).is_err());
    }
}
