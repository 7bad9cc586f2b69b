//! Distance-based gallery retrieval and the rank-n / mAP metrics.
//!
//! Gallery entries that share both identity and camera with the query are
//! treated as junk and removed from the ranking, following the usual vehicle
//! re-identification protocol.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalIndex {
    dim: usize,
    features: Vec<f64>,
    identities: Vec<u32>,
    cameras: Vec<u32>,
}

impl RetrievalIndex {
    pub fn new(dim: usize, features: Vec<f64>, identities: Vec<u32>, cameras: Vec<u32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::shape("feature dimension must be positive"));
        }
        if features.len() != dim * identities.len() || identities.len() != cameras.len() {
            return Err(Error::shape(format!(
                "gallery has {} feature values, {} labels and {} camera ids for dimension {}",
                features.len(),
                identities.len(),
                cameras.len(),
                dim
            )));
        }
        Ok(Self {
            dim,
            features,
            identities,
            cameras,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], identities: Vec<u32>, cameras: Vec<u32>) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(1);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::shape("gallery rows have different lengths"));
        }
        Self::new(dim, rows.concat(), identities, cameras)
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn identity(&self, i: usize) -> u32 {
        self.identities[i]
    }

    pub fn camera(&self, i: usize) -> u32 {
        self.cameras[i]
    }

    /// Number of scorable gallery entries relevant to `query`.
    pub fn relevant_count(&self, query: &Query) -> usize {
        (0..self.len())
            .filter(|&i| self.identities[i] == query.identity && !query.cameras.contains(&self.cameras[i]))
            .count()
    }
}

/// A retrieval request: the feature, its true identity and the camera(s)
/// that captured it.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub feature: Vec<f64>,
    pub identity: u32,
    pub cameras: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub gallery_index: usize,
    pub distance: f64,
    pub relevant: bool,
}

/// Gallery ordered by ascending distance, junk removed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
    /// Relevant items in the (junk-filtered) gallery.
    pub relevant_total: usize,
}

impl RankedList {
    /// A query that could not be served (e.g. an undecodable image): it keeps
    /// its relevant count, so it scores as a miss at every rank and AP 0.
    pub fn miss(relevant_total: usize) -> Self {
        Self {
            entries: Vec::new(),
            relevant_total,
        }
    }

    pub fn relevance(&self) -> Vec<bool> {
        self.entries.iter().map(|e| e.relevant).collect()
    }

    pub fn is_scorable(&self) -> bool {
        self.relevant_total > 0
    }
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn retrieve(query: &Query, index: &RetrievalIndex) -> Result<RankedList> {
    if index.is_empty() {
        return Err(Error::EmptyIndex);
    }
    if query.feature.len() != index.dim {
        return Err(Error::shape(format!(
            "query has dimension {}, gallery {}",
            query.feature.len(),
            index.dim
        )));
    }
    let mut entries: Vec<RankedEntry> = (0..index.len())
        .filter(|&i| !(index.identities[i] == query.identity && query.cameras.contains(&index.cameras[i])))
        .map(|i| RankedEntry {
            gallery_index: i,
            distance: squared_euclidean(&query.feature, index.row(i)).sqrt(),
            relevant: index.identities[i] == query.identity,
        })
        .collect();
    // Stable sort keeps gallery order among equal distances.
    entries.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let relevant_total = entries.iter().filter(|e| e.relevant).count();
    Ok(RankedList {
        entries,
        relevant_total,
    })
}

/// Fraction of scorable queries with a relevant item among the first `n`.
/// Queries without any relevant gallery item are skipped.
pub fn rank_n_accuracy(lists: &[RankedList], n: usize) -> f64 {
    assert!(n >= 1, "rank-n needs n >= 1");
    let scorable: Vec<&RankedList> = lists.iter().filter(|l| l.is_scorable()).collect();
    if scorable.is_empty() {
        return 0.0;
    }
    let hits = scorable
        .iter()
        .filter(|l| l.entries.iter().take(n).any(|e| e.relevant))
        .count();
    hits as f64 / scorable.len() as f64
}

/// Mean of per-query precision at each relevant position.
pub fn average_precision(list: &RankedList) -> Option<f64> {
    if !list.is_scorable() {
        return None;
    }
    let mut found = 0usize;
    let mut acc = 0.0;
    for (pos, e) in list.entries.iter().enumerate() {
        if e.relevant {
            found += 1;
            acc += found as f64 / (pos + 1) as f64;
        }
    }
    Some(acc / list.relevant_total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub map: f64,
    pub evaluated: usize,
    /// Queries excluded because they had no relevant gallery item.
    pub skipped: usize,
}

pub fn mean_average_precision(lists: &[RankedList]) -> MapSummary {
    let aps: Vec<f64> = lists.iter().filter_map(average_precision).collect();
    let skipped = lists.len() - aps.len();
    if skipped > 0 {
        log::warn!("{skipped} queries have no relevant gallery item and are excluded from mAP");
    }
    let map = if aps.is_empty() {
        0.0
    } else {
        aps.iter().sum::<f64>() / aps.len() as f64
    };
    MapSummary {
        map,
        evaluated: aps.len(),
        skipped,
    }
}

/// One audit row per (query, ranked gallery entry).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRecord {
    pub query_id: usize,
    pub gallery_id: usize,
    pub rank: usize,
    pub distance: f64,
    pub relevant: bool,
}

/// Writes ranked lists as CSV, truncated to the first `top` entries per query.
pub fn write_ranked_lists<W: Write>(writer: W, lists: &[RankedList], top: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (q, list) in lists.iter().enumerate() {
        for (rank, e) in list.entries.iter().take(top).enumerate() {
            w.serialize(RankRecord {
                query_id: q,
                gallery_id: e.gallery_index,
                rank: rank + 1,
                distance: e.distance,
                relevant: e.relevant,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
