//! Metric reports: one row per (method, SNR, seed).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "co-sc")]
    CoSc,
    #[serde(rename = "co-sc-no-fusion")]
    CoScNoFusion,
    #[serde(rename = "dl-s")]
    DlS,
    #[serde(rename = "jpeg-ldpc-bpsk")]
    Digital,
    #[serde(rename = "softcast")]
    SoftCast,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::CoSc,
        Method::CoScNoFusion,
        Method::DlS,
        Method::Digital,
        Method::SoftCast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::CoSc => "co-sc",
            Method::CoScNoFusion => "co-sc-no-fusion",
            Method::DlS => "dl-s",
            Method::Digital => "jpeg-ldpc-bpsk",
            Method::SoftCast => "softcast",
        }
    }

    pub fn is_learned(self) -> bool {
        matches!(self, Method::CoSc | Method::CoScNoFusion | Method::DlS)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config("method", format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: Method,
    pub snr_db: f64,
    pub seed: u64,
    pub rank1: f64,
    pub rank5: f64,
    pub map: f64,
    /// Mean squared error between recovered and transmitted features.
    pub feature_mse: Option<f64>,
    /// Complex channel symbols per transmitted image.
    pub symbol_count: f64,
    pub decode_failure_rate: Option<f64>,
    pub queries: usize,
}

impl MetricsRow {
    pub fn check_ranges(&self) -> Result<()> {
        for (name, v) in [("rank1", self.rank1), ("rank5", self.rank5), ("map", self.map)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(name, format!("{v} outside [0, 1] for {}", self.method)));
            }
        }
        if let Some(r) = self.decode_failure_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::config("decode_failure_rate", format!("{r} outside [0, 1]")));
            }
        }
        if let Some(m) = self.feature_mse {
            if !(m >= 0.0) {
                return Err(Error::config("feature_mse", format!("{m} is not a valid MSE")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
}

/// Across-seed mean and spread for one (method, SNR) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

fn summarize(values: &[f64]) -> Option<CellSummary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some(CellSummary {
        mean,
        std: var.sqrt(),
        count: values.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub snr_db: f64,
    pub rank1: CellSummary,
    pub rank5: CellSummary,
    pub map: CellSummary,
    pub feature_mse: Option<CellSummary>,
    pub symbol_count: f64,
    pub decode_failure_rate: Option<f64>,
}

impl MetricsReport {
    pub fn methods(&self) -> Vec<Method> {
        let mut m: Vec<Method> = self.rows.iter().map(|r| r.method).collect();
        m.sort();
        m.dedup();
        m
    }

    pub fn snrs(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.rows.iter().map(|r| r.snr_db).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }

    pub fn cell(&self, method: Method, snr_db: f64) -> Vec<&MetricsRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && (r.snr_db - snr_db).abs() < 1e-9)
            .collect()
    }

    /// Mean over seeds of `metric` for one cell.
    pub fn mean(&self, method: Method, snr_db: f64, metric: impl Fn(&MetricsRow) -> Option<f64>) -> Option<f64> {
        let vals: Vec<f64> = self.cell(method, snr_db).into_iter().filter_map(metric).collect();
        summarize(&vals).map(|s| s.mean)
    }

    /// Cells of the `methods × snrs × seeds` grid that have no row.
    pub fn missing_cells(&self, methods: &[Method], snrs: &[f64], seeds: &[u64]) -> Vec<String> {
        let mut missing = Vec::new();
        for &m in methods {
            for &s in snrs {
                for &seed in seeds {
                    let present = self
                        .rows
                        .iter()
                        .any(|r| r.method == m && (r.snr_db - s).abs() < 1e-9 && r.seed == seed);
                    if !present {
                        missing.push(format!("{m}@{s}dB/seed{seed}"));
                    }
                }
            }
        }
        missing
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out = Vec::new();
        for m in self.methods() {
            for s in self.snrs() {
                let cell = self.cell(m, s);
                if cell.is_empty() {
                    continue;
                }
                let pick = |f: fn(&MetricsRow) -> f64| {
                    summarize(&cell.iter().map(|r| f(r)).collect::<Vec<_>>()).expect("non-empty")
                };
                let mse: Vec<f64> = cell.iter().filter_map(|r| r.feature_mse).collect();
                let fail: Vec<f64> = cell.iter().filter_map(|r| r.decode_failure_rate).collect();
                out.push(SummaryRow {
                    method: m,
                    snr_db: s,
                    rank1: pick(|r| r.rank1),
                    rank5: pick(|r| r.rank5),
                    map: pick(|r| r.map),
                    feature_mse: summarize(&mse),
                    symbol_count: cell.iter().map(|r| r.symbol_count).sum::<f64>() / cell.len() as f64,
                    decode_failure_rate: summarize(&fail).map(|s| s.mean),
                });
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let rows = r.deserialize().collect::<std::result::Result<Vec<MetricsRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn write_summary_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.summary())?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: Method, snr_db: f64, seed: u64, rank1: f64) -> MetricsRow {
        MetricsRow {
            method,
            snr_db,
            seed,
            rank1,
            rank5: rank1,
            map: rank1 / 2.0,
            feature_mse: method.is_learned().then_some(0.1),
            symbol_count: 8.0,
            decode_failure_rate: None,
            queries: 10,
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let report = MetricsReport {
            rows: vec![row(Method::CoSc, -3.0, 1, 0.5), row(Method::Digital, 18.0, 2, 0.25)],
        };
        let path = dir.path().join("r.csv");
        report.write_csv(&path).unwrap();
        assert_eq!(MetricsReport::read_csv(&path).unwrap(), report);
    }

    #[test]
    fn missing_cells_are_listed() {
        let report = MetricsReport {
            rows: vec![row(Method::CoSc, 0.0, 1, 0.5)],
        };
        let missing = report.missing_cells(&[Method::CoSc, Method::DlS], &[0.0], &[1]);
        assert_eq!(missing, vec!["dl-s@0dB/seed1".to_string()]);
    }

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
    }

    #[test]
    fn summary_means_over_seeds() {
        let report = MetricsReport {
            rows: vec![row(Method::DlS, 6.0, 1, 0.2), row(Method::DlS, 6.0, 2, 0.4)],
        };
        let s = report.summary();
        assert_eq!(s.len(), 1);
        assert!((s[0].rank1.mean - 0.3).abs() < 1e-12);
        assert!((s[0].rank1.std - 0.1).abs() < 1e-12);
    }
}
