//! Signal-level building blocks for cooperative multi-user semantic
//! transmission: the Rayleigh MIMO uplink with MMSE detection, distance-based
//! retrieval metrics, vehicle re-identification datasets (VeRi-style corpora
//! and a procedural toy corpus) and the classical digital/analog transmission
//! baselines used for comparison.

pub mod baselines;
pub mod channel;
pub mod config;
pub mod dataset;
pub mod error;
pub mod image;
pub mod report;
pub mod retrieval;

pub use error::{Error, Result};
