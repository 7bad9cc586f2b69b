//! Classical image transmission over the shared uplink: a digital chain
//! (JPEG, rate-3/4 LDPC, BPSK) and SoftCast-style analog transmission.
//!
//! Both chains treat the image as user 0's payload while the other users
//! transmit independent equal-power streams, so the receiver faces the same
//! multi-user MMSE separation as the learned transceivers.

pub mod dct;
pub mod digital;
pub mod ldpc;
pub mod softcast;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{mmse_filter, mmse_stats, sample_channel, sample_noise, snr_to_noise_variance, NoiseSpec};
use crate::image::Image;
use crate::Result;

pub use digital::{digital_pipeline, DigitalConfig, DigitalTrace};
pub use ldpc::LdpcCode;
pub use softcast::{softcast_pipeline, SoftCastConfig, SoftCastTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub users: usize,
    pub antennas: usize,
    pub power: f64,
    /// Complex symbols sharing one fading realization.
    pub coherence_symbols: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            users: 2,
            antennas: 4,
            power: 1.0,
            coherence_symbols: 324,
        }
    }
}

/// One MMSE output sample for the user of interest: `value = gain·x + d`
/// with `E|d|² = disturbance_variance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedSymbol {
    pub value: Complex64,
    pub gain: f64,
    pub disturbance_variance: f64,
}

/// Sends `symbols` as user 0 through the N-user channel, one fresh fading
/// draw per coherence block. Users `1..N` transmit random unit-modulus
/// QPSK-like symbols scaled to the same power.
pub fn transmit<R: Rng + ?Sized>(
    symbols: &[Complex64],
    snr_db: f64,
    link: &LinkConfig,
    rng: &mut R,
) -> Result<Vec<ReceivedSymbol>> {
    let noise_variance = snr_to_noise_variance(NoiseSpec::new(snr_db, link.power));
    let amp = (link.power / 2.0).sqrt();
    let mut out = Vec::with_capacity(symbols.len());
    for block in symbols.chunks(link.coherence_symbols.max(1)) {
        let chan = sample_channel(link.users, link.antennas, noise_variance, rng)?;
        let w = mmse_filter(&chan, link.power)?;
        let stats = mmse_stats(&chan, link.power)?[0];
        let mut x = DMatrix::from_element(link.users, block.len(), Complex64::new(0.0, 0.0));
        for (b, s) in block.iter().enumerate() {
            x[(0, b)] = *s;
            for u in 1..link.users {
                let re = if rng.random_bool(0.5) { amp } else { -amp };
                let im = if rng.random_bool(0.5) { amp } else { -amp };
                x[(u, b)] = Complex64::new(re, im);
            }
        }
        let noise = sample_noise(link.antennas, block.len(), noise_variance, rng);
        let y = chan.gains() * x + noise;
        let xhat = w * y;
        out.extend((0..block.len()).map(|b| ReceivedSymbol {
            value: xhat[(0, b)],
            gain: stats.gain,
            disturbance_variance: stats.disturbance_variance,
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionOutcome {
    pub image: Option<Image>,
    /// Set iff channel decoding or image decoding failed.
    pub failed: bool,
    pub psnr: Option<f64>,
    /// Received source bytes equal the transmitted ones.
    pub bit_exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolBudget {
    pub complex_symbols: usize,
}

/// What a transmission consumed, per image.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineTrace {
    Semantic { symbols: usize },
    Digital(DigitalTrace),
    SoftCast(SoftCastTrace),
}

pub fn count_symbols(trace: &PipelineTrace) -> SymbolBudget {
    let complex_symbols = match trace {
        PipelineTrace::Semantic { symbols } => *symbols,
        // two coded bits per complex symbol, one on each real dimension
        PipelineTrace::Digital(t) => t.coded_bits.div_ceil(2),
        PipelineTrace::SoftCast(t) => t.coefficients.div_ceil(2),
    };
    SymbolBudget { complex_symbols }
}

/// Per-trial record for baseline audit files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: String,
    pub snr_db: f64,
    pub trial: usize,
    pub symbols: usize,
    pub decode_ok: bool,
    pub psnr: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semantic_budget_is_block_length() {
        assert_eq!(
            count_symbols(&PipelineTrace::Semantic { symbols: 16 }).complex_symbols,
            16
        );
    }
}
