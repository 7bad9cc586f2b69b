//! SoftCast-style analog transmission of a single image.
//!
//! Each color plane is transformed with a full-frame DCT and cut into
//! rectangular chunks of coefficients. Chunk `i` is scaled by
//! `g_i ∝ λ_i^{-1/4}` (λ_i = mean energy of the chunk) so that the average
//! complex-symbol power equals the budget. Coefficients are paired into
//! complex symbols, sent over the channel and recovered with a per-coefficient
//! linear least-squares estimator. Chunk energies travel as error-free
//! metadata.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dct::Dct2d;
use super::{count_symbols, transmit, LinkConfig, PipelineTrace, ReconstructionOutcome, SymbolBudget};
use crate::image::{psnr, Image, CHANNELS};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftCastConfig {
    pub chunk: usize,
}

impl Default for SoftCastConfig {
    fn default() -> Self {
        Self { chunk: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftCastTrace {
    pub coefficients: usize,
    pub chunks: usize,
}

/// Coefficient ordering shared by sender and receiver: plane, chunk row,
/// chunk column, then row-major inside the chunk.
fn chunk_layout(height: usize, width: usize, chunk: usize) -> Vec<Vec<(usize, usize)>> {
    let mut chunks = Vec::new();
    for cy in (0..height).step_by(chunk) {
        for cx in (0..width).step_by(chunk) {
            let mut members = Vec::new();
            for y in cy..(cy + chunk).min(height) {
                for x in cx..(cx + chunk).min(width) {
                    members.push((y, x));
                }
            }
            chunks.push(members);
        }
    }
    chunks
}

pub fn softcast_pipeline<R: Rng + ?Sized>(
    image: &Image,
    snr_db: f64,
    link: &LinkConfig,
    config: &SoftCastConfig,
    rng: &mut R,
) -> Result<(ReconstructionOutcome, SymbolBudget, SoftCastTrace)> {
    let (h, w) = (image.height(), image.width());
    let dct = Dct2d::new(h, w);
    let layout = chunk_layout(h, w, config.chunk.max(1));

    let mut planes = Vec::with_capacity(CHANNELS);
    for c in 0..CHANNELS {
        let plane = DMatrix::from_fn(h, w, |y, x| image.get(c, y, x) as f64);
        planes.push(dct.forward(&plane));
    }

    // (plane, chunk) energies and gains
    let mut energies = Vec::with_capacity(CHANNELS * layout.len());
    for coeffs in &planes {
        for members in &layout {
            let e = members.iter().map(|&(y, x)| coeffs[(y, x)].powi(2)).sum::<f64>() / members.len() as f64;
            energies.push(e);
        }
    }
    let total_coeffs = CHANNELS * h * w;
    let complex_symbols = total_coeffs.div_ceil(2);
    let weighted: f64 = energies
        .iter()
        .zip(layout.iter().cycle())
        .map(|(e, m)| m.len() as f64 * e.sqrt())
        .sum();
    let kappa = if weighted > 0.0 {
        (link.power * complex_symbols as f64 / weighted).sqrt()
    } else {
        0.0
    };
    let gains: Vec<f64> = energies
        .iter()
        .map(|&e| if e > 0.0 { kappa * e.powf(-0.25) } else { 0.0 })
        .collect();

    let mut reals = Vec::with_capacity(2 * complex_symbols);
    for (p, coeffs) in planes.iter().enumerate() {
        for (ci, members) in layout.iter().enumerate() {
            let g = gains[p * layout.len() + ci];
            reals.extend(members.iter().map(|&(y, x)| g * coeffs[(y, x)]));
        }
    }
    reals.resize(2 * complex_symbols, 0.0);
    let symbols: Vec<Complex64> = reals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let received = transmit(&symbols, snr_db, link, rng)?;

    let mut estimates = planes
        .iter()
        .map(|c| DMatrix::zeros(c.nrows(), c.ncols()))
        .collect::<Vec<DMatrix<f64>>>();
    let mut k = 0;
    for (p, est) in estimates.iter_mut().enumerate() {
        for (ci, members) in layout.iter().enumerate() {
            let idx = p * layout.len() + ci;
            let (g, lambda) = (gains[idx], energies[idx]);
            for &(y, x) in members {
                let r = received[k / 2];
                let value = if k % 2 == 0 { r.value.re } else { r.value.im };
                let mu = r.gain;
                let noise = r.disturbance_variance / 2.0;
                let denom = mu * mu * g * g * lambda + noise;
                est[(y, x)] = if denom > 0.0 {
                    mu * g * lambda / denom * value
                } else {
                    0.0
                };
                k += 1;
            }
        }
    }

    let mut recon = Image::filled(h, w, [0.0; 3]);
    for (c, est) in estimates.iter().enumerate() {
        let plane = dct.inverse(est);
        for y in 0..h {
            for x in 0..w {
                recon.set(c, y, x, plane[(y, x)].clamp(0.0, 1.0) as f32);
            }
        }
    }
    let trace = SoftCastTrace {
        coefficients: total_coeffs,
        chunks: energies.len(),
    };
    let budget = count_symbols(&PipelineTrace::SoftCast(trace.clone()));
    let p = psnr(image, &recon);
    Ok((
        ReconstructionOutcome {
            image: Some(recon),
            failed: false,
            psnr: Some(p),
            bit_exact: false,
        },
        budget,
        trace,
    ))
}
