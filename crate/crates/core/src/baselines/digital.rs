//! JPEG source coding, rate-3/4 LDPC channel coding and BPSK modulation.

use std::io::Cursor;

use ::image::codecs::jpeg::JpegEncoder;
use ::image::ImageFormat;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ldpc::LdpcCode;
use super::{count_symbols, transmit, LinkConfig, PipelineTrace, ReconstructionOutcome, SymbolBudget};
use crate::image::{psnr, Image};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigitalConfig {
    pub jpeg_quality: u8,
    pub max_iterations: usize,
}

impl Default for DigitalConfig {
    fn default() -> Self {
        Self {
            jpeg_quality: 90,
            max_iterations: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitalTrace {
    pub jpeg_bytes: usize,
    pub codewords: usize,
    pub coded_bits: usize,
    /// First codeword that failed to converge, if any. Decoding stops there.
    pub failed_codeword: Option<usize>,
}

pub fn encode_jpeg(image: &Image, quality: u8) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    JpegEncoder::new_with_quality(&mut bytes, quality).encode_image(&image.to_rgb8())?;
    Ok(bytes)
}

pub fn decode_jpeg(bytes: &[u8]) -> Option<Image> {
    ::image::load(Cursor::new(bytes), ImageFormat::Jpeg)
        .ok()
        .map(|img| Image::from_rgb8(&img.to_rgb8()))
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1))
        .collect()
}

fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect()
}

/// BPSK on each real dimension: bit 0 → `+a`, bit 1 → `-a`, `a = √(P/2)`.
pub fn bpsk_modulate(bits: &[u8], power: f64) -> Vec<Complex64> {
    let a = (power / 2.0).sqrt();
    let level = |b: u8| if b == 0 { a } else { -a };
    bits.chunks(2)
        .map(|p| Complex64::new(level(p[0]), p.get(1).map_or(a, |&b| level(b))))
        .collect()
}

/// Hard BPSK decisions, the inverse of [`bpsk_modulate`] on a clean channel.
pub fn bpsk_hard_demap(symbols: &[Complex64], bits: usize) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|s| [u8::from(s.re < 0.0), u8::from(s.im < 0.0)])
        .take(bits)
        .collect()
}

/// Bit LLRs from bias-aware MMSE outputs (positive favours bit 0).
pub fn bpsk_llrs(received: &[super::ReceivedSymbol], power: f64, bits: usize) -> Vec<f64> {
    let a = (power / 2.0).sqrt();
    received
        .iter()
        .flat_map(|r| {
            let per_dim = (r.disturbance_variance / 2.0).max(1e-300);
            let scale = 2.0 * r.gain * a / per_dim;
            [
                (scale * r.value.re).clamp(-50.0, 50.0),
                (scale * r.value.im).clamp(-50.0, 50.0),
            ]
        })
        .take(bits)
        .collect()
}

/// JPEG → LDPC → BPSK → N-user channel → MMSE → soft demap → BP → JPEG.
pub fn digital_pipeline<R: Rng + ?Sized>(
    image: &Image,
    snr_db: f64,
    link: &LinkConfig,
    config: &DigitalConfig,
    code: &LdpcCode,
    rng: &mut R,
) -> Result<(ReconstructionOutcome, SymbolBudget, DigitalTrace)> {
    let jpeg = encode_jpeg(image, config.jpeg_quality)?;
    let mut bits = bytes_to_bits(&jpeg);
    let info_bits = bits.len();
    let codewords = info_bits.div_ceil(code.k());
    bits.resize(codewords * code.k(), 0);

    let mut coded = Vec::with_capacity(codewords * code.n());
    for msg in bits.chunks(code.k()) {
        coded.extend(code.encode(msg)?);
    }
    let symbols = bpsk_modulate(&coded, link.power);
    let received = transmit(&symbols, snr_db, link, rng)?;
    let llrs = bpsk_llrs(&received, link.power, coded.len());

    let mut decoded = Vec::with_capacity(bits.len());
    let mut failed_codeword = None;
    for (i, block) in llrs.chunks(code.n()).enumerate() {
        let out = code.decode(block, config.max_iterations)?;
        if !out.converged {
            failed_codeword = Some(i);
            break;
        }
        decoded.extend(out.message);
    }
    let trace = DigitalTrace {
        jpeg_bytes: jpeg.len(),
        codewords,
        coded_bits: coded.len(),
        failed_codeword,
    };
    let budget = count_symbols(&PipelineTrace::Digital(trace.clone()));

    let outcome = if failed_codeword.is_some() {
        ReconstructionOutcome {
            image: None,
            failed: true,
            psnr: None,
            bit_exact: false,
        }
    } else {
        decoded.truncate(info_bits);
        let bytes = bits_to_bytes(&decoded);
        let bit_exact = bytes == jpeg;
        match decode_jpeg(&bytes) {
            Some(img) if img.height() == image.height() && img.width() == image.width() => {
                let p = psnr(image, &img);
                ReconstructionOutcome {
                    image: Some(img),
                    failed: false,
                    psnr: Some(p),
                    bit_exact,
                }
            }
            _ => ReconstructionOutcome {
                image: None,
                failed: true,
                psnr: None,
                bit_exact,
            },
        }
    };
    Ok((outcome, budget, trace))
}
