//! Differentiable uplink: a batch of per-sample effective links applied to
//! symbol tensors, `X̂ = A·X + E` with `A = W·H` and `E = W·N` fixed.

use candle_core::{DType, Device, Tensor};
use cosc_core::channel::{sample_channel, snr_to_noise_variance, EffectiveLink, NoiseSpec};
use rand::Rng;

use crate::{NnError, Result};

#[derive(Debug, Clone)]
pub struct LinkBatch {
    /// `(k, 2N, 2N)` real block form of the effective gain.
    gain: Tensor,
    /// `(k, N, 2B)` interleaved post-detection noise.
    noise: Tensor,
    users: usize,
    symbols: usize,
}

impl LinkBatch {
    pub fn from_links(links: &[EffectiveLink], dtype: DType) -> Result<Self> {
        let first = links.first().ok_or_else(|| NnError::shape("empty link batch"))?;
        let (n, b) = (first.users(), first.symbols());
        let mut gain = Vec::with_capacity(links.len() * 4 * n * n);
        let mut noise = Vec::with_capacity(links.len() * n * 2 * b);
        for l in links {
            if l.users() != n || l.symbols() != b {
                return Err(NnError::shape("links in one batch must share N and B"));
            }
            let a = l.real_gain();
            for r in 0..2 * n {
                for c in 0..2 * n {
                    gain.push(a[(r, c)]);
                }
            }
            for u in 0..n {
                for s in 0..b {
                    let z = l.noise[(u, s)];
                    noise.push(z.re);
                    noise.push(z.im);
                }
            }
        }
        let k = links.len();
        Ok(Self {
            gain: Tensor::from_vec(gain, (k, 2 * n, 2 * n), &Device::Cpu)?.to_dtype(dtype)?,
            noise: Tensor::from_vec(noise, (k, n, 2 * b), &Device::Cpu)?.to_dtype(dtype)?,
            users: n,
            symbols: b,
        })
    }

    /// Fresh fading and noise per sample at the given per-sample SNRs.
    pub fn draw<R: Rng + ?Sized>(
        snr_db: &[f64],
        users: usize,
        antennas: usize,
        symbols: usize,
        power: f64,
        dtype: DType,
        rng: &mut R,
    ) -> Result<Self> {
        let links = draw_links(snr_db, users, antennas, symbols, power, rng)?;
        Self::from_links(&links, dtype)
    }

    pub fn len(&self) -> usize {
        self.gain.dims()[0]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies the links to `(k, N, 2B)` interleaved symbols.
    pub fn apply(&self, x: &Tensor) -> Result<Tensor> {
        let (k, n, w) = x.dims3()?;
        if k != self.len() || n != self.users || w != 2 * self.symbols {
            return Err(NnError::shape(format!(
                "link batch of {} × ({}, {}) cannot take symbols {:?}",
                self.len(),
                self.users,
                2 * self.symbols,
                x.dims()
            )));
        }
        let b = self.symbols;
        // (k, N, B, 2) -> (k, B, 2, N) -> (k, B, 2N) ordered [Re x; Im x]
        let z = x.reshape((k, n, b, 2))?.permute((0, 2, 3, 1))?.reshape((k, b, 2 * n))?;
        let y = z.matmul(&self.gain.transpose(1, 2)?)?;
        let y = y.reshape((k, b, 2, n))?.permute((0, 3, 1, 2))?.reshape((k, n, 2 * b))?;
        Ok((y + &self.noise)?)
    }
}

pub fn draw_links<R: Rng + ?Sized>(
    snr_db: &[f64],
    users: usize,
    antennas: usize,
    symbols: usize,
    power: f64,
    rng: &mut R,
) -> Result<Vec<EffectiveLink>> {
    snr_db
        .iter()
        .map(|&snr| {
            let sigma2 = snr_to_noise_variance(NoiseSpec::new(snr, power));
            let chan = sample_channel(users, antennas, sigma2, rng)?;
            Ok(EffectiveLink::draw(&chan, power, symbols, rng)?)
        })
        .collect()
}
