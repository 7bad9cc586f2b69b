//! Multi-user uplink: N single-antenna transmitters, an M-antenna receiver,
//! block-flat Rayleigh fading, additive complex Gaussian noise and linear
//! MMSE separation with perfect CSI.
//!
//! Real-valued symbol vectors use the interleaved layout: element `2k` is the
//! real part and element `2k + 1` the imaginary part of complex symbol `k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `B` complex channel symbols stored as `2B` interleaved reals.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    values: Vec<f64>,
}

impl SymbolBlock {
    pub fn from_interleaved(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(Error::shape(format!(
                "symbol block needs an even, nonzero length, got {}",
                values.len()
            )));
        }
        Ok(Self { values })
    }

    pub fn from_symbols(symbols: &[Complex64]) -> Result<Self> {
        Self::from_interleaved(symbols.iter().flat_map(|s| [s.re, s.im]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of complex symbols `B`.
    pub fn symbol_count(&self) -> usize {
        self.values.len() / 2
    }

    pub fn symbol(&self, k: usize) -> Complex64 {
        Complex64::new(self.values[2 * k], self.values[2 * k + 1])
    }

    pub fn symbols(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1]))
    }

    /// `(1/B) Σ |x_k|²`
    pub fn average_power(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.symbol_count() as f64
    }
}

/// Scales `raw` so that the average complex-symbol power equals `power`.
pub fn normalize_power(raw: &[f64], power: f64) -> Result<SymbolBlock> {
    if raw.is_empty() || raw.len() % 2 != 0 {
        return Err(Error::shape(format!(
            "raw symbol vector needs an even, nonzero length, got {}",
            raw.len()
        )));
    }
    let energy: f64 = raw.iter().map(|v| v * v).sum();
    if energy <= 0.0 || !energy.is_finite() {
        return Err(Error::DegenerateSymbols);
    }
    let symbols = (raw.len() / 2) as f64;
    let scale = (power * symbols / energy).sqrt();
    SymbolBlock::from_interleaved(raw.iter().map(|v| v * scale).collect())
}

/// Transmit SNR in dB together with the per-user power budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub power: f64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, power: f64) -> Self {
        Self { snr_db, power }
    }
}

/// `σ² = P / 10^(snr_db / 10)`.
pub fn snr_to_noise_variance(spec: NoiseSpec) -> f64 {
    assert!(spec.power > 0.0, "power budget must be positive");
    spec.power / 10f64.powf(spec.snr_db / 10.0)
}

/// One fading realization `H` (M×N) plus the receiver noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    gains: DMatrix<Complex64>,
    noise_variance: f64,
}

impl ChannelRealization {
    pub fn new(gains: DMatrix<Complex64>, noise_variance: f64) -> Result<Self> {
        if gains.nrows() == 0 || gains.ncols() == 0 {
            return Err(Error::shape("channel matrix must be non-empty"));
        }
        if !(noise_variance >= 0.0) {
            return Err(Error::config("noise_variance", "must be non-negative"));
        }
        Ok(Self { gains, noise_variance })
    }

    pub fn gains(&self) -> &DMatrix<Complex64> {
        &self.gains
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn antennas(&self) -> usize {
        self.gains.nrows()
    }

    pub fn users(&self) -> usize {
        self.gains.ncols()
    }

    pub fn with_noise_variance(mut self, noise_variance: f64) -> Self {
        self.noise_variance = noise_variance;
        self
    }

    /// Reorders the user columns of `H`; column `j` of the result is column
    /// `order[j]` of `self`.
    pub fn permute_users(&self, order: &[usize]) -> Self {
        let gains = DMatrix::from_fn(self.antennas(), order.len(), |r, c| self.gains[(r, order[c])]);
        Self {
            gains,
            noise_variance: self.noise_variance,
        }
    }
}

/// Experiment-log form: complex entries as `[re, im]` pairs, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub antennas: usize,
    pub users: usize,
    pub noise_variance: f64,
    pub gains: Vec<[f64; 2]>,
}

impl From<&ChannelRealization> for ChannelRecord {
    fn from(chan: &ChannelRealization) -> Self {
        let mut gains = Vec::with_capacity(chan.antennas() * chan.users());
        for r in 0..chan.antennas() {
            for c in 0..chan.users() {
                let h = chan.gains[(r, c)];
                gains.push([h.re, h.im]);
            }
        }
        Self {
            antennas: chan.antennas(),
            users: chan.users(),
            noise_variance: chan.noise_variance,
            gains,
        }
    }
}

impl TryFrom<ChannelRecord> for ChannelRealization {
    type Error = Error;

    fn try_from(rec: ChannelRecord) -> Result<Self> {
        if rec.gains.len() != rec.antennas * rec.users {
            return Err(Error::shape(format!(
                "channel record holds {} gains for a {}x{} matrix",
                rec.gains.len(),
                rec.antennas,
                rec.users
            )));
        }
        let gains = DMatrix::from_row_iterator(
            rec.antennas,
            rec.users,
            rec.gains.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        ChannelRealization::new(gains, rec.noise_variance)
    }
}

impl Serialize for ChannelRealization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChannelRealization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = ChannelRecord::deserialize(d)?;
        ChannelRealization::try_from(rec).map_err(serde::de::Error::custom)
    }
}

/// Draws a circularly-symmetric complex Gaussian with variance `variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// i.i.d. CN(0,1) fading for `users` transmitters and `antennas` receive
/// antennas. Entries are drawn column by column.
pub fn sample_channel<R: Rng + ?Sized>(
    users: usize,
    antennas: usize,
    noise_variance: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if users == 0 || antennas == 0 {
        return Err(Error::config("users/antennas", "must be at least 1"));
    }
    let mut gains = DMatrix::zeros(antennas, users);
    for c in 0..users {
        for r in 0..antennas {
            gains[(r, c)] = complex_gaussian(rng, 1.0);
        }
    }
    ChannelRealization::new(gains, noise_variance)
}

/// M×B matrix of CN(0, σ²) noise samples, drawn symbol time by symbol time.
pub fn sample_noise<R: Rng + ?Sized>(
    antennas: usize,
    symbols: usize,
    noise_variance: f64,
    rng: &mut R,
) -> DMatrix<Complex64> {
    let mut noise = DMatrix::zeros(antennas, symbols);
    if noise_variance == 0.0 {
        return noise;
    }
    for b in 0..symbols {
        for m in 0..antennas {
            noise[(m, b)] = complex_gaussian(rng, noise_variance);
        }
    }
    noise
}

/// Stacks N user blocks into the N×B complex transmit matrix.
pub fn stack_blocks(blocks: &[SymbolBlock]) -> Result<DMatrix<Complex64>> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::shape("at least one user block is required"))?;
    let len = first.symbol_count();
    if let Some(bad) = blocks.iter().find(|b| b.symbol_count() != len) {
        return Err(Error::shape(format!(
            "users transmit different block lengths ({} vs {})",
            len,
            bad.symbol_count()
        )));
    }
    Ok(DMatrix::from_fn(blocks.len(), len, |u, k| blocks[u].symbol(k)))
}

/// `Y = H X + N`, one column per symbol time.
pub fn apply_channel<R: Rng + ?Sized>(
    blocks: &[SymbolBlock],
    chan: &ChannelRealization,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    let x = stack_blocks(blocks)?;
    if x.nrows() != chan.users() {
        return Err(Error::shape(format!(
            "{} user blocks for a channel with {} users",
            x.nrows(),
            chan.users()
        )));
    }
    let noise = sample_noise(chan.antennas(), x.ncols(), chan.noise_variance, rng);
    Ok(&chan.gains * x + noise)
}

fn numerical_rank(h: &DMatrix<Complex64>) -> usize {
    let sv = h.clone().svd(false, false).singular_values;
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    let tol = largest * 1e-12 * h.nrows().max(h.ncols()) as f64;
    sv.iter().filter(|&&s| s > tol).count()
}

/// The N×M linear MMSE filter `(Hᴴ H + (σ²/P) I)⁻¹ Hᴴ`.
pub fn mmse_filter(chan: &ChannelRealization, power: f64) -> Result<DMatrix<Complex64>> {
    let h = &chan.gains;
    if h.nrows() < h.ncols() {
        return Err(Error::shape(format!(
            "MMSE detection needs at least as many antennas ({}) as users ({})",
            h.nrows(),
            h.ncols()
        )));
    }
    if chan.noise_variance == 0.0 && numerical_rank(h) < h.ncols() {
        return Err(Error::SingularChannel);
    }
    let hh = h.adjoint();
    let reg = Complex64::new(chan.noise_variance / power, 0.0);
    let gram = &hh * h + DMatrix::from_diagonal_element(h.ncols(), h.ncols(), reg);
    let inv = gram.try_inverse().ok_or(Error::SingularChannel)?;
    Ok(inv * hh)
}

/// Per-user recovered symbols, N×2B interleaved reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedSymbols {
    pub values: DMatrix<f64>,
}

impl DetectedSymbols {
    pub fn from_complex(x: &DMatrix<Complex64>) -> Self {
        let values = DMatrix::from_fn(x.nrows(), 2 * x.ncols(), |u, j| {
            let s = x[(u, j / 2)];
            if j % 2 == 0 {
                s.re
            } else {
                s.im
            }
        });
        Self { values }
    }

    pub fn users(&self) -> usize {
        self.values.nrows()
    }

    pub fn user(&self, u: usize) -> Vec<f64> {
        self.values.row(u).iter().copied().collect()
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.values.nrows(), self.values.ncols() / 2, |u, k| {
            Complex64::new(self.values[(u, 2 * k)], self.values[(u, 2 * k + 1)])
        })
    }
}

/// `X̂ = (Hᴴ H + (σ²/P) I)⁻¹ Hᴴ Y`, de-interleaved into reals.
pub fn mmse_detect(y: &DMatrix<Complex64>, chan: &ChannelRealization, power: f64) -> Result<DetectedSymbols> {
    if y.nrows() != chan.antennas() {
        return Err(Error::shape(format!(
            "received matrix has {} rows for {} antennas",
            y.nrows(),
            chan.antennas()
        )));
    }
    let w = mmse_filter(chan, power)?;
    Ok(DetectedSymbols::from_complex(&(w * y)))
}

/// Channel followed by MMSE detection, collapsed for a fixed `H` and noise
/// draw into the affine map `X̂ = A X + E` with `A = W H` and `E = W N`.
///
/// Because the map is affine in `X`, its Jacobian is `A` and gradients can
/// flow through it during end-to-end training.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLink {
    pub gain: DMatrix<Complex64>,
    pub noise: DMatrix<Complex64>,
}

impl EffectiveLink {
    pub fn draw<R: Rng + ?Sized>(chan: &ChannelRealization, power: f64, symbols: usize, rng: &mut R) -> Result<Self> {
        let w = mmse_filter(chan, power)?;
        let noise = sample_noise(chan.antennas(), symbols, chan.noise_variance, rng);
        Ok(Self {
            gain: &w * &chan.gains,
            noise: w * noise,
        })
    }

    pub fn users(&self) -> usize {
        self.gain.nrows()
    }

    pub fn symbols(&self) -> usize {
        self.noise.ncols()
    }

    pub fn apply(&self, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        if x.nrows() != self.users() || x.ncols() != self.symbols() {
            return Err(Error::shape(format!(
                "link expects {}x{} symbols, got {}x{}",
                self.users(),
                self.symbols(),
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(&self.gain * x + &self.noise)
    }

    /// Real 2N×2N form of `A` acting on `[Re x; Im x]`.
    pub fn real_gain(&self) -> DMatrix<f64> {
        complex_to_real_block(&self.gain)
    }

    /// Real 2N×B form of `E` laid out as `[Re E; Im E]`.
    pub fn real_noise(&self) -> DMatrix<f64> {
        let n = self.users();
        DMatrix::from_fn(2 * n, self.symbols(), |r, b| {
            if r < n {
                self.noise[(r, b)].re
            } else {
                self.noise[(r - n, b)].im
            }
        })
    }
}

/// `[[Re A, -Im A], [Im A, Re A]]`
pub fn complex_to_real_block(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = a.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = a[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Post-detection statistics for user `k`: `x̂_k = μ x_k + (interference + noise)`
/// where the disturbance has total variance `v` (complex).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionStats {
    pub gain: f64,
    pub disturbance_variance: f64,
}

/// Bias and disturbance variance of the MMSE output for each user, assuming
/// every user transmits i.i.d. symbols with power `power`.
pub fn mmse_stats(chan: &ChannelRealization, power: f64) -> Result<Vec<DetectionStats>> {
    let w = mmse_filter(chan, power)?;
    let a = &w * &chan.gains;
    let n = chan.users();
    Ok((0..n)
        .map(|k| {
            let interference: f64 = (0..n).filter(|&j| j != k).map(|j| a[(k, j)].norm_sqr() * power).sum();
            let noise: f64 = w.row(k).iter().map(|c| c.norm_sqr()).sum::<f64>() * chan.noise_variance;
            DetectionStats {
                gain: a[(k, k)].re,
                disturbance_variance: interference + noise,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalize_unit_block() {
        let block = normalize_power(&[1.0, 1.0, 1.0, 1.0], 1.0).unwrap();
        let expect = 1.0 / 2f64.sqrt();
        for v in block.values() {
            assert_relative_eq!(*v, expect, epsilon = 1e-12);
        }
        assert_relative_eq!(block.average_power(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let block = normalize_power(&[0.3, -1.2, 2.0, 0.1, -0.4, 0.9], 1.0).unwrap();
        let again = normalize_power(block.values(), 1.0).unwrap();
        for (a, b) in block.values().iter().zip(again.values()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn normalize_zero_is_degenerate() {
        assert!(matches!(normalize_power(&[0.0; 4], 1.0), Err(Error::DegenerateSymbols)));
        assert!(matches!(normalize_power(&[1.0; 3], 1.0), Err(Error::Shape(_))));
    }

    #[test]
    fn snr_conversion() {
        assert_relative_eq!(snr_to_noise_variance(NoiseSpec::new(0.0, 1.0)), 1.0);
        assert_relative_eq!(snr_to_noise_variance(NoiseSpec::new(10.0, 1.0)), 0.1, epsilon = 1e-15);
        // 10^0.3 = 1.99526231...
        assert_relative_eq!(
            snr_to_noise_variance(NoiseSpec::new(-3.0, 1.0)),
            1.995_262_314_968_879_5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn channel_shape_and_determinism() {
        let a = sample_channel(2, 4, 0.1, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_channel(2, 4, 0.1, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a.gains().shape(), (4, 2));
        assert_eq!(a, b);
    }

    #[test]
    fn identity_channel_passes_symbols() {
        let chan = ChannelRealization::new(DMatrix::identity(2, 2), 0.0).unwrap();
        let blocks = vec![
            SymbolBlock::from_symbols(&[c(1.0, 0.0), c(0.0, -1.0)]).unwrap(),
            SymbolBlock::from_symbols(&[c(0.5, 0.5), c(-1.0, 2.0)]).unwrap(),
        ];
        let y = apply_channel(&blocks, &chan, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(y, stack_blocks(&blocks).unwrap());
    }

    #[test]
    fn scalar_channel_is_linear() {
        let chan = ChannelRealization::new(DMatrix::from_element(1, 1, c(2.0, 0.0)), 0.0).unwrap();
        let blocks = vec![SymbolBlock::from_symbols(&[c(1.0, 0.0)]).unwrap()];
        let y = apply_channel(&blocks, &chan, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(y[(0, 0)], c(2.0, 0.0));
    }

    #[test]
    fn mismatched_block_lengths() {
        let chan = sample_channel(2, 4, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let blocks = vec![
            SymbolBlock::from_interleaved(vec![1.0; 4]).unwrap(),
            SymbolBlock::from_interleaved(vec![1.0; 6]).unwrap(),
        ];
        let err = apply_channel(&blocks, &chan, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn noiseless_square_detection_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chan = sample_channel(2, 2, 0.0, &mut rng).unwrap();
        let blocks = vec![
            normalize_power(&[0.3, 1.0, -0.7, 0.2], 1.0).unwrap(),
            normalize_power(&[1.5, -0.4, 0.1, 0.9], 1.0).unwrap(),
        ];
        let y = apply_channel(&blocks, &chan, &mut rng).unwrap();
        let xhat = mmse_detect(&y, &chan, 1.0).unwrap();
        for u in 0..2 {
            for (a, b) in xhat.user(u).iter().zip(blocks[u].values()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn huge_noise_drives_estimate_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let chan = sample_channel(2, 4, 1e9, &mut rng).unwrap();
        let y = DMatrix::from_element(4, 3, c(1.0, -1.0));
        let xhat = mmse_detect(&y, &chan, 1.0).unwrap();
        assert!(xhat.values.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn rank_deficient_noiseless_is_singular() {
        let col = [c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0), c(2.0, 0.0)];
        let gains = DMatrix::from_fn(4, 2, |r, _| col[r]);
        let chan = ChannelRealization::new(gains, 0.0).unwrap();
        let y = DMatrix::from_element(4, 1, c(1.0, 0.0));
        assert!(matches!(mmse_detect(&y, &chan, 1.0), Err(Error::SingularChannel)));
        // With noise the regularizer makes it solvable.
        let noisy = chan.with_noise_variance(0.1);
        assert!(mmse_detect(&y, &noisy, 1.0).is_ok());
    }

    #[test]
    fn fewer_antennas_than_users_rejected() {
        let chan = sample_channel(3, 2, 0.1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(mmse_filter(&chan, 1.0), Err(Error::Shape(_))));
    }

    #[test]
    fn effective_link_matches_two_step_path() {
        let chan = sample_channel(2, 4, 0.3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let blocks = vec![
            normalize_power(&[0.3, 1.0, -0.7, 0.2, 0.5, 0.5], 1.0).unwrap(),
            normalize_power(&[1.5, -0.4, 0.1, 0.9, -1.0, 0.0], 1.0).unwrap(),
        ];
        let y = apply_channel(&blocks, &chan, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let two_step = mmse_detect(&y, &chan, 1.0).unwrap();
        let link = EffectiveLink::draw(&chan, 1.0, 3, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let one_step = DetectedSymbols::from_complex(&link.apply(&stack_blocks(&blocks).unwrap()).unwrap());
        for (a, b) in two_step.values.iter().zip(one_step.values.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn real_block_form_matches_complex_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = DMatrix::from_fn(2, 2, |_, _| complex_gaussian(&mut rng, 1.0));
        let x = DMatrix::from_fn(2, 1, |_, _| complex_gaussian(&mut rng, 1.0));
        let y = &a * &x;
        let xr = DMatrix::from_fn(4, 1, |r, _| if r < 2 { x[(r, 0)].re } else { x[(r - 2, 0)].im });
        let yr = complex_to_real_block(&a) * xr;
        for r in 0..2 {
            assert!((yr[(r, 0)] - y[(r, 0)].re).abs() < 1e-12);
            assert!((yr[(r + 2, 0)] - y[(r, 0)].im).abs() < 1e-12);
        }
    }

    #[test]
    fn channel_record_round_trip() {
        let chan = sample_channel(2, 4, 0.25, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let json = serde_json::to_string(&chan).unwrap();
        let back: ChannelRealization = serde_json::from_str(&json).unwrap();
        assert_eq!(chan, back);
    }

    #[test]
    fn mmse_stats_noiseless_full_rank() {
        let chan = sample_channel(2, 4, 0.0, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        for s in mmse_stats(&chan, 1.0).unwrap() {
            assert!((s.gain - 1.0).abs() < 1e-9);
            assert!(s.disturbance_variance < 1e-18);
        }
    }
}
