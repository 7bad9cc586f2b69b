use cosc_core::channel::{
    apply_channel, complex_gaussian, mmse_detect, mmse_filter, mmse_stats, normalize_power, sample_channel,
    sample_noise, snr_to_noise_variance, ChannelRealization, EffectiveLink, NoiseSpec, SymbolBlock,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Explicit adjugate inverse of `HᴴH + s·I` for two users.
fn two_user_mmse(h: &DMatrix<Complex64>, s: f64) -> DMatrix<Complex64> {
    let m = h.nrows();
    let dot = |i: usize, j: usize| (0..m).map(|r| h[(r, i)].conj() * h[(r, j)]).sum::<Complex64>();
    let (a, b, cc, d) = (dot(0, 0) + s, dot(0, 1), dot(1, 0), dot(1, 1) + s);
    let det = a * d - b * cc;
    let inv = [[d / det, -b / det], [-cc / det, a / det]];
    DMatrix::from_fn(2, m, |u, r| inv[u][0] * h[(r, 0)].conj() + inv[u][1] * h[(r, 1)].conj())
}

#[test]
fn mmse_matches_closed_form_for_two_users() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for antennas in [2, 4] {
        for snr in [-6.0, 0.0, 18.0] {
            let sigma2 = snr_to_noise_variance(NoiseSpec::new(snr, 1.0));
            let chan = sample_channel(2, antennas, sigma2, &mut rng).unwrap();
            let got = mmse_filter(&chan, 1.0).unwrap();
            let want = two_user_mmse(chan.gains(), sigma2);
            assert!((got - want).iter().all(|z| z.norm() < 1e-9));
        }
    }
}

#[test]
fn hand_two_by_two_case() {
    // H = I, σ² = 1, P = 1: W = I/2.
    let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let w = mmse_filter(&ChannelRealization::new(h, 1.0).unwrap(), 1.0).unwrap();
    assert!((w[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
    assert!(w[(0, 1)].norm() < 1e-12);
}

#[test]
fn channel_entries_have_unit_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let draws = 100_000;
    let mean = (0..draws)
        .map(|_| complex_gaussian(&mut rng, 1.0).norm_sqr())
        .sum::<f64>()
        / draws as f64;
    assert!((mean - 1.0).abs() < 0.01, "E|h|² = {mean}");
}

#[test]
fn noise_power_matches_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for snr in [-6.0, 6.0, 18.0] {
        let sigma2 = snr_to_noise_variance(NoiseSpec::new(snr, 1.0));
        let n = sample_noise(1, 10_000, sigma2, &mut rng);
        let p = n.iter().map(|z| z.norm_sqr()).sum::<f64>() / 10_000.0;
        assert!((p / sigma2 - 1.0).abs() < 0.03, "{snr} dB: {p} vs {sigma2}");
    }
}

#[test]
fn singular_noiseless_channel_is_rejected() {
    let h = DMatrix::from_element(4, 2, c(1.0, 0.5));
    assert!(mmse_filter(&ChannelRealization::new(h, 0.0).unwrap(), 1.0).is_err());
}

#[test]
fn fewer_antennas_than_users_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let chan = sample_channel(3, 2, 0.1, &mut rng).unwrap();
    assert!(mmse_filter(&chan, 1.0).is_err());
}

fn raw_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}

proptest! {
    #[test]
    fn normalized_blocks_meet_the_budget(raw in (1usize..33).prop_flat_map(|b| raw_vec(2 * b)), power in 0.1f64..4.0) {
        let block = normalize_power(&raw, power).unwrap();
        prop_assert!((block.average_power() - power).abs() < 1e-6 * power);
    }

    #[test]
    fn noiseless_detection_recovers_symbols(seed in any::<u64>(), users in 1usize..4, extra in 0usize..3, b in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chan = sample_channel(users, users + extra, 0.0, &mut rng).unwrap();
        let blocks: Vec<SymbolBlock> = (0..users)
            .map(|_| normalize_power(&(0..2 * b).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>(), 1.0).unwrap())
            .collect();
        let y = apply_channel(&blocks, &chan, &mut rng).unwrap();
        let x = mmse_detect(&y, &chan, 1.0).unwrap();
        for (u, blk) in blocks.iter().enumerate() {
            for (a, e) in x.user(u).iter().zip(blk.values()) {
                prop_assert!((a - e).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn detection_is_permutation_equivariant(seed in any::<u64>(), snr in -6.0f64..18.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chan = sample_channel(3, 4, snr_to_noise_variance(NoiseSpec::new(snr, 1.0)), &mut rng).unwrap();
        let order = [2, 0, 1];
        let w = mmse_filter(&chan, 1.0).unwrap();
        let wp = mmse_filter(&chan.permute_users(&order), 1.0).unwrap();
        for (j, &src) in order.iter().enumerate() {
            for r in 0..4 {
                prop_assert!((wp[(j, r)] - w[(src, r)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn link_jacobian_matches_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chan = sample_channel(2, 4, 0.3, &mut rng).unwrap();
        let link = EffectiveLink::draw(&chan, 1.0, 1, &mut rng).unwrap();
        let x0 = DMatrix::from_fn(2, 1, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let real = |x: &DMatrix<Complex64>| {
            let y = link.apply(x).unwrap();
            vec![y[(0, 0)].re, y[(1, 0)].re, y[(0, 0)].im, y[(1, 0)].im]
        };
        let jac = link.real_gain();
        let h = 1e-6;
        for j in 0..4 {
            let bump = |sign: f64| {
                let mut x = x0.clone();
                let (u, imag) = (j % 2, j >= 2);
                x[(u, 0)] += if imag { c(0.0, sign * h) } else { c(sign * h, 0.0) };
                real(&x)
            };
            let (p, m) = (bump(1.0), bump(-1.0));
            for i in 0..4 {
                let fd = (p[i] - m[i]) / (2.0 * h);
                prop_assert!((fd - jac[(i, j)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn detection_error_does_not_grow_with_snr(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = sample_channel(2, 4, 1.0, &mut rng).unwrap();
        let mut last = f64::INFINITY;
        for snr in [-6.0, -3.0, 0.0, 6.0, 12.0, 18.0] {
            let chan = h.clone().with_noise_variance(snr_to_noise_variance(NoiseSpec::new(snr, 1.0)));
            let mse: f64 = mmse_stats(&chan, 1.0)
                .unwrap()
                .iter()
                .map(|s| (s.gain - 1.0).powi(2) + s.disturbance_variance)
                .sum();
            prop_assert!(mse <= last + 1e-12);
            last = mse;
        }
    }
}
