use cosc_core::baselines::{digital_pipeline, softcast_pipeline, DigitalConfig, LdpcCode, LinkConfig, SoftCastConfig};
use cosc_core::dataset::{render_capture, render_vehicle, VehicleSignature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ldpc_code_shape_and_round_trip() {
    let code = LdpcCode::ieee80211n_648_r34();
    assert_eq!((code.n(), code.k()), (648, 486));
    assert!((code.rate() - 0.75).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let msg: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encode(&msg).unwrap();
        assert!(code.syndrome_ok(&cw));
        // Strong, correct LLRs with a handful of flipped signs.
        let mut llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
        for i in (0..code.n()).step_by(97) {
            llr[i] = -llr[i] * 0.5;
        }
        let out = code.decode(&llr, 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.message, msg);
    }
}

#[test]
fn digital_budget_dwarfs_the_semantic_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sig = VehicleSignature::random(&mut rng);
    let image = render_capture(&sig, 1, 256, 128, 0.08, &mut rng);
    let (_, budget, trace) = digital_pipeline(
        &image,
        30.0,
        &LinkConfig::default(),
        &DigitalConfig::default(),
        &LdpcCode::ieee80211n_648_r34(),
        &mut rng,
    )
    .unwrap();
    assert!(
        budget.complex_symbols >= 16 * 10_000,
        "{} symbols, {} bytes",
        budget.complex_symbols,
        trace.jpeg_bytes
    );
    assert_eq!(budget.complex_symbols, trace.coded_bits.div_ceil(2));
}

#[test]
fn softcast_quality_improves_with_snr() {
    let link = LinkConfig::default();
    let cfg = SoftCastConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let images: Vec<_> = (0..10)
        .map(|i| render_vehicle(&VehicleSignature::random(&mut rng), i % 4, 32, &mut rng))
        .collect();
    let mut last = 0.0;
    for snr in [-6.0, 0.0, 6.0, 12.0, 18.0] {
        let mut total = 0.0;
        for _ in 0..10 {
            for img in &images {
                let (out, _, _) = softcast_pipeline(img, snr, &link, &cfg, &mut rng).unwrap();
                assert!(!out.failed);
                total += out.psnr.unwrap();
            }
        }
        let mean = total / 100.0;
        assert!(mean > last, "{snr} dB: {mean} <= {last}");
        last = mean;
    }
}

#[test]
fn digital_link_is_clean_at_high_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let code = LdpcCode::ieee80211n_648_r34();
    let image = render_vehicle(&VehicleSignature::random(&mut rng), 0, 32, &mut rng);
    let ok = (0..20)
        .filter(|_| {
            let (out, _, _) = digital_pipeline(
                &image,
                18.0,
                &LinkConfig::default(),
                &DigitalConfig::default(),
                &code,
                &mut rng,
            )
            .unwrap();
            out.bit_exact
        })
        .count();
    assert!(ok >= 18, "{ok}/20 bit-exact");
}
