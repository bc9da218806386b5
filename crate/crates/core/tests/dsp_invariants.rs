use aosense::interferometer::{synthesize, InterferometerConfig, SynthesisRequest, TimeSeries};
use aosense::spectrum::{apply_vbw, averaged_psd, extract_peak, segment_length, SpectrumUnit};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn white(fs: f64, n: usize, psd: f64, seed: u64) -> TimeSeries {
    let sigma = (psd * fs / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TimeSeries {
        sample_rate: fs,
        duration: n as f64 / fs,
        seed,
        config_digest: String::new(),
        samples: (0..n)
            .map(|_| sigma * Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect(),
    }
}

fn request(amplitude: f64, frequency: f64, noise_variance: f64, seed: u64) -> SynthesisRequest {
    SynthesisRequest {
        wavelength: 1550e-9,
        signal_amplitude: amplitude,
        signal_frequency: frequency,
        signal_phase: 0.0,
        noise_variance,
        sample_rate: 1e6,
        duration: 0.03,
        seed,
    }
}

#[test]
fn synthesized_noise_has_the_configured_density() {
    let cfg = InterferometerConfig::default();
    let ts = synthesize(&cfg, &request(0.0, 1e5, 0.3, 4)).unwrap();
    let psd = averaged_psd(&ts, 1e3, 20).unwrap();
    let expected = cfg.noise_psd(1550e-9, 0.3).unwrap();
    let band = psd.crop(2.5e5, 4.8e5);
    assert!(
        (band.mean() / expected - 1.0).abs() < 0.02,
        "{}",
        band.mean() / expected
    );
    assert_eq!(psd.unit, SpectrumUnit::Displacement);
}

#[test]
fn synthesis_is_deterministic_per_seed() {
    let cfg = InterferometerConfig::default();
    let a = synthesize(&cfg, &request(1e-12, 1e5, 1.0, 9)).unwrap();
    let b = synthesize(&cfg, &request(1e-12, 1e5, 1.0, 9)).unwrap();
    let c = synthesize(&cfg, &request(1e-12, 1e5, 1.0, 10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.samples, c.samples);
    assert_eq!(a.config_digest, b.config_digest);
}

#[test]
fn vbw_keeps_the_mean_and_line_power() {
    let fs = 1e6;
    let n = segment_length(fs, 1e3) * 20;
    let psd = averaged_psd(&white(fs, n, 1.0, 3), 1e3, 20).unwrap();
    let smooth = apply_vbw(&psd, 100.0).unwrap();
    let tail = |v: &[f64]| v[50..].iter().sum::<f64>() / (v.len() - 50) as f64;
    assert!((tail(&smooth.values) / tail(&psd.values) - 1.0).abs() < 0.02);
    assert_eq!(smooth.vbw, 100.0);
    assert!(apply_vbw(&psd, 2e3).is_err());
}

#[test]
fn peak_of_noisy_sinusoid_is_calibrated() {
    let cfg = InterferometerConfig {
        dark_noise_asd: 0.0,
        ..InterferometerConfig::default()
    };
    let req = SynthesisRequest {
        duration: segment_length(1e6, 1e3) as f64 * 20.0 / 1e6,
        ..request(1e-12, 1.5e5, 1.0, 5)
    };
    let ts = synthesize(&cfg, &req).unwrap();
    let trace = averaged_psd(&ts, 1e3, 20).unwrap().crop(1.5e5, 5e4);
    let peak = extract_peak(&trace, 1.5e5, 10).unwrap();
    let expected = 1e-12 / 2f64.sqrt() / 1e3f64.sqrt();
    assert!((peak.signal_asd / expected - 1.0).abs() < 0.05);
    let floor = cfg.noise_psd(1550e-9, 1.0).unwrap().sqrt();
    assert!((peak.noise_floor_asd / floor - 1.0).abs() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_holds(seed in any::<u64>(), log_psd in -32.0f64..-20.0, n_avg in 4usize..12) {
        let fs = 2e5;
        let n = segment_length(fs, 100.0) * n_avg;
        let ts = white(fs, n, 10f64.powf(log_psd), seed);
        let psd = averaged_psd(&ts, 100.0, n_avg).unwrap();
        let ratio = psd.integrated_power() / ts.variance();
        prop_assert!((ratio - 1.0).abs() < 0.05, "{}", ratio);
    }

    #[test]
    fn trace_scales_quadratically_with_amplitude(seed in any::<u64>(), k in 0.1f64..10.0) {
        let fs = 2e5;
        let n = segment_length(fs, 1e3) * 4;
        let a = white(fs, n, 1.0, seed);
        let mut b = a.clone();
        b.samples.iter_mut().for_each(|x| *x *= k);
        let pa = averaged_psd(&a, 1e3, 4).unwrap();
        let pb = averaged_psd(&b, 1e3, 4).unwrap();
        for (x, y) in pa.values.iter().zip(&pb.values) {
            prop_assert!((y - k * k * x).abs() <= 1e-9 * (k * k * x).abs() + 1e-300);
        }
    }
}
