use std::f64::consts::PI;

use aosense::quantum::{infer_loss_and_squeeze, quadrature_variance, SqueezerConfig};
use proptest::prelude::*;

fn config(r: f64, eta: f64, pump_phase: f64, jitter: f64) -> SqueezerConfig {
    SqueezerConfig {
        source_squeeze_parameter: r,
        total_efficiency: eta,
        pump_phase,
        rms_phase_noise: jitter,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn uncertainty_product_is_at_least_one(
        r in 0.0f64..3.0, eta in 0.01f64..=1.0, phase in -10.0f64..10.0, jitter in 0.0f64..1.0
    ) {
        let pair = quadrature_variance(&config(r, eta, phase, jitter));
        prop_assert!(pair.squeezed.value() * pair.anti_squeezed.value() >= 1.0 - 1e-12);
    }

    #[test]
    fn loss_and_squeeze_round_trip(r in 0.05f64..3.0, eta in 0.05f64..=1.0) {
        let pair = quadrature_variance(&config(r, eta, 0.0, 0.0));
        let est = infer_loss_and_squeeze(pair.squeezed.value(), pair.anti_squeezed.value()).unwrap();
        prop_assert!((est.total_efficiency - eta).abs() < 1e-9, "{} vs {}", est.total_efficiency, eta);
        prop_assert!((est.squeeze_parameter - r).abs() < 1e-9 * r.max(1.0) || eta > 1.0 - 1e-6);
    }

    #[test]
    fn more_loss_means_less_squeezing(r in 0.1f64..3.0, eta in 0.05f64..0.99, d in 0.001f64..0.01) {
        let better = quadrature_variance(&config(r, eta + d, 0.0, 0.0)).squeezed.value();
        let worse = quadrature_variance(&config(r, eta, 0.0, 0.0)).squeezed.value();
        prop_assert!(better < worse);
    }

    #[test]
    fn phase_jitter_degrades_the_squeezed_quadrature(r in 0.1f64..3.0, eta in 0.1f64..=1.0, sigma in 0.01f64..0.5) {
        let clean = quadrature_variance(&config(r, eta, 0.0, 0.0));
        let noisy = quadrature_variance(&config(r, eta, 0.0, sigma));
        prop_assert!(noisy.squeezed.value() > clean.squeezed.value());
        prop_assert!(noisy.anti_squeezed.value() < clean.anti_squeezed.value());
    }
}

#[test]
fn pump_phase_of_pi_swaps_the_quadratures() {
    let a = quadrature_variance(&config(1.868, 0.922, 0.0, 0.0));
    let b = quadrature_variance(&config(1.868, 0.922, PI, 0.0));
    assert!((a.squeezed.value() - b.anti_squeezed.value()).abs() < 1e-12);
    assert!((a.anti_squeezed.value() - b.squeezed.value()).abs() < 1e-12);
}

#[test]
fn no_squeezing_is_shot_noise() {
    let pair = quadrature_variance(&config(0.0, 0.5, 1.0, 0.2));
    assert!((pair.squeezed.value() - 1.0).abs() < 1e-15);
    assert!((pair.anti_squeezed.value() - 1.0).abs() < 1e-15);
}
