//! Absorption coefficient from peak powers measured at several distances.
//!
//! The detected peak power falls as `10^(-alpha d / 10)`, so a straight line
//! through `log10(power)` versus distance has slope `-alpha / 10`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Peak powers (any linear power unit) at increasing beam-to-source distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSeries {
    /// mm.
    pub distances: Vec<f64>,
    pub peak_powers: Vec<f64>,
    pub frequency: f64,
    pub temperature: f64,
}

impl DistanceSeries {
    pub fn new(distances: Vec<f64>, peak_powers: Vec<f64>, frequency: f64, temperature: f64) -> Result<Self> {
        if distances.len() != peak_powers.len() {
            return Err(Error::invalid(
                "peak_powers",
                format!("{} powers for {} distances", peak_powers.len(), distances.len()),
            ));
        }
        if distances.len() < 2 {
            return Err(Error::invalid("distances", "need at least two points"));
        }
        if distances.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("distances", "must be finite and >= 0"));
        }
        if distances.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("distances", "must be strictly increasing"));
        }
        Ok(DistanceSeries {
            distances,
            peak_powers,
            frequency,
            temperature,
        })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// dB/mm.
    pub alpha: f64,
    /// dB/mm; zero when the fit is exactly determined.
    pub alpha_std_error: f64,
    /// log10 of the fitted power at zero distance.
    pub intercept: f64,
    /// RMS residual of log10(power).
    pub residual_rms: f64,
    /// Two points only: the line is exact and no error can be estimated.
    pub degenerate: bool,
}

/// Per-point weights of the log-linear regression.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FitWeighting {
    #[default]
    Uniform,
    /// Relative weights, e.g. inverse variances of log10(power).
    Weights(Vec<f64>),
}

/// Ordinary least squares on log10(power).
pub fn fit_decay(series: &DistanceSeries) -> Result<DecayFit> {
    fit_decay_weighted(series, &FitWeighting::Uniform)
}

pub fn fit_decay_weighted(series: &DistanceSeries, weighting: &FitWeighting) -> Result<DecayFit> {
    let n = series.distances.len();
    if n != series.peak_powers.len() || n < 2 {
        return Err(Error::Fit(format!(
            "need >= 2 paired points, got {} distances and {} powers",
            n,
            series.peak_powers.len()
        )));
    }
    if let Some(p) = series.peak_powers.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::invalid("peak_powers", format!("must be > 0, found {p}")));
    }
    let weights = match weighting {
        FitWeighting::Uniform => vec![1.0; n],
        FitWeighting::Weights(w) => {
            if w.len() != n || w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::invalid("weights", "need one positive weight per point"));
            }
            w.clone()
        }
    };

    let x = &series.distances;
    let y: Vec<f64> = series.peak_powers.iter().map(|p| p.log10()).collect();
    let w_sum: f64 = weights.iter().sum();
    let x_mean = weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / w_sum;
    let y_mean = weights.iter().zip(&y).map(|(w, y)| w * y).sum::<f64>() / w_sum;
    let (sxx, sxy) = weights
        .iter()
        .zip(x.iter().zip(&y))
        .fold((0.0, 0.0), |(sxx, sxy), (w, (x, y))| {
            let dx = x - x_mean;
            (sxx + w * dx * dx, sxy + w * dx * (y - y_mean))
        });
    if sxx <= 0.0 {
        return Err(Error::Fit("all points at the same distance".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let weighted_rss: f64 = weights
        .iter()
        .zip(x.iter().zip(&y))
        .map(|(w, (x, y))| {
            let r = y - (intercept + slope * x);
            w * r * r
        })
        .sum();

    let degenerate = n == 2;
    let slope_se = if degenerate {
        0.0
    } else {
        (weighted_rss / (n as f64 - 2.0) / sxx).sqrt()
    };
    Ok(DecayFit {
        alpha: -10.0 * slope,
        alpha_std_error: 10.0 * slope_se,
        intercept,
        residual_rms: (weighted_rss / w_sum).sqrt(),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn grid() -> Vec<f64> {
        (0..10).map(|k| 7.0 * k as f64 / 9.0).collect()
    }

    fn series(alpha: f64, scale: f64) -> DistanceSeries {
        let d = grid();
        let p = d.iter().map(|d| scale * 10f64.powf(-alpha * d / 10.0)).collect();
        DistanceSeries::new(d, p, 5.204e6, 293.15).unwrap()
    }

    #[test]
    fn exact_data_is_recovered() {
        let fit = fit_decay(&series(4.305, 1.0)).unwrap();
        assert_relative_eq!(fit.alpha, 4.305, max_relative = 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert!(!fit.degenerate);
    }

    #[test]
    fn two_points_are_degenerate() {
        let s = DistanceSeries::new(vec![0.0, 1.0], vec![1.0, 10f64.powf(-0.4305)], 5.204e6, 293.15).unwrap();
        let fit = fit_decay(&s).unwrap();
        assert_relative_eq!(fit.alpha, 4.305, max_relative = 1e-12);
        assert_eq!(fit.alpha_std_error, 0.0);
        assert!(fit.degenerate);
    }

    #[test]
    fn bad_inputs() {
        let mut s = series(4.305, 1.0);
        s.peak_powers[3] = 0.0;
        assert!(matches!(fit_decay(&s), Err(Error::InvalidParameter { .. })));

        let flat = DistanceSeries {
            distances: vec![1.0; 4],
            peak_powers: vec![1.0, 2.0, 3.0, 4.0],
            frequency: 5e6,
            temperature: 293.15,
        };
        assert!(matches!(fit_decay(&flat), Err(Error::Fit(_))));
        assert!(DistanceSeries::new(vec![1.0, 1.0], vec![1.0, 1.0], 5e6, 293.15).is_err());
    }

    #[test]
    fn one_percent_noise_monte_carlo() {
        let truth = 4.305;
        let mut covered = 0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = series(truth, 1.0);
            for p in &mut s.peak_powers {
                let z: f64 = StandardNormal.sample(&mut rng);
                *p *= 1.0 + 0.01 * z;
            }
            let fit = fit_decay(&s).unwrap();
            assert!((fit.alpha - truth).abs() < 0.05 * truth);
            // two-sided 95 % Student-t quantile, 8 degrees of freedom
            if (fit.alpha - truth).abs() <= 2.306 * fit.alpha_std_error {
                covered += 1;
            }
        }
        assert!(covered >= 17, "95 % coverage {covered}/20");
    }

    #[test]
    fn weights_shift_the_fit_towards_trusted_points() {
        let mut s = series(4.305, 1.0);
        s.peak_powers[9] *= 2.0;
        let uniform = fit_decay(&s).unwrap();
        let mut w = vec![1.0; 10];
        w[9] = 1e-6;
        let weighted = fit_decay_weighted(&s, &FitWeighting::Weights(w)).unwrap();
        assert!((weighted.alpha - 4.305).abs() < (uniform.alpha - 4.305).abs());
        assert!(fit_decay_weighted(&s, &FitWeighting::Weights(vec![1.0; 3])).is_err());
    }

    proptest! {
        #[test]
        fn scaling_powers_only_moves_the_intercept(
            alpha in 0.1f64..10.0,
            scale in 1e-30f64..1e30,
            wobble in proptest::collection::vec(-0.05f64..0.05, 10),
        ) {
            let mut base = series(alpha, 1.0);
            for (p, w) in base.peak_powers.iter_mut().zip(&wobble) {
                *p *= 1.0 + w;
            }
            let mut scaled = base.clone();
            for p in &mut scaled.peak_powers {
                *p *= scale;
            }
            let a = fit_decay(&base).unwrap();
            let b = fit_decay(&scaled).unwrap();
            prop_assert!((a.alpha - b.alpha).abs() <= 1e-9 * a.alpha.abs().max(1.0));
            prop_assert!((b.intercept - a.intercept - scale.log10()).abs() < 1e-9);
        }
    }
}
