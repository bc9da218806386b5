//! Quantum noise budget of the homodyne readout.
//!
//! Variances are expressed relative to the vacuum (shot-noise) level, so an
//! unsqueezed measurement has variance 1. A squeezed vacuum of squeeze
//! parameter `r` detected with total efficiency `eta` at quadrature angle
//! `psi` has variance `(1 - eta) + eta (e^{-2r} cos^2 psi + e^{2r} sin^2 psi)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub const PLANCK_CONSTANT: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Relative tolerance on `V_s * V_a - 1` below which a pair is treated as a
/// lossless state instead of being solved for a loss.
const PURE_STATE_TOLERANCE: f64 = 1e-6;

/// Shot-noise-limited displacement sensitivity of a mid-fringe Michelson /
/// Mach-Zehnder readout: `sqrt(h c lambda / (2 pi^2 P))` in m/sqrt(Hz).
pub fn shot_noise_asd(wavelength: f64, input_power: f64) -> Result<f64> {
    ensure(
        wavelength.is_finite() && wavelength > 0.0,
        "wavelength",
        "must be > 0 m",
    )?;
    ensure(
        input_power.is_finite() && input_power > 0.0,
        "input_power",
        "must be > 0 W",
    )?;
    Ok((PLANCK_CONSTANT * SPEED_OF_LIGHT * wavelength / (2.0 * PI * PI * input_power)).sqrt())
}

/// Squeezed-light source as seen by the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqueezerConfig {
    /// Squeeze parameter `r >= 0` at the source.
    pub source_squeeze_parameter: f64,
    /// Total detection efficiency of the squeezed field, in (0, 1].
    pub total_efficiency: f64,
    /// PDC pump phase; the measured quadrature is rotated by half of it.
    pub pump_phase: f64,
    /// RMS of Gaussian quadrature-angle jitter, rad.
    pub rms_phase_noise: f64,
}

impl Default for SqueezerConfig {
    /// 7.8 % total loss and a squeeze parameter giving 10 dB measured
    /// squeezing.
    fn default() -> Self {
        SqueezerConfig {
            source_squeeze_parameter: 1.868,
            total_efficiency: 0.922,
            pump_phase: 0.0,
            rms_phase_noise: 0.0,
        }
    }
}

impl SqueezerConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.source_squeeze_parameter.is_finite() && self.source_squeeze_parameter >= 0.0,
            "source_squeeze_parameter",
            "must be >= 0",
        )?;
        ensure(
            self.total_efficiency > 0.0 && self.total_efficiency <= 1.0,
            "total_efficiency",
            "must be within (0, 1]",
        )?;
        ensure(self.pump_phase.is_finite(), "pump_phase", "must be finite")?;
        ensure(
            self.rms_phase_noise.is_finite() && self.rms_phase_noise >= 0.0,
            "rms_phase_noise",
            "must be >= 0",
        )
    }

    /// Measured quadrature angle, half the pump phase.
    pub fn quadrature_angle(&self) -> f64 {
        self.pump_phase / 2.0
    }

    /// Variance at quadrature angle `psi`, averaged over the phase jitter.
    pub fn variance_at(&self, psi: f64) -> f64 {
        let r = self.source_squeeze_parameter;
        let eta = self.total_efficiency;
        let sigma = self.rms_phase_noise;
        // <cos(2(psi + delta))> for delta ~ N(0, sigma^2)
        let c2 = (2.0 * psi).cos() * (-2.0 * sigma * sigma).exp();
        let cos_sq = 0.5 * (1.0 + c2);
        let sin_sq = 0.5 * (1.0 - c2);
        (1.0 - eta) + eta * ((-2.0 * r).exp() * cos_sq + (2.0 * r).exp() * sin_sq)
    }
}

/// Noise variance relative to shot noise.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct QuadratureVariance(pub f64);

impl QuadratureVariance {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Level in dB relative to shot noise; negative means squeezed.
    pub fn db(self) -> f64 {
        to_db(self.0)
    }
}

/// Variances of the quadrature selected by the pump phase and of its
/// conjugate. At zero pump phase these are the squeezed and anti-squeezed
/// variances; a pump phase of pi swaps them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePair {
    pub squeezed: QuadratureVariance,
    pub anti_squeezed: QuadratureVariance,
}

pub fn quadrature_variance(config: &SqueezerConfig) -> QuadraturePair {
    let psi = config.quadrature_angle();
    QuadraturePair {
        squeezed: QuadratureVariance(config.variance_at(psi)),
        anti_squeezed: QuadratureVariance(config.variance_at(psi + PI / 2.0)),
    }
}

/// Loss-limited variance in the limit of infinite source squeezing.
pub fn squeezing_limit(total_efficiency: f64) -> QuadratureVariance {
    QuadratureVariance(1.0 - total_efficiency)
}

/// Efficiency and squeeze parameter reconstructed from a measured
/// squeezed/anti-squeezed pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEstimate {
    pub total_efficiency: f64,
    pub squeeze_parameter: f64,
}

impl LossEstimate {
    pub fn loss(&self) -> f64 {
        1.0 - self.total_efficiency
    }
}

/// Solve `V_s = 1 - eta + eta x`, `V_a = 1 - eta + eta / x` for `eta` and
/// `r = -ln(x) / 2` (no phase jitter).
///
/// Eliminating `x` gives the loss `1 - eta = (V_s V_a - 1) / (V_s + V_a - 2)`.
/// Pairs whose product is within 1e-6 of unity are taken as lossless.
pub fn infer_loss_and_squeeze(v_squeezed: f64, v_antisqueezed: f64) -> Result<LossEstimate> {
    if !(v_squeezed > 0.0 && v_squeezed < 1.0 && v_antisqueezed > 1.0 && v_antisqueezed.is_finite()) {
        return Err(Error::invalid(
            "variances",
            format!("need 0 < squeezed < 1 < anti-squeezed, got {v_squeezed} and {v_antisqueezed}"),
        ));
    }
    let excess = v_squeezed * v_antisqueezed - 1.0;
    if excess < -PURE_STATE_TOLERANCE {
        return Err(Error::Infeasible {
            squeezed: v_squeezed,
            anti_squeezed: v_antisqueezed,
        });
    }
    if excess <= PURE_STATE_TOLERANCE {
        return Ok(LossEstimate {
            total_efficiency: 1.0,
            squeeze_parameter: (v_antisqueezed / v_squeezed).ln() / 4.0,
        });
    }
    let loss = excess / (v_squeezed + v_antisqueezed - 2.0);
    let eta = 1.0 - loss;
    let x = (v_squeezed - loss) / eta;
    Ok(LossEstimate {
        total_efficiency: eta,
        squeeze_parameter: -x.ln() / 2.0,
    })
}

/// Carrier power that would give the same shot-noise-limited SNR without
/// squeezing.
pub fn equivalent_shot_noise_power(input_power: f64, v_squeezed: f64) -> Result<f64> {
    ensure(v_squeezed > 0.0, "v_squeezed", "must be > 0")?;
    Ok(input_power / v_squeezed)
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shot_noise_examples() {
        let a = shot_noise_asd(1550e-9, 12e-3).unwrap();
        assert_relative_eq!(a, 1.140_115_163_236e-15, max_relative = 1e-10);
        assert_relative_eq!(shot_noise_asd(1550e-9, 48e-3).unwrap(), a / 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            shot_noise_asd(1550e-9, 1.2e-3).unwrap(),
            3.605_360_710_72e-15,
            max_relative = 1e-10
        );
        assert!(shot_noise_asd(1550e-9, 0.0).is_err());
    }

    #[test]
    fn vacuum_has_unit_variance() {
        let cfg = SqueezerConfig {
            source_squeeze_parameter: 0.0,
            total_efficiency: 1.0,
            pump_phase: 0.7,
            rms_phase_noise: 0.0,
        };
        let pair = quadrature_variance(&cfg);
        assert_relative_eq!(pair.squeezed.value(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(pair.anti_squeezed.value(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn loss_limited_squeezing() {
        let floor = squeezing_limit(0.922);
        assert_relative_eq!(floor.value(), 0.078, max_relative = 1e-12);
        assert_relative_eq!(floor.db(), -11.079_053_973, max_relative = 1e-9);

        let strong = SqueezerConfig {
            source_squeeze_parameter: 15.0,
            ..SqueezerConfig::default()
        };
        assert_relative_eq!(
            quadrature_variance(&strong).squeezed.value(),
            0.078,
            max_relative = 1e-9
        );
    }

    #[test]
    fn default_source_gives_ten_db() {
        let pair = quadrature_variance(&SqueezerConfig::default());
        assert_relative_eq!(pair.squeezed.value(), 0.099_989_063_66, max_relative = 1e-9);
        assert_relative_eq!(pair.anti_squeezed.value(), 38.737_399_645_57, max_relative = 1e-9);
        assert!((pair.anti_squeezed.db() - 15.88).abs() < 0.01);
    }

    #[test]
    fn pump_phase_pi_swaps_quadratures() {
        let base = SqueezerConfig::default();
        let flipped = SqueezerConfig { pump_phase: PI, ..base };
        let a = quadrature_variance(&base);
        let b = quadrature_variance(&flipped);
        assert_relative_eq!(a.squeezed.value(), b.anti_squeezed.value(), max_relative = 1e-12);
        assert_relative_eq!(a.anti_squeezed.value(), b.squeezed.value(), max_relative = 1e-12);
    }

    #[test]
    fn inversion_examples() {
        let lossless = infer_loss_and_squeeze((-1.0f64).exp(), 1.0f64.exp()).unwrap();
        assert_relative_eq!(lossless.total_efficiency, 1.0, max_relative = 1e-12);
        assert_relative_eq!(lossless.squeeze_parameter, 0.5, max_relative = 1e-12);

        // rounded measurement pair; 38.6 is 38.72 rounded down, hence 0.92207
        let rounded = infer_loss_and_squeeze(0.100, 38.6).unwrap();
        assert_relative_eq!(rounded.total_efficiency, 0.922_070_844_7, max_relative = 1e-9);

        let exact = infer_loss_and_squeeze(0.1, 0.078 + 0.922 / ((0.1 - 0.078) / 0.922)).unwrap();
        assert_relative_eq!(exact.total_efficiency, 0.922, max_relative = 1e-12);
        assert_relative_eq!(exact.squeeze_parameter, 1.867_751_385_1, max_relative = 1e-10);

        let near_vacuum = infer_loss_and_squeeze(0.9999, 1.0001).unwrap();
        assert!(near_vacuum.total_efficiency.is_finite());
        assert!(near_vacuum.squeeze_parameter > 0.0 && near_vacuum.squeeze_parameter < 1e-3);
    }

    #[test]
    fn inversion_rejects_unphysical_pairs() {
        assert!(matches!(
            infer_loss_and_squeeze(0.5, 1.2),
            Err(Error::Infeasible { .. })
        ));
        assert!(infer_loss_and_squeeze(1.2, 3.0).is_err());
    }

    #[test]
    fn equivalence_examples() {
        assert_relative_eq!(
            equivalent_shot_noise_power(10e-3, 0.1).unwrap(),
            0.1,
            max_relative = 1e-12
        );
        assert_eq!(equivalent_shot_noise_power(7e-3, 1.0).unwrap(), 7e-3);
        assert_relative_eq!(
            equivalent_shot_noise_power(12e-3, 0.1).unwrap(),
            0.12,
            max_relative = 1e-12
        );
        assert!(equivalent_shot_noise_power(1.0, 0.0).is_err());
    }
}
