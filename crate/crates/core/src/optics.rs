//! Gaussian beam geometry and its interaction with an ultrasonic pressure
//! wave.
//!
//! A focused beam crossing a sound column parallel to the wave fronts picks
//! up an optical path-length modulation `dL = z_M * dn`, where `dn` is the
//! refractive-index amplitude and `z_M` the length over which the beam is
//! thin enough to resolve the acoustic wavelength. The transverse average
//! of the index grating `cos(2 pi x / L)` over a Gaussian intensity profile
//! of 1/e^2 radius `w` is `exp(-pi^2 w^2 / (2 L^2))`; integrating that
//! wash-out along the beam gives `z_M` in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::air::{absorption_coefficient, attenuated_pressure, piezooptic_coefficient, AirState};
use crate::error::{ensure, Result};

/// Half-span of the `z_M` integration, in Rayleigh ranges.
pub const INTEGRATION_SPAN_RAYLEIGH: f64 = 10.0;
/// Wash-out at the span edge above which `z_M` is reported as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-3;

/// TEM00 beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianBeam {
    /// Optical wavelength, m.
    pub wavelength: f64,
    /// 1/e^2 intensity radius at the waist, m.
    pub waist_radius: f64,
    /// Waist location along the propagation axis, m.
    pub waist_position: f64,
    /// W.
    pub power: f64,
}

impl Default for GaussianBeam {
    /// 1550 nm, 31 um waist, 12 mW.
    fn default() -> Self {
        GaussianBeam {
            wavelength: 1550e-9,
            waist_radius: 31e-6,
            waist_position: 0.0,
            power: 12e-3,
        }
    }
}

impl GaussianBeam {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.wavelength.is_finite() && self.wavelength > 0.0,
            "wavelength",
            "must be > 0 m",
        )?;
        ensure(
            self.waist_radius.is_finite() && self.waist_radius > 0.0,
            "waist_radius",
            "must be > 0 m",
        )?;
        ensure(self.waist_position.is_finite(), "waist_position", "must be finite")?;
        ensure(self.power.is_finite() && self.power >= 0.0, "power", "must be >= 0 W")
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist_radius * self.waist_radius / self.wavelength
    }

    /// 1/e^2 radius at axial position `z`.
    pub fn radius_at(&self, z: f64) -> f64 {
        beam_radius(self, z)
    }

    /// Distance from the waist at which the radius reaches `radius`, or
    /// `None` if `radius` is below the waist radius.
    pub fn distance_to_radius(&self, radius: f64) -> Option<f64> {
        let ratio = radius / self.waist_radius;
        (ratio >= 1.0).then(|| self.rayleigh_range() * (ratio * ratio - 1.0).sqrt())
    }
}

pub fn beam_radius(beam: &GaussianBeam, z: f64) -> f64 {
    let u = (z - beam.waist_position) / beam.rayleigh_range();
    beam.waist_radius * (1.0 + u * u).sqrt()
}

/// Fraction of the index modulation that survives averaging over a beam of
/// radius `beam_radius` crossing a grating of period `acoustic_wavelength`.
pub fn washout_factor(beam_radius: f64, acoustic_wavelength: f64) -> f64 {
    let q = beam_radius / acoustic_wavelength;
    (-PI * PI * q * q / 2.0).exp()
}

/// Effective interaction length and whether the integral was clipped by the
/// finite integration span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLength {
    /// m.
    pub value: f64,
    /// Set when the wash-out at the span edge exceeds [`DIVERGENCE_THRESHOLD`];
    /// the value then depends on the span and is only a lower bound.
    pub divergent: bool,
}

/// `z_M = integral of washout_factor(w(z), L) dz` over +-10 Rayleigh ranges.
///
/// With `a = pi^2 w0^2 / (2 L^2)` the integrand is
/// `exp(-a) * exp(-a (z / z_R)^2)`, so the clipped integral is
/// `exp(-a) z_R sqrt(pi / a) erf(10 sqrt(a))`.
pub fn effective_interaction_length(beam: &GaussianBeam, acoustic_wavelength: f64) -> EffectiveLength {
    let z_r = beam.rayleigh_range();
    let q = beam.waist_radius / acoustic_wavelength;
    let a = PI * PI * q * q / 2.0;
    let span = INTEGRATION_SPAN_RAYLEIGH;
    let sqrt_a = a.sqrt();
    let value = if sqrt_a * span < 1e-6 {
        // erf(x)/x -> 2/sqrt(pi) as x -> 0
        (-a).exp() * z_r * 2.0 * span
    } else {
        (-a).exp() * z_r * (PI / a).sqrt() * libm::erf(span * sqrt_a)
    };
    let edge = (-a * (1.0 + span * span)).exp();
    EffectiveLength {
        value,
        divergent: edge > DIVERGENCE_THRESHOLD,
    }
}

/// Refractive-index amplitude `dn = (dn/dp) * dp`.
pub fn delta_n(air: &AirState, pressure_amplitude: f64) -> f64 {
    piezooptic_coefficient(air).value * pressure_amplitude
}

/// Optical path-length amplitude `dL = z_M * dn`.
pub fn path_length_amplitude(delta_n: f64, effective_length: f64) -> f64 {
    effective_length * delta_n
}

/// Ultrasonic wave emitted by the transducer and the beam's position in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticScene {
    /// Hz.
    pub frequency: f64,
    /// Pressure amplitude at the source face, Pa.
    pub source_pressure_amplitude: f64,
    /// Distance from the source face to the beam axis, mm.
    pub source_position: f64,
    /// m.
    pub acoustic_wavelength: f64,
    /// rad.
    pub phase_offset: f64,
}

impl AcousticScene {
    /// Scene with the acoustic wavelength taken from the air's sound speed.
    pub fn new(air: &AirState, frequency: f64, source_pressure_amplitude: f64, source_position: f64) -> Self {
        AcousticScene {
            frequency,
            source_pressure_amplitude,
            source_position,
            acoustic_wavelength: air.acoustic_wavelength(frequency),
            phase_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.frequency.is_finite() && self.frequency > 0.0,
            "frequency",
            "must be > 0 Hz",
        )?;
        ensure(
            self.source_pressure_amplitude.is_finite() && self.source_pressure_amplitude >= 0.0,
            "source_pressure_amplitude",
            "must be >= 0 Pa",
        )?;
        ensure(
            self.source_position.is_finite() && self.source_position >= 0.0,
            "source_position",
            "must be >= 0 mm",
        )?;
        ensure(
            self.acoustic_wavelength.is_finite() && self.acoustic_wavelength > 0.0,
            "acoustic_wavelength",
            "must be > 0 m",
        )
    }
}

/// Pressure amplitude (Pa) and phase (rad) of the wave `distance_mm` away
/// from the source face. The sound column is treated as collimated; only
/// absorption reduces the amplitude.
pub fn acoustic_pressure_at(scene: &AcousticScene, air: &AirState, distance_mm: f64) -> Result<(f64, f64)> {
    ensure(
        distance_mm.is_finite() && distance_mm >= 0.0,
        "distance",
        "must be >= 0 mm",
    )?;
    let alpha = absorption_coefficient(air.temperature, scene.frequency)?;
    let amplitude = attenuated_pressure(scene.source_pressure_amplitude, alpha.value, distance_mm);
    let phase = scene.phase_offset + 2.0 * PI * distance_mm * 1e-3 / scene.acoustic_wavelength;
    Ok((amplitude, phase))
}

/// Outcome of one beam/sound-field interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionResult {
    pub delta_n: f64,
    /// m.
    pub effective_length: f64,
    /// m.
    pub path_amplitude: f64,
}

impl InteractionResult {
    pub fn new(delta_n: f64, effective_length: f64) -> Self {
        InteractionResult {
            delta_n,
            effective_length,
            path_amplitude: path_length_amplitude(delta_n, effective_length),
        }
    }
}
