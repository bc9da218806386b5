//! Ambient air: piezo-optic response and ultrasound absorption at MHz
//! frequencies.
//!
//! Absorption is expressed in dB/mm and applies to the pressure amplitude,
//! i.e. a wave of amplitude `p` decays to `p * 10^(-alpha * d / 20)` after a
//! path of `d` millimetres. The detected peak power, being proportional to
//! the pressure squared, decays as `10^(-alpha * d / 10)`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Reference temperature of the absorption law and of the piezo-optic value.
pub const REFERENCE_TEMPERATURE: f64 = 293.15;
/// Reference ambient pressure, 1013.25 mbar.
pub const REFERENCE_PRESSURE: f64 = 101_325.0;
/// Piezo-optic coefficient of air at the reference state, in 1/Pa.
pub const PIEZOOPTIC_COEFFICIENT: f64 = 2.072e-9;
/// Sound speed at the reference temperature, in m/s.
pub const REFERENCE_SOUND_SPEED: f64 = 343.0;

/// Prefactor of the quadratic absorption law, in dB/(mm Hz^2).
const ABSORPTION_PREFACTOR: f64 = 15.895e-14;

/// Half-width of the temperature window in which the piezo-optic constant
/// is considered valid, in kelvin.
const REFERENCE_TEMPERATURE_WINDOW: f64 = 5.0;
/// Relative half-width of the pressure window.
const REFERENCE_PRESSURE_WINDOW: f64 = 0.05;

/// Thermodynamic state of the air the sound and the light propagate in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirState {
    /// Kelvin.
    pub temperature: f64,
    /// Pascal.
    pub static_pressure: f64,
    /// Fraction in [0, 1].
    pub relative_humidity: f64,
    /// Volume fraction of CO2.
    pub co2_fraction: f64,
    /// m/s.
    pub sound_speed: f64,
}

impl Default for AirState {
    /// 20 °C, 1013.25 mbar, 40 % relative humidity, 0.045 % CO2.
    fn default() -> Self {
        AirState {
            temperature: REFERENCE_TEMPERATURE,
            static_pressure: REFERENCE_PRESSURE,
            relative_humidity: 0.40,
            co2_fraction: 0.00045,
            sound_speed: REFERENCE_SOUND_SPEED,
        }
    }
}

impl AirState {
    /// Reference air at another temperature, with the sound speed scaled as
    /// `sqrt(T / 293.15)`.
    pub fn at_temperature(temperature: f64) -> Self {
        AirState::default().with_temperature(temperature)
    }

    /// Same state at a new temperature; the sound speed follows `sqrt(T)`.
    pub fn with_temperature(&self, temperature: f64) -> Self {
        AirState {
            temperature,
            sound_speed: self.sound_speed * (temperature / self.temperature).sqrt(),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.temperature.is_finite() && self.temperature > 0.0,
            "temperature",
            "must be > 0 K",
        )?;
        ensure(
            self.static_pressure.is_finite() && self.static_pressure > 0.0,
            "static_pressure",
            "must be > 0 Pa",
        )?;
        ensure(
            (0.0..=1.0).contains(&self.relative_humidity),
            "relative_humidity",
            "must be within [0, 1]",
        )?;
        ensure(
            (0.0..0.01).contains(&self.co2_fraction),
            "co2_fraction",
            "must be within [0, 0.01)",
        )?;
        ensure(
            self.sound_speed.is_finite() && self.sound_speed > 0.0,
            "sound_speed",
            "must be > 0 m/s",
        )
    }

    /// Whether the state lies inside the window where the tabulated
    /// piezo-optic coefficient applies.
    pub fn is_reference_state(&self) -> bool {
        (self.temperature - REFERENCE_TEMPERATURE).abs() <= REFERENCE_TEMPERATURE_WINDOW
            && (self.static_pressure / REFERENCE_PRESSURE - 1.0).abs() <= REFERENCE_PRESSURE_WINDOW
    }

    /// Acoustic wavelength at `frequency` in this air, in metres.
    pub fn acoustic_wavelength(&self, frequency: f64) -> f64 {
        self.sound_speed / frequency
    }
}

/// Piezo-optic coefficient together with an advisory flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piezooptic {
    /// dn/dp in 1/Pa.
    pub value: f64,
    /// False when the air state is outside the reference window. The value
    /// is never extrapolated.
    pub in_reference: bool,
}

/// dn/dp of the given air. Only one tabulated value exists, so states away
/// from 20 °C / 1 atm get the same constant with `in_reference == false`.
pub fn piezooptic_coefficient(air: &AirState) -> Piezooptic {
    Piezooptic {
        value: PIEZOOPTIC_COEFFICIENT,
        in_reference: air.is_reference_state(),
    }
}

/// Sound absorption coefficient at a given frequency and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionCoefficient {
    /// dB/mm, applied to the pressure amplitude.
    pub value: f64,
    pub frequency: f64,
    pub temperature: f64,
}

impl AbsorptionCoefficient {
    /// Amplitude decay factor over `distance_mm`.
    pub fn amplitude_factor(&self, distance_mm: f64) -> f64 {
        10f64.powf(-self.value * distance_mm / 20.0)
    }

    /// Power decay factor over `distance_mm`.
    pub fn power_factor(&self, distance_mm: f64) -> f64 {
        10f64.powf(-self.value * distance_mm / 10.0)
    }
}

/// Ultrasound absorption of air at 1013.25 mbar and 40 % humidity:
/// `alpha = 15.895e-14 * (T / 293.15 K) * f^2` dB/mm.
pub fn absorption_coefficient(temperature: f64, frequency: f64) -> Result<AbsorptionCoefficient> {
    ensure(
        temperature.is_finite() && temperature > 0.0,
        "temperature",
        "must be > 0 K",
    )?;
    if !(frequency >= 0.0 && frequency.is_finite()) {
        return Err(Error::invalid("frequency", "must be >= 0 Hz"));
    }
    Ok(AbsorptionCoefficient {
        value: ABSORPTION_PREFACTOR * (temperature / REFERENCE_TEMPERATURE) * frequency * frequency,
        frequency,
        temperature,
    })
}

/// Pressure amplitude left after `distance_mm` of travel through air with
/// absorption `alpha_db_per_mm`.
pub fn attenuated_pressure(p_source: f64, alpha_db_per_mm: f64, distance_mm: f64) -> f64 {
    p_source * 10f64.powf(-alpha_db_per_mm * distance_mm / 20.0)
}
