//! Simulation of squeezed-light-enhanced acousto-optic vibration sensing in
//! air.
//!
//! An ultrasonic wave modulates the refractive index of the air crossed by
//! one arm of a Mach-Zehnder interferometer. The crate models the chain end
//! to end:
//!
//! - [`air`]: piezo-optic coefficient and ultrasonic absorption,
//! - [`optics`]: Gaussian beam, wash-out and effective interaction length,
//! - [`quantum`]: shot noise and squeezed-state variances,
//! - [`interferometer`]: seeded synthesis of the balanced-detector readout,
//! - [`spectrum`]: spectrum-analyzer emulation and peak extraction,
//! - [`experiments`]: squeezing demonstration and absorption sweeps,
//! - [`config`] and [`cli`]: JSON configuration and the `aosense` binary.
//!
//! ```
//! use aosense::quantum::shot_noise_asd;
//!
//! let asd = shot_noise_asd(1550e-9, 12e-3).unwrap();
//! assert!((asd - 1.140e-15).abs() < 1e-18);
//! ```

pub mod air;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod interferometer;
pub mod optics;
pub mod quantum;
pub mod spectrum;

pub use error::{Error, Result};
