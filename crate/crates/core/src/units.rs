//! Physical constants and unit conversions.
//!
//! Energies are carried as frequencies E/h in Hz. Rates (κ, β, Γ, Ω) are
//! ordinary frequencies as well; the 2π is applied only where a formula
//! needs an angular rate.

use std::f64::consts::PI;

/// Planck constant, J s.
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = H / (2.0 * PI);
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// k_B / h in Hz/K.
pub const KB_OVER_H: f64 = 20.836_619e9;
/// Bohr magneton over h, Hz/T (1.39962 MHz/G).
pub const MU_B_OVER_H: f64 = 1.399_624_493_61e10;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Cesium-133 mass, kg.
pub const CS_MASS: f64 = 132.905_451_933 * AMU;

/// Temperature (K) to the equivalent energy in Hz.
#[inline]
pub fn kelvin_to_hz(t: f64) -> f64 {
    t * KB_OVER_H
}

/// Energy in Hz to temperature in K.
#[inline]
pub fn hz_to_kelvin(e: f64) -> f64 {
    e / KB_OVER_H
}

#[inline]
pub fn microkelvin_to_hz(t_uk: f64) -> f64 {
    kelvin_to_hz(t_uk * 1e-6)
}

#[inline]
pub fn hz_to_microkelvin(e: f64) -> f64 {
    hz_to_kelvin(e) * 1e6
}

/// Gauss to tesla.
pub const GAUSS: f64 = 1e-4;

/// cm^-3 to m^-3.
pub const PER_CM3: f64 = 1e6;
/// cm^3/s to m^3/s.
pub const CM3_PER_S: f64 = 1e-6;
/// cm^6/s to m^6/s.
pub const CM6_PER_S: f64 = 1e-12;
