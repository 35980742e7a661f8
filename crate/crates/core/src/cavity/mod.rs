//! Microring cavity QED with coherent back-scattering: transmission and
//! reflection spectra, gamma-averaged collective response, resonator and
//! cooperativity fits, and superradiant decay.
//!
//! All rates are ordinary frequencies in Hz. Every formula here is a ratio
//! of rates, so no 2π appears except in the time-domain decay model.

pub mod decay;
pub mod fit;
pub mod spectrum;

pub use decay::{decay_rate_model, fit_pulsed_decay, DecayFit, DEFAULT_DECAY_WINDOW};
pub use fit::{fit_bare_resonator, fit_cooperativity, BareFit, CooperativityFit};
pub use spectrum::{
    averaged_spectrum, bare_transmission_floor, eta_reduction, feature_width, gamma_average, reflection,
    reflection_amplitude, transmission, transmission_amplitude, transmission_to_cn, CN_CAP,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::NumericsError;

/// Cesium D2 natural linewidth Γ₀, Hz.
pub const GAMMA0: f64 = 5.2e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonatorParams {
    /// External (bus) coupling rate κ_e, Hz.
    pub kappa_e: f64,
    /// Intrinsic loss rate κ_i, Hz.
    pub kappa_i: f64,
    /// Coherent back-scattering rate β, Hz.
    pub beta: f64,
    pub gamma0: f64,
    /// Atomic linewidth Γ′ near the surface, Hz.
    pub gamma_prime: f64,
}

impl Default for ResonatorParams {
    fn default() -> Self {
        Self::nominal()
    }
}

impl ResonatorParams {
    pub fn new(kappa_e: f64, kappa_i: f64, beta: f64) -> Self {
        Self { kappa_e, kappa_i, beta, gamma0: GAMMA0, gamma_prime: GAMMA0 }
    }

    /// (κ_e, κ_i, β) = (0.76, 0.94, 0.60) GHz.
    pub fn nominal() -> Self {
        Self::new(0.76e9, 0.94e9, 0.60e9)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_e + self.kappa_i
    }

    pub fn eta(&self) -> f64 {
        eta_reduction(self)
    }

    pub fn validate(&self) -> Result<(), CavityError> {
        let positive = [self.kappa_e, self.kappa_i, self.gamma0, self.gamma_prime];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(CavityError::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Gamma-distributed collective cooperativity with a spectral offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveCoupling {
    pub cn_mean: f64,
    /// Shape k of the gamma distribution.
    pub gamma_shape: f64,
    /// δ₀, Hz.
    pub detuning_offset: f64,
}

impl CollectiveCoupling {
    pub fn new(cn_mean: f64, gamma_shape: f64, detuning_offset: f64) -> Self {
        Self { cn_mean, gamma_shape, detuning_offset }
    }

    pub fn validate(&self) -> Result<(), CavityError> {
        if !(self.cn_mean >= 0.0 && self.cn_mean.is_finite())
            || !(self.gamma_shape > 0.0 && self.gamma_shape.is_finite())
            || !self.detuning_offset.is_finite()
        {
            return Err(CavityError::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Transmission spectrum with per-point uncertainties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDataset {
    /// Hz.
    pub detunings: Vec<f64>,
    pub transmissions: Vec<f64>,
    pub uncertainties: Vec<f64>,
}

impl SpectrumDataset {
    pub fn new(detunings: Vec<f64>, transmissions: Vec<f64>, uncertainties: Vec<f64>) -> Result<Self, CavityError> {
        let d = Self { detunings, transmissions, uncertainties };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    pub fn validate(&self) -> Result<(), CavityError> {
        let n = self.detunings.len();
        if n == 0 {
            return Err(CavityError::Data("empty spectrum".into()));
        }
        if self.transmissions.len() != n || self.uncertainties.len() != n {
            return Err(CavityError::Data("column lengths differ".into()));
        }
        if self.detunings.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CavityError::Data("detunings must be strictly increasing".into()));
        }
        if self.transmissions.iter().any(|t| !t.is_finite()) {
            return Err(CavityError::Data("non-finite transmission".into()));
        }
        if self.uncertainties.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(CavityError::Data("uncertainties must be positive".into()));
        }
        Ok(())
    }
}

/// Photon counts binned after pulse extinction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayDataset {
    /// Bin start times, s.
    pub times: Vec<f64>,
    pub counts: Vec<f64>,
    /// Expected background counts per bin.
    pub background: f64,
}

impl DecayDataset {
    pub fn new(times: Vec<f64>, counts: Vec<f64>, background: f64) -> Result<Self, CavityError> {
        let d = Self { times, counts, background };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), CavityError> {
        let n = self.times.len();
        if n < 3 || self.counts.len() != n {
            return Err(CavityError::Data("decay dataset needs matching time and count columns (>= 3 bins)".into()));
        }
        let dt = self.times[1] - self.times[0];
        if !(dt > 0.0) || self.times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
            return Err(CavityError::Data("time bins must be uniform".into()));
        }
        if self.counts.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(CavityError::Data("counts must be non-negative".into()));
        }
        if !(self.background >= 0.0 && self.background.is_finite()) {
            return Err(CavityError::Data("background must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CavityError {
    #[error("invalid resonator or coupling parameters: {0}")]
    InvalidParams(String),
    #[error("invalid dataset: {0}")]
    Data(String),
    #[error("outside model domain: {0}")]
    Domain(String),
    #[error("cooperativity exceeds cap {cap:e}")]
    Overflow { cap: f64 },
    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
