use serde::{Deserialize, Serialize};

use super::TrapError;
use crate::trapmodel::field::xi_coefficient;
use crate::units::{microkelvin_to_hz, GAUSS};

/// Geometry and strengths of the microring trap.
///
/// Energies are E/h in Hz, lengths in meters, fields in tesla. Powers are
/// expressed as the barrier scale factor relative to the cooling
/// configuration, which is what the calibrated depths refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapConfig {
    pub guide_wavelength: f64,
    pub guide_waist: f64,
    /// Free-space funnel depth at the beam focus.
    pub guide_depth: f64,
    /// Depth of the guide's near-field focus above the waveguide.
    pub near_field_depth: f64,
    /// 1/e² half-length of the near-field focus along z.
    pub near_field_length: f64,
    /// 1/e² half-width of the near-field focus along x.
    pub near_field_waist: f64,
    pub barrier_wavelength: f64,
    /// Barrier potential at the surface on axis, at full power.
    pub barrier_peak: f64,
    /// Current barrier power as a fraction of full power.
    pub barrier_power: f64,
    /// Barrier power fraction used while probing.
    pub probe_power: f64,
    /// Intensity decay constant k_ev of the evanescent field.
    pub evanescent_decay: f64,
    pub transverse_wavenumber: f64,
    pub corrugation_visibility: f64,
    pub cp_c4: f64,
    pub cp_z0: f64,
    pub cp_lambda_bar: f64,
    /// E_y/E_z of the evanescent mode.
    pub field_ratio: f64,
    pub xi: f64,
    /// Fictitious field per unit normalized intensity at full power, before ξ.
    pub fictitious_scale: f64,
    pub bias_field: f64,
    pub hyperfine_f: i32,
    pub g_f: f64,
}

pub const D2_WAVELENGTH: f64 = 852.352e-9;
pub const NOMINAL_KAPPA: f64 = 1.70e9;
pub const NOMINAL_BETA: f64 = 0.60e9;

// Output of `calibrate` with the default targets; a test re-derives them.

/// Calibrated near-field depth, μK.
pub const CAL_NEAR_FIELD_DEPTH_UK: f64 = 235.945_866_5;
pub const CAL_NEAR_FIELD_LENGTH: f64 = 2.539_078_861e-6;
pub const CAL_NEAR_FIELD_WAIST: f64 = 0.392_102_104_3e-6;
/// Calibrated surface barrier at full power, μK.
pub const CAL_BARRIER_PEAK_UK: f64 = 3.480_047_638e5;
pub const CAL_EVANESCENT_DECAY: f64 = 27.116_801_01e6;
/// Tesla per unit normalized intensity.
pub const CAL_FICTITIOUS_SCALE: f64 = 0.397_406_400_9;

impl Default for TrapConfig {
    fn default() -> Self {
        Self {
            guide_wavelength: 935e-9,
            guide_waist: 10e-6,
            guide_depth: microkelvin_to_hz(25.0),
            near_field_depth: microkelvin_to_hz(CAL_NEAR_FIELD_DEPTH_UK),
            near_field_length: CAL_NEAR_FIELD_LENGTH,
            near_field_waist: CAL_NEAR_FIELD_WAIST,
            barrier_wavelength: 849.552e-9,
            barrier_peak: microkelvin_to_hz(CAL_BARRIER_PEAK_UK),
            barrier_power: 1.0,
            probe_power: 0.1,
            evanescent_decay: CAL_EVANESCENT_DECAY,
            transverse_wavenumber: std::f64::consts::PI / 950e-9,
            corrugation_visibility: 0.0,
            cp_c4: -165.36e-24,
            cp_z0: 3.7e-9,
            cp_lambda_bar: D2_WAVELENGTH / (2.0 * std::f64::consts::PI),
            field_ratio: 0.83,
            xi: xi_coefficient(NOMINAL_KAPPA, NOMINAL_BETA, 0.83),
            fictitious_scale: CAL_FICTITIOUS_SCALE,
            bias_field: 150e-3 * GAUSS,
            hyperfine_f: 3,
            g_f: -0.25,
        }
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<(), TrapError> {
        let positive = [
            ("guide_wavelength", self.guide_wavelength),
            ("guide_waist", self.guide_waist),
            ("near_field_length", self.near_field_length),
            ("near_field_waist", self.near_field_waist),
            ("barrier_wavelength", self.barrier_wavelength),
            ("barrier_peak", self.barrier_peak),
            ("evanescent_decay", self.evanescent_decay),
            ("transverse_wavenumber", self.transverse_wavenumber),
            ("cp_lambda_bar", self.cp_lambda_bar),
            ("field_ratio", self.field_ratio),
            ("probe_power", self.probe_power),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TrapError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("guide_depth", self.guide_depth),
            ("near_field_depth", self.near_field_depth),
            ("barrier_power", self.barrier_power),
            ("cp_z0", self.cp_z0),
            ("fictitious_scale", self.fictitious_scale),
            ("bias_field", self.bias_field),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(TrapError::InvalidConfig(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.corrugation_visibility) {
            return Err(TrapError::InvalidConfig(format!(
                "corrugation_visibility must lie in [0, 1], got {}",
                self.corrugation_visibility
            )));
        }
        if !(self.cp_c4 < 0.0) {
            return Err(TrapError::InvalidConfig(format!("cp_c4 must be negative, got {}", self.cp_c4)));
        }
        if self.hyperfine_f < 1 || !self.g_f.is_finite() || !self.xi.is_finite() {
            return Err(TrapError::InvalidConfig("hyperfine_f >= 1, finite g_f and xi required".into()));
        }
        Ok(())
    }

    /// Same trap with the barrier at `power` times full power.
    pub fn with_barrier_power(&self, power: f64) -> Self {
        Self { barrier_power: power, ..self.clone() }
    }

    /// Cooling configuration (full barrier power).
    pub fn full(&self) -> Self {
        self.with_barrier_power(1.0)
    }

    /// Probe configuration.
    pub fn probe(&self) -> Self {
        self.with_barrier_power(self.probe_power)
    }

    pub fn rayleigh_range(&self) -> f64 {
        std::f64::consts::PI * self.guide_waist * self.guide_waist / self.guide_wavelength
    }

    /// n_eff from k_ev = (2π/λ_b)√(n_eff² − 1).
    pub fn effective_index(&self) -> f64 {
        let a = self.evanescent_decay * self.barrier_wavelength / (2.0 * std::f64::consts::PI);
        (1.0 + a * a).sqrt()
    }

    /// Half-width of the transverse validity window, π/(2q).
    pub fn transverse_half_width(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.transverse_wavenumber
    }

    pub fn from_json(text: &str) -> Result<Self, TrapError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| TrapError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
