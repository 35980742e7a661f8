//! Versioned JSON run configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use ringtrap::ensemble::EnsembleGrid;
use ringtrap::kinetics::{ModelFamily, NOMINAL_DENSITY};
use ringtrap::spinmotion::{AxisResolution, Branch};
use ringtrap::trapmodel::CalibrationTargets;
use ringtrap::{ResonatorParams, TrapConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub trap: TrapConfig,
    #[serde(default)]
    pub resonator: ResonatorParams,
    #[serde(default)]
    pub ensemble: EnsembleSettings,
    #[serde(default)]
    pub potential: PotentialSettings,
    #[serde(default)]
    pub raman: RamanSettings,
    #[serde(default)]
    pub spectrum: SpectrumSettings,
    #[serde(default)]
    pub decay: DecaySettings,
    #[serde(default)]
    pub spill: SpillSettings,
    #[serde(default)]
    pub lifetime: LifetimeSettings,
    #[serde(default)]
    pub calibrate: CalibrationTargets,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            trap: TrapConfig::default(),
            resonator: ResonatorParams::default(),
            ensemble: EnsembleSettings::default(),
            potential: PotentialSettings::default(),
            raman: RamanSettings::default(),
            spectrum: SpectrumSettings::default(),
            decay: DecaySettings::default(),
            spill: SpillSettings::default(),
            lifetime: LifetimeSettings::default(),
            calibrate: CalibrationTargets::default(),
            output_dir: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Parses `text`; relative data paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "config schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        for p in [&mut cfg.spectrum.data, &mut cfg.decay.data, &mut cfg.spill.data, &mut cfg.lifetime.data]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(dir) = cfg.output_dir.as_mut() {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        cfg.trap.validate().map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.resonator.validate().map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    pub temperature_k: f64,
    pub n0_per_m3: f64,
    /// Single-atom cooperativity the coupling profile is scaled to.
    pub c1_target: f64,
    pub c1_temperature_k: f64,
    pub grid: EnsembleGrid,
    /// Density-map samples (first axis, z).
    pub map_points: [usize; 2],
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        Self {
            temperature_k: 23e-6,
            n0_per_m3: NOMINAL_DENSITY,
            c1_target: 0.05,
            c1_temperature_k: 23e-6,
            grid: EnsembleGrid::default(),
            map_points: [61, 61],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSettings {
    pub z_min: f64,
    pub z_max: f64,
    pub z_points: usize,
    pub map_points: [usize; 2],
    pub map_z_max: f64,
    /// Equipotential contour levels, μK above the probe-trap bottom.
    pub contour_levels_uk: Vec<f64>,
}

impl Default for PotentialSettings {
    fn default() -> Self {
        Self {
            z_min: 50e-9,
            z_max: 2e-6,
            z_points: 391,
            map_points: [61, 61],
            map_z_max: 1.2e-6,
            contour_levels_uk: vec![25.0, 50.0, 100.0, 150.0, 200.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RamanSettings {
    /// Levels written per axis.
    pub levels: usize,
    pub m_f: i32,
    pub branch: Branch,
    pub resolution: AxisResolution,
}

impl Default for RamanSettings {
    fn default() -> Self {
        Self { levels: 40, m_f: 3, branch: Branch::Lowering, resolution: AxisResolution::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    Cooperativity,
    Bare,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSettings {
    pub mode: SpectrumMode,
    pub data: Option<PathBuf>,
    pub synthetic: SyntheticSpectrum,
    /// Samples of the fitted curve.
    pub curve_points: usize,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        Self { mode: SpectrumMode::Cooperativity, data: None, synthetic: SyntheticSpectrum::default(), curve_points: 241 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpectrum {
    pub cn_mean: f64,
    pub gamma_shape: f64,
    pub detuning_offset_hz: f64,
    pub sigma: f64,
    pub span_hz: f64,
    pub points: usize,
    pub bare_relative_noise: f64,
    pub bare_span_hz: f64,
    pub bare_points: usize,
}

impl Default for SyntheticSpectrum {
    fn default() -> Self {
        Self {
            cn_mean: 3.6,
            gamma_shape: 4.0,
            detuning_offset_hz: 0.0,
            sigma: 0.01,
            span_hz: 60e6,
            points: 61,
            bare_relative_noise: 0.02,
            bare_span_hz: 5e9,
            bare_points: 201,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySettings {
    pub data: Option<PathBuf>,
    /// Background counts per bin.
    pub background: f64,
    pub window_s: [f64; 2],
    /// C̄_N values for the Γ/Γ₀ overlay line.
    pub overlay_cn: Vec<f64>,
    pub synthetic: SyntheticDecay,
}

impl Default for DecaySettings {
    fn default() -> Self {
        Self {
            data: None,
            background: 16.0,
            window_s: [0.0, 35e-9],
            overlay_cn: (0..=10).map(|i| 0.5 * i as f64).collect(),
            synthetic: SyntheticDecay::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticDecay {
    pub gamma_over_gamma0: f64,
    pub amplitude: f64,
    pub bin_s: f64,
    pub bins: usize,
}

impl Default for SyntheticDecay {
    fn default() -> Self {
        Self { gamma_over_gamma0: 2.33, amplitude: 1600.0, bin_s: 0.5e-9, bins: 80 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpillSettings {
    pub data: Option<PathBuf>,
    pub synthetic: SyntheticSpill,
    pub curve_points: usize,
}

impl Default for SpillSettings {
    fn default() -> Self {
        Self { data: None, synthetic: SyntheticSpill::default(), curve_points: 81 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpill {
    pub temperature_k: f64,
    pub amplitude: f64,
    pub relative_noise: f64,
    pub barriers_uk: Vec<f64>,
}

impl Default for SyntheticSpill {
    fn default() -> Self {
        Self {
            temperature_k: 23e-6,
            amplitude: 3.6,
            relative_noise: 0.05,
            barriers_uk: (0..17).map(|i| 20.0 * i as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LifetimeInputKind {
    Cooperativity,
    Transmission,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifetimeSettings {
    pub data: Option<PathBuf>,
    pub family: ModelFamily,
    pub input: LifetimeInputKind,
    pub fixed_tau_s: Option<f64>,
    pub fixed_n0_per_m3: Option<f64>,
    pub synthetic: SyntheticLoss,
}

impl Default for LifetimeSettings {
    fn default() -> Self {
        Self {
            data: None,
            family: ModelFamily::OneThree,
            input: LifetimeInputKind::Cooperativity,
            fixed_tau_s: None,
            fixed_n0_per_m3: Some(NOMINAL_DENSITY),
            synthetic: SyntheticLoss::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticLoss {
    pub tau_s: f64,
    pub l2_m3_per_s: f64,
    pub l3_m6_per_s: f64,
    pub relative_noise: f64,
    pub t_max_s: f64,
    pub points: usize,
}

impl Default for SyntheticLoss {
    fn default() -> Self {
        let lm = ringtrap::LossModel::nominal_three_body();
        Self { tau_s: lm.tau, l2_m3_per_s: 0.0, l3_m6_per_s: lm.l3, relative_noise: 0.02, t_max_s: 0.8, points: 41 }
    }
}
