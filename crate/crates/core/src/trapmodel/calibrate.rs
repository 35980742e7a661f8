//! Fixes the unknown trap strengths from the quoted trap geometry.
//!
//! The near-field depth, surface barrier and evanescent decay are solved
//! jointly so the trap sits at the two quoted centers and has the quoted
//! probe depth. The near-field length along z is then set by the ground
//! z-level spacing, the near-field width along x by the thermal ν̄_x, and the
//! fictitious-field scale by the typical adjacent-level Raman rate.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{trap_center, TrapConfig, TrapError};
use crate::ensemble::thermal_mean_level;
use crate::numerics::brent_root;
use crate::spinmotion::{
    axis_eigensystem, axis_energies, axis_field_profile, raman_matrix, trap_axis_potential_with, Axis, AxisResolution,
    Branch,
};
use crate::units::microkelvin_to_hz;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationTargets {
    pub zc_full: f64,
    pub zc_probe: f64,
    /// Hz.
    pub probe_depth: f64,
    /// Ground z-level spacing at full power, Hz.
    pub ground_spacing: f64,
    pub nu_x: f64,
    /// Kelvin.
    pub nu_x_temperature: f64,
    /// Median adjacent-level z Raman rate, Hz.
    pub raman_rate: f64,
    /// Levels ν < raman_levels enter the median.
    pub raman_levels: usize,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            zc_full: 440e-9,
            zc_probe: 360e-9,
            probe_depth: microkelvin_to_hz(250.0),
            ground_spacing: 50e3,
            nu_x: 5.0,
            nu_x_temperature: 23e-6,
            raman_rate: 10e3,
            raman_levels: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub config: TrapConfig,
    pub zc_full: f64,
    pub zc_probe: f64,
    pub probe_depth: f64,
    pub ground_spacing: f64,
    pub nu_x: f64,
    pub median_raman_rate: f64,
}

fn anchor_residuals(cfg: &TrapConfig, t: &CalibrationTargets) -> Result<Vector3<f64>, TrapError> {
    let (z1, _) = trap_center(&cfg.full())?;
    let (z2, u2) = trap_center(&cfg.probe())?;
    Ok(Vector3::new(
        (z1 - t.zc_full) / 1e-9,
        (z2 - t.zc_probe) / 1e-9,
        (-u2 - t.probe_depth) / microkelvin_to_hz(1.0),
    ))
}

fn with_triple(cfg: &TrapConfig, q: &Vector3<f64>) -> TrapConfig {
    TrapConfig {
        near_field_depth: q[0].exp(),
        barrier_peak: q[1].exp(),
        evanescent_decay: q[2] * 1e6,
        ..cfg.clone()
    }
}

/// Newton solve for (near-field depth, barrier peak, k_ev) at fixed shape parameters.
pub fn solve_anchor_triple(cfg: &TrapConfig, t: &CalibrationTargets) -> Result<TrapConfig, TrapError> {
    let mut q = Vector3::new(cfg.near_field_depth.ln(), cfg.barrier_peak.ln(), cfg.evanescent_decay * 1e-6);
    let mut r = anchor_residuals(&with_triple(cfg, &q), t)?;
    for _ in 0..50 {
        if r.amax() < 1e-6 {
            return Ok(with_triple(cfg, &q));
        }
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            let h = 1e-4 * q[k].abs().max(1.0);
            let mut qp = q;
            qp[k] += h;
            let mut qm = q;
            qm[k] -= h;
            let d = (anchor_residuals(&with_triple(cfg, &qp), t)? - anchor_residuals(&with_triple(cfg, &qm), t)?) / (2.0 * h);
            jac.set_column(k, &d);
        }
        let step = jac
            .lu()
            .solve(&(-r))
            .ok_or_else(|| TrapError::Calibration("singular anchor Jacobian".into()))?;
        let mut lambda = 1.0;
        loop {
            let trial = q + step * lambda;
            match anchor_residuals(&with_triple(cfg, &trial), t) {
                Ok(rt) if rt.norm() < r.norm() => {
                    q = trial;
                    r = rt;
                    break;
                }
                _ => {
                    lambda *= 0.5;
                    if lambda < 1e-6 {
                        // already at the noise floor of the center search
                        if r.amax() < 1e-3 {
                            return Ok(with_triple(cfg, &q));
                        }
                        return Err(TrapError::Calibration(format!(
                            "anchor solve stalled with residuals {:?}",
                            r.as_slice()
                        )));
                    }
                }
            }
        }
    }
    Err(TrapError::Calibration("anchor solve did not converge".into()))
}

fn ground_spacing(cfg: &TrapConfig, res: &AxisResolution) -> Result<f64, TrapError> {
    let cut = trap_axis_potential_with(Axis::Z, &cfg.full(), res)?;
    let e = axis_energies(&cut, Some(cut.minimum() + 500e3))?;
    if e.len() < 2 {
        return Err(TrapError::Calibration("fewer than two z levels".into()));
    }
    Ok(e[1] - e[0])
}

/// Thermal ν̄ along x in the probe configuration.
pub fn probe_nu_x(cfg: &TrapConfig, temperature: f64, res: &AxisResolution) -> Result<f64, TrapError> {
    let cut = trap_axis_potential_with(Axis::X, &cfg.probe(), res)?;
    let e = axis_energies(&cut, None)?;
    Ok(thermal_mean_level(&e, temperature))
}

/// Median |Ω_{ν,ν−1}|/2π over 1 ≤ ν < `levels` along z at full power (F, m_F = F, lowering).
pub fn median_adjacent_raman(cfg: &TrapConfig, levels: usize, res: &AxisResolution) -> Result<f64, TrapError> {
    let full = cfg.full();
    let cut = trap_axis_potential_with(Axis::Z, &full, res)?;
    let es = axis_eigensystem(&cut)?;
    let field = axis_field_profile(&cut, &full);
    let m = raman_matrix(Axis::Z, full.hyperfine_f, Branch::Lowering, &es, &field, &full)?;
    let mut band: Vec<f64> = m.band(1).into_iter().take(levels.saturating_sub(1)).collect();
    if band.is_empty() {
        return Err(TrapError::Calibration("no adjacent z levels".into()));
    }
    band.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = band.len();
    Ok(if n % 2 == 1 { band[n / 2] } else { 0.5 * (band[n / 2 - 1] + band[n / 2]) })
}

/// Runs the full calibration starting from `base` (used as the initial guess).
pub fn calibrate(base: &TrapConfig, t: &CalibrationTargets) -> Result<Calibration, TrapError> {
    base.validate()?;
    let res = AxisResolution::default();
    let spacing_error = |l: f64| -> Result<f64, TrapError> {
        let cfg = solve_anchor_triple(&TrapConfig { near_field_length: l, ..base.clone() }, t)?;
        Ok(ground_spacing(&cfg, &res)? - t.ground_spacing)
    };
    let l = brent_root(
        |l| spacing_error(l).map_err(|e| crate::numerics::NumericsError::InvalidInput(e.to_string())),
        0.6 * base.near_field_length,
        1.6 * base.near_field_length,
        1e-13,
    )
    .map_err(|e| TrapError::Calibration(format!("near-field length: {e}")))?;
    let cfg = solve_anchor_triple(&TrapConfig { near_field_length: l, ..base.clone() }, t)?;

    let w = brent_root(
        |w| {
            probe_nu_x(&TrapConfig { near_field_waist: w, ..cfg.clone() }, t.nu_x_temperature, &res)
                .map(|nu| nu - t.nu_x)
                .map_err(|e| crate::numerics::NumericsError::InvalidInput(e.to_string()))
        },
        0.5 * base.near_field_waist,
        1.5 * base.near_field_waist,
        1e-14,
    )
    .map_err(|e| TrapError::Calibration(format!("near-field waist: {e}")))?;
    let cfg = TrapConfig { near_field_waist: w, fictitious_scale: 1.0, ..cfg };

    let unit = median_adjacent_raman(&cfg, t.raman_levels, &res)?;
    let cfg = TrapConfig { fictitious_scale: t.raman_rate / unit, ..cfg };

    let (zc_full, _) = trap_center(&cfg.full())?;
    let (zc_probe, u_probe) = trap_center(&cfg.probe())?;
    Ok(Calibration {
        zc_full,
        zc_probe,
        probe_depth: -u_probe,
        ground_spacing: ground_spacing(&cfg, &res)?,
        nu_x: probe_nu_x(&cfg, t.nu_x_temperature, &res)?,
        median_raman_rate: median_adjacent_raman(&cfg, t.raman_levels, &res)?,
        config: cfg,
    })
}
