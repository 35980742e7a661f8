//! Least-χ² fits of bare-resonator and atom-loaded transmission spectra.

use serde::{Deserialize, Serialize};

use super::spectrum::{averaged_spectrum, transmission, transmission_to_cn};
use super::{CavityError, CollectiveCoupling, ResonatorParams, SpectrumDataset};
use crate::numerics::{fit_nonlinear, FitData, FitOptions, FitResult, NumericsError, Param};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BareFit {
    pub params: ResonatorParams,
    /// Resonance center, Hz.
    pub center: f64,
    pub fit: FitResult,
}

fn dip_estimates(data: &SpectrumDataset) -> (f64, f64, f64) {
    let (d, t) = (&data.detunings, &data.transmissions);
    let t_max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let t_min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    let depth: Vec<f64> = t.iter().map(|v| (t_max - v).max(0.0)).collect();
    let total: f64 = depth.iter().sum();
    let center = if total > 0.0 { d.iter().zip(&depth).map(|(x, w)| x * w).sum::<f64>() / total } else { 0.0 };
    let half = 0.5 * (t_max + t_min);
    let below: Vec<f64> = d.iter().zip(t).filter(|(_, v)| **v < half).map(|(x, _)| *x).collect();
    let width = match (below.first(), below.last()) {
        (Some(a), Some(b)) if b > a => b - a,
        _ => (d[d.len() - 1] - d[0]) / 10.0,
    };
    (center, width, t_min.max(0.0) / t_max.max(f64::MIN_POSITIVE))
}

/// Fits (κ_e, κ_i, β, center) to an empty-resonator spectrum T₀(Δ).
///
/// Several starts cover both coupling regimes; when the two orderings of
/// (κ_e, κ_i) fit equally well the undercoupled one (κ_e < κ_i) is reported.
pub fn fit_bare_resonator(data: &SpectrumDataset) -> Result<BareFit, CavityError> {
    data.validate()?;
    if data.len() < 5 {
        return Err(CavityError::Data("bare-resonator fit needs at least 5 points".into()));
    }
    let (c0, width, floor) = dip_estimates(data);
    let span = data.detunings[data.len() - 1] - data.detunings[0];
    if span < 3.0 * width {
        return Err(CavityError::Data(format!("spectrum spans {span:.3e} Hz, less than 3 linewidths ({width:.3e} Hz)")));
    }
    let model = |p: &[f64], x: &[f64]| {
        let rp = ResonatorParams::new(p[0], p[1], p[2]);
        x.iter().map(|&d| transmission(d - p[3], 0.0, &rp)).collect::<Vec<f64>>()
    };
    let fd = FitData::new(&data.detunings, &data.transmissions, &data.uncertainties);
    let opts = FitOptions::default();
    let (lo, hi) = (1e-6 * width, 100.0 * width);
    let root = floor.sqrt();
    let mut fits: Vec<FitResult> = Vec::new();
    let mut last_err = None;
    for kap in [width, 0.7 * width] {
        for frac in [0.5 * (1.0 - root), 0.5 * (1.0 + root)] {
            let frac = frac.clamp(0.05, 0.95);
            for bfrac in [0.05, 0.3, 0.6] {
                let params = [
                    Param::new("kappa_e", frac * kap).bounded(lo, hi).with_scale(kap),
                    Param::new("kappa_i", (1.0 - frac) * kap).bounded(lo, hi).with_scale(kap),
                    Param::new("beta", bfrac * kap).bounded(0.0, hi).with_scale(kap),
                    Param::new("center", c0).bounded(data.detunings[0], data.detunings[data.len() - 1]).with_scale(kap),
                ];
                match fit_nonlinear(&model, fd, &params, &opts) {
                    Ok(f) => fits.push(f),
                    Err(e) => last_err = Some(e),
                }
            }
        }
    }
    let best_chi2 = fits.iter().map(|f| f.chi2).fold(f64::INFINITY, f64::min);
    if !best_chi2.is_finite() {
        return Err(last_err.unwrap_or(NumericsError::DegenerateFit("no start converged".into())).into());
    }
    let tie = best_chi2 * (1.0 + 1e-6) + 1e-12 * data.len() as f64;
    let pick = fits
        .iter()
        .filter(|f| f.chi2 <= tie)
        .min_by(|a, b| {
            let under = |f: &FitResult| f.values[0] >= f.values[1];
            (under(a), a.chi2).partial_cmp(&(under(b), b.chi2)).unwrap()
        })
        .unwrap()
        .clone();
    let params = ResonatorParams::new(pick.values[0], pick.values[1], pick.values[2]);
    Ok(BareFit { params, center: pick.values[3], fit: pick })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooperativityFit {
    pub coupling: CollectiveCoupling,
    pub fit: FitResult,
    /// C̄_N finished pinned at zero: the spectrum shows no atoms.
    pub no_atoms: bool,
}

/// Shape bounds for the gamma distribution of C_N.
pub const SHAPE_BOUNDS: (f64, f64) = (0.5, 50.0);

/// Fits (C̄_N, k, δ₀) of the gamma-averaged spectrum with the resonator fixed.
pub fn fit_cooperativity(data: &SpectrumDataset, rp: &ResonatorParams) -> Result<CooperativityFit, CavityError> {
    data.validate()?;
    rp.validate()?;
    if data.len() < 4 {
        return Err(CavityError::Data("cooperativity fit needs at least 4 points".into()));
    }
    let model = |p: &[f64], x: &[f64]| {
        let cc = CollectiveCoupling::new(p[0].max(0.0), p[1], p[2]);
        averaged_spectrum(x, &cc, rp).unwrap_or_else(|_| vec![f64::NAN; x.len()])
    };
    let fd = FitData::new(&data.detunings, &data.transmissions, &data.uncertainties);
    let opts = FitOptions::default();

    let nearest = data
        .detunings
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let cn0 = transmission_to_cn(data.transmissions[nearest].min(0.999), rp).unwrap_or(0.0).max(0.05);
    let span = (data.detunings[data.len() - 1] - data.detunings[0]).abs();
    let offset_bound = span.max(rp.gamma_prime);

    let run = |shape: f64, fix_shape: bool| {
        let params = [
            Param::new("cn_mean", cn0).bounded(0.0, 1e3).with_scale(cn0.max(1.0)),
            Param::new("gamma_shape", shape).bounded(SHAPE_BOUNDS.0, SHAPE_BOUNDS.1).with_scale(shape).fixed_if(fix_shape),
            Param::new("detuning_offset", 0.0).bounded(-offset_bound, offset_bound).with_scale(rp.gamma_prime),
        ];
        fit_nonlinear(&model, fd, &params, &opts)
    };

    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for shape in [1.0, 4.0, 20.0] {
        let attempt = match run(shape, false) {
            Err(NumericsError::DegenerateFit(_)) => run(shape, true),
            other => other,
        };
        match attempt {
            Ok(f) if best.as_ref().is_none_or(|b| f.chi2 < b.chi2) => best = Some(f),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let fit = match best {
        Some(f) => f,
        None => return Err(last_err.unwrap().into()),
    };
    let coupling = CollectiveCoupling::new(fit.values[0], fit.values[1], fit.values[2]);
    let no_atoms = coupling.cn_mean <= 1e-9;
    Ok(CooperativityFit { coupling, fit, no_atoms })
}
