//! Input–output response of the atom-loaded microring.

use num_complex::Complex64;

use super::{CavityError, CollectiveCoupling, ResonatorParams};
use crate::numerics::{brent_root, quad_1d};

/// Largest cooperativity reported by [`transmission_to_cn`].
pub const CN_CAP: f64 = 1e6;

/// η = 1/(1 + β²/(κ/2)²).
pub fn eta_reduction(rp: &ResonatorParams) -> f64 {
    let half = 0.5 * rp.kappa();
    1.0 / (1.0 + (rp.beta / half).powi(2))
}

struct Detuned {
    kappa_t: Complex64,
    eta_t: Complex64,
    cn_t: Complex64,
}

fn detuned(delta: f64, cn: f64, rp: &ResonatorParams) -> Detuned {
    let kappa = rp.kappa();
    let kappa_t = Complex64::new(kappa, -2.0 * delta);
    let gamma_t = Complex64::new(rp.gamma_prime, -2.0 * delta);
    let half = 0.5 * kappa_t;
    let eta_t = 1.0 / (1.0 + rp.beta * rp.beta / (half * half));
    let cn_t = cn * kappa * rp.gamma_prime / (kappa_t * gamma_t);
    Detuned { kappa_t, eta_t, cn_t }
}

/// t(Δ) = 1 − (2κ_e η̃/κ̃) / (1 + η̃ C̃_N).
pub fn transmission_amplitude(delta: f64, cn: f64, rp: &ResonatorParams) -> Complex64 {
    let d = detuned(delta, cn, rp);
    1.0 - 2.0 * rp.kappa_e * d.eta_t / d.kappa_t / (1.0 + d.eta_t * d.cn_t)
}

/// |t(Δ)|².
pub fn transmission(delta: f64, cn: f64, rp: &ResonatorParams) -> f64 {
    transmission_amplitude(delta, cn, rp).norm_sqr()
}

/// r(Δ) = (4κ_e η̃/κ̃)(iβ/κ̃) / (1 + η̃ C̃_N).
pub fn reflection_amplitude(delta: f64, cn: f64, rp: &ResonatorParams) -> Complex64 {
    let d = detuned(delta, cn, rp);
    4.0 * rp.kappa_e * d.eta_t / d.kappa_t * Complex64::new(0.0, rp.beta) / d.kappa_t / (1.0 + d.eta_t * d.cn_t)
}

/// |r(Δ)|².
pub fn reflection(delta: f64, cn: f64, rp: &ResonatorParams) -> f64 {
    reflection_amplitude(delta, cn, rp).norm_sqr()
}

/// On-resonance transmission of the empty resonator, T₀ = |1 − 2κ_eη/κ|².
pub fn bare_transmission_floor(rp: &ResonatorParams) -> f64 {
    transmission(0.0, 0.0, rp)
}

/// Real C_N with T(Δ=0, C_N) = `t_resonant`.
///
/// Transmission at resonance rises monotonically from T₀ towards 1 on the
/// positive-amplitude branch, which is the only branch reaching T > T₀.
pub fn transmission_to_cn(t_resonant: f64, rp: &ResonatorParams) -> Result<f64, CavityError> {
    rp.validate()?;
    let eta = rp.eta();
    let a = 2.0 * rp.kappa_e * eta / rp.kappa();
    let t0 = (1.0 - a).powi(2);
    if !t_resonant.is_finite() || t_resonant < t0 * (1.0 - 1e-12) || t_resonant > 1.0 {
        return Err(CavityError::Domain(format!("T = {t_resonant} outside [T0 = {t0:.6}, 1)")));
    }
    if t_resonant <= t0 {
        return Ok(0.0);
    }
    let amp = t_resonant.sqrt();
    if amp >= 1.0 {
        return Err(CavityError::Overflow { cap: CN_CAP });
    }
    let c = (a / (1.0 - amp) - 1.0) / eta;
    if c > CN_CAP {
        return Err(CavityError::Overflow { cap: CN_CAP });
    }
    Ok(c.max(0.0))
}

/// ⟨f(c)⟩ over a gamma distribution with mean `mean` and shape `k`.
pub fn gamma_average<F>(mut f: F, mean: f64, k: f64, tol: f64) -> Result<f64, CavityError>
where
    F: FnMut(f64) -> f64,
{
    if !(mean >= 0.0 && k > 0.0) {
        return Err(CavityError::InvalidParams(format!("gamma mean {mean}, shape {k}")));
    }
    if mean == 0.0 {
        return Ok(f(0.0));
    }
    let theta = mean / k;
    let (num, den) = if k <= 2.0 {
        // u = s^{1/k} removes the u^{k-1} singularity: the weight becomes e^{-u} ds
        let s_max = 60f64.powf(k);
        let w = |s: f64| (-s.powf(1.0 / k)).exp();
        let num = quad_1d(|s| f(theta * s.powf(1.0 / k)) * w(s), 0.0, s_max, tol)?;
        let den = quad_1d(w, 0.0, s_max, tol)?;
        (num, den)
    } else {
        let spread = 14.0 * k.sqrt() + 10.0;
        let (lo, hi) = ((k - spread).max(0.0), k + spread);
        let mode = k - 1.0;
        let log_peak = (k - 1.0) * mode.ln() - mode;
        let w = |u: f64| if u > 0.0 { ((k - 1.0) * u.ln() - u - log_peak).exp() } else { 0.0 };
        let num = quad_1d(|u| f(theta * u) * w(u), lo, hi, tol)?;
        let den = quad_1d(w, lo, hi, tol)?;
        (num, den)
    };
    Ok(num / den)
}

/// Quadrature tolerance used for spectrum averaging.
pub const AVERAGE_TOL: f64 = 1e-6;

/// T̄(Δ) = ∫ T(Δ − δ₀; c) Gamma(c; k, C̄_N/k) dc.
pub fn averaged_spectrum(
    deltas: &[f64],
    cc: &CollectiveCoupling,
    rp: &ResonatorParams,
) -> Result<Vec<f64>, CavityError> {
    cc.validate()?;
    rp.validate()?;
    deltas
        .iter()
        .map(|&d| gamma_average(|c| transmission(d - cc.detuning_offset, c, rp), cc.cn_mean, cc.gamma_shape, AVERAGE_TOL))
        .collect()
}

/// Full width at half maximum of the atom-induced feature T̄(Δ) − T₀(Δ)
/// around Δ = δ₀, Hz.
pub fn feature_width(cc: &CollectiveCoupling, rp: &ResonatorParams) -> Result<f64, CavityError> {
    cc.validate()?;
    rp.validate()?;
    if cc.cn_mean == 0.0 {
        return Ok(0.0);
    }
    let excess = |d: f64| -> Result<f64, CavityError> {
        let avg = averaged_spectrum(&[d], cc, rp)?[0];
        Ok(avg - transmission(d, 0.0, rp))
    };
    let d0 = cc.detuning_offset;
    let half = 0.5 * excess(d0)?;
    let step = 0.25 * rp.gamma_prime;
    let limit = rp.kappa();
    let mut width = 0.0;
    for dir in [1.0, -1.0] {
        let mut prev = 0.0;
        let mut off = step;
        loop {
            if off > limit {
                return Err(CavityError::Domain("feature does not fall to half maximum within κ".into()));
            }
            if excess(d0 + dir * off)? < half {
                break;
            }
            prev = off;
            off += step;
        }
        let root = brent_root(
            |o| excess(d0 + dir * o).map(|e| e - half).map_err(|e| match e {
                CavityError::Numerics(n) => n,
                other => crate::numerics::NumericsError::InvalidInput(other.to_string()),
            }),
            prev,
            off,
            1e-9 * rp.gamma_prime,
        )?;
        width += root;
    }
    Ok(width)
}
