//! Seeded synthetic datasets with known generating parameters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::cavity::{averaged_spectrum, transmission, CavityError, CollectiveCoupling, DecayDataset, ResonatorParams, SpectrumDataset};
use crate::ensemble::{EnsembleError, SpillDataset, ThermalTrap};
use crate::kinetics::{evolve_atom_number, KineticsError, LossModel, TimeSeries};
use crate::units::kelvin_to_hz;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    Normal::new(0.0, 1.0).unwrap().sample(rng)
}

/// `n` evenly spaced values on [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Bare-resonator spectrum with multiplicative Gaussian noise of relative size `noise`.
pub fn bare_spectrum(
    rp: &ResonatorParams,
    center: f64,
    deltas: &[f64],
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SpectrumDataset, CavityError> {
    let mut t = Vec::with_capacity(deltas.len());
    let mut s = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let clean = transmission(d - center, 0.0, rp);
        t.push(clean * (1.0 + noise * gaussian(rng)));
        s.push((noise * clean).max(1e-6));
    }
    SpectrumDataset::new(deltas.to_vec(), t, s)
}

/// Gamma-averaged spectrum with additive Gaussian noise `sigma`.
pub fn cooperativity_spectrum(
    rp: &ResonatorParams,
    cc: &CollectiveCoupling,
    deltas: &[f64],
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SpectrumDataset, CavityError> {
    let clean = averaged_spectrum(deltas, cc, rp)?;
    let t = clean.iter().map(|v| v + sigma * gaussian(rng)).collect();
    SpectrumDataset::new(deltas.to_vec(), t, vec![sigma; deltas.len()])
}

/// Poisson photon counts A e^{−2πΓt} + background in uniform bins.
pub fn decay_counts(
    gamma: f64,
    amplitude: f64,
    background: f64,
    bin: f64,
    bins: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DecayDataset, CavityError> {
    let times = linspace(0.0, bin * (bins - 1) as f64, bins);
    let counts = times
        .iter()
        .map(|t| {
            let mean = amplitude * (-TAU * gamma * t).exp() + background;
            if mean > 0.0 {
                Poisson::new(mean).unwrap().sample(rng)
            } else {
                0.0
            }
        })
        .collect();
    DecayDataset::new(times, counts, background)
}

/// A·P(ΔU_min; T) at the barrier minima (K) with Gaussian noise of `sigma`·A.
pub fn spill_dataset(
    trap: &ThermalTrap,
    temperature: f64,
    amplitude: f64,
    barriers: &[f64],
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SpillDataset, EnsembleError> {
    let hz: Vec<f64> = barriers.iter().map(|&b| kelvin_to_hz(b)).collect();
    let p = trap.survival_curve(&hz, temperature);
    let cn = p.iter().map(|v| amplitude * (v + sigma * gaussian(rng))).collect();
    SpillDataset::new(barriers.to_vec(), cn, vec![sigma * amplitude; barriers.len()])
}

/// N̄(t) with multiplicative Gaussian noise of relative size `noise`.
pub fn loss_series(lm: &LossModel, times: &[f64], noise: f64, rng: &mut ChaCha8Rng) -> Result<TimeSeries, KineticsError> {
    let clean = evolve_atom_number(lm, times)?;
    let values = clean.iter().map(|v| v * (1.0 + noise * gaussian(rng))).collect();
    let sigmas = clean.iter().map(|v| noise * v).collect();
    TimeSeries::new(times.to_vec(), values, sigmas)
}
