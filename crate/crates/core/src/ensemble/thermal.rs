//! Truncated-Boltzmann density and grid integrals over the microtrap.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EnsembleError, ScalarField3D};
use crate::numerics::{erf, golden_min};
use crate::trapmodel::{full_spin_potential, trap_center, zeeman_shift, Position, TrapConfig};
use crate::units::kelvin_to_hz;

/// m_F of the trapped state.
pub const ENSEMBLE_SPIN: i32 = 3;

/// erf(√κ) − 2√(κ/π) e^{−κ}, the regularized lower incomplete gamma P(3/2, κ).
pub fn truncation_factor(kappa: f64) -> f64 {
    if kappa <= 0.0 {
        return 0.0;
    }
    if kappa < 1.0 {
        // κ^{3/2} e^{−κ} Σ κⁿ/Γ(5/2 + n), free of the cancellation in the erf form
        let mut term = 1.0 / 1.329_340_388_179_137; // 1/Γ(5/2)
        let mut sum = term;
        let mut a = 2.5;
        for _ in 0..60 {
            term *= kappa / a;
            a += 1.0;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return kappa.powf(1.5) * (-kappa).exp() * sum;
    }
    if kappa > 40.0 {
        return 1.0;
    }
    erf(kappa.sqrt()) - 2.0 * (kappa / std::f64::consts::PI).sqrt() * (-kappa).exp()
}

/// e^{−u/k_BT} · P(3/2, (ε − u)/k_BT) with energies in Hz.
#[inline]
pub fn occupation(u: f64, eps: f64, kt: f64) -> f64 {
    if u >= eps {
        return 0.0;
    }
    (-u / kt).exp() * truncation_factor((eps - u) / kt)
}

/// Thermal state of the trapped cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    /// K.
    pub temperature: f64,
    /// ε_t above the trap bottom, Hz.
    pub truncation: f64,
    /// Peak density scale n₀, m⁻³.
    pub n0: f64,
    /// Absolute full-spin potential at the trap bottom, Hz.
    pub bottom: f64,
    pub config: TrapConfig,
}

impl ThermalState {
    /// State truncated at min(depth, `barrier`), with `barrier` in Hz above the bottom.
    pub fn new(cfg: &TrapConfig, temperature: f64, barrier: f64, n0: f64) -> Result<Self, EnsembleError> {
        if !(temperature > 0.0 && n0 > 0.0) {
            return Err(EnsembleError::InvalidInput(format!("T = {temperature}, n0 = {n0}")));
        }
        let (_, bottom, depth) = trap_bottom(cfg)?;
        Ok(Self { temperature, truncation: barrier.min(depth).max(0.0), n0, bottom, config: cfg.clone() })
    }
}

/// Trap-bottom position, absolute full-spin potential there, and the depth
/// relative to the far field (where only the bias Zeeman shift remains).
pub fn trap_bottom(cfg: &TrapConfig) -> Result<(Position, f64, f64), EnsembleError> {
    let (zc, _) = trap_center(cfg)?;
    let f = |z: f64| full_spin_potential(&Position::new(0.0, 0.0, z), ENSEMBLE_SPIN, cfg).unwrap_or(f64::INFINITY);
    let (z, u) = golden_min(f, zc - 50e-9, zc + 50e-9, 1e-14);
    let far = zeeman_shift(ENSEMBLE_SPIN, cfg.bias_field, cfg);
    Ok((Position::new(0.0, 0.0, z), u, far - u))
}

/// Truncated-Boltzmann density; zero outside the classically allowed region.
pub fn truncated_density(p: &Position, ts: &ThermalState) -> Result<f64, EnsembleError> {
    let u = full_spin_potential(p, ENSEMBLE_SPIN, &ts.config)? - ts.bottom;
    Ok(ts.n0 * occupation(u.max(0.0), ts.truncation, kelvin_to_hz(ts.temperature)))
}

/// Integration box and sampling for ensemble integrals. Simpson's rule is
/// applied along each axis, so the counts are forced odd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleGrid {
    pub x_half: f64,
    pub y_half: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// Energy histogram bins over [0, depth].
    pub bins: usize,
}

impl Default for EnsembleGrid {
    fn default() -> Self {
        Self {
            x_half: 0.45e-6,
            y_half: 12e-6,
            z_min: 50e-9,
            z_max: 2.5e-6,
            nx: 91,
            ny: 241,
            nz: 247,
            bins: 4_000,
        }
    }
}

impl EnsembleGrid {
    pub fn contains(&self, p: &Position) -> bool {
        p.x.abs() <= self.x_half && p.y.abs() <= self.y_half && p.z >= self.z_min && p.z <= self.z_max
    }

    fn axis(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let n = n.max(3) | 1;
        let h = (hi - lo) / (n - 1) as f64;
        let pts = (0..n).map(|i| lo + h * i as f64).collect();
        let w = (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        (pts, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xz,
    Yz,
}

/// Density sampled on a plane through the trap bottom; `values[i][j]` at
/// (`first[i]`, `second[j]`), where `second` is always z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMap {
    pub plane: Plane,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// The probe trap sampled once on an [`EnsembleGrid`]; thermal integrals at
/// any temperature and truncation reuse the sampled potential.
#[derive(Debug, Clone)]
pub struct ThermalTrap {
    pub config: TrapConfig,
    pub grid: EnsembleGrid,
    /// Trap-bottom position.
    pub center: Position,
    /// Absolute full-spin potential at the bottom, Hz.
    pub bottom: f64,
    /// Depth relative to the far field, Hz.
    pub depth: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    zs: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    wz: Vec<f64>,
    /// u = U − U_bottom per grid point, Hz; index (i·ny + j)·nz + k.
    u: Vec<f32>,
    bin_weight: Vec<f64>,
    bin_energy: Vec<f64>,
}

impl ThermalTrap {
    pub fn new(cfg: &TrapConfig, grid: &EnsembleGrid) -> Result<Self, EnsembleError> {
        let (center, bottom, depth) = trap_bottom(cfg)?;
        if !(depth > 0.0) {
            return Err(EnsembleError::InvalidInput(format!("trap depth {depth} Hz is not positive")));
        }
        let (xs, wx) = EnsembleGrid::axis(-grid.x_half, grid.x_half, grid.nx);
        let (ys, wy) = EnsembleGrid::axis(-grid.y_half, grid.y_half, grid.ny);
        let (zs, wz) = EnsembleGrid::axis(grid.z_min, grid.z_max, grid.nz);
        let (ny, nz) = (ys.len(), zs.len());
        let slabs: Vec<Vec<f32>> = xs
            .par_iter()
            .map(|&x| {
                let mut slab = Vec::with_capacity(ny * nz);
                for &y in &ys {
                    for &z in &zs {
                        let u = full_spin_potential(&Position::new(x, y, z), ENSEMBLE_SPIN, cfg)
                            .map(|v| (v - bottom).max(0.0))
                            .unwrap_or(f64::INFINITY);
                        slab.push(u as f32);
                    }
                }
                slab
            })
            .collect();
        let u: Vec<f32> = slabs.into_iter().flatten().collect();

        let bins = grid.bins.max(100);
        let width = depth / bins as f64;
        let mut bin_weight = vec![0.0; bins];
        let mut bin_moment = vec![0.0; bins];
        for (i, wxi) in wx.iter().enumerate() {
            for (j, wyj) in wy.iter().enumerate() {
                let base = (i * ny + j) * nz;
                for (k, wzk) in wz.iter().enumerate() {
                    let e = u[base + k] as f64;
                    if e < depth {
                        let b = ((e / width) as usize).min(bins - 1);
                        let w = wxi * wyj * wzk;
                        bin_weight[b] += w;
                        bin_moment[b] += w * e;
                    }
                }
            }
        }
        let bin_energy = bin_weight
            .iter()
            .zip(&bin_moment)
            .enumerate()
            .map(|(b, (w, m))| if *w > 0.0 { m / w } else { (b as f64 + 0.5) * width })
            .collect();
        Ok(Self {
            config: cfg.clone(),
            grid: *grid,
            center,
            bottom,
            depth,
            xs,
            ys,
            zs,
            wx,
            wy,
            wz,
            u,
            bin_weight,
            bin_energy,
        })
    }

    /// ε_t = min(depth, barrier) for a barrier in Hz above the bottom.
    pub fn truncation(&self, barrier: f64) -> f64 {
        barrier.min(self.depth).max(0.0)
    }

    /// ∫ e^{−u/k_BT} P(3/2, (ε − u)/k_BT) d³r over the box, m³.
    pub fn population(&self, eps: f64, temperature: f64) -> f64 {
        let kt = kelvin_to_hz(temperature);
        let eps = self.truncation(eps);
        self.bin_weight
            .iter()
            .zip(&self.bin_energy)
            .take_while(|(_, e)| **e < eps)
            .map(|(w, e)| w * occupation(*e, eps, kt))
            .sum()
    }

    /// N(ε_t(ΔU))/N(depth) for a barrier ΔU in Hz above the bottom.
    pub fn survival(&self, barrier: f64, temperature: f64) -> f64 {
        if !(barrier > 0.0) {
            return 0.0;
        }
        if barrier >= self.depth {
            return 1.0;
        }
        (self.population(barrier, temperature) / self.population(self.depth, temperature)).clamp(0.0, 1.0)
    }

    /// P(ΔU) for several barriers (Hz above the bottom) sharing one normalization.
    pub fn survival_curve(&self, barriers: &[f64], temperature: f64) -> Vec<f64> {
        let norm = self.population(self.depth, temperature);
        barriers
            .iter()
            .map(|&b| {
                if !(b > 0.0) {
                    0.0
                } else if b >= self.depth {
                    1.0
                } else {
                    (self.population(b, temperature) / norm).clamp(0.0, 1.0)
                }
            })
            .collect()
    }

    fn weighted_sum<F>(&self, temperature: f64, mut f: F) -> f64
    where
        F: FnMut(&Position) -> f64,
    {
        let kt = kelvin_to_hz(temperature);
        let (ny, nz) = (self.ys.len(), self.zs.len());
        let mut total = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &y) in self.ys.iter().enumerate() {
                let base = (i * ny + j) * nz;
                let wxy = self.wx[i] * self.wy[j];
                for (k, &z) in self.zs.iter().enumerate() {
                    let n = occupation(self.u[base + k] as f64, self.depth, kt);
                    if n > 0.0 {
                        total += wxy * self.wz[k] * n * f(&Position::new(x, y, z));
                    }
                }
            }
        }
        total
    }

    /// Density-weighted mean of `f` for the cloud truncated at the trap depth.
    pub fn density_mean<F: ScalarField3D>(&self, temperature: f64, f: &F) -> f64 {
        let norm = self.weighted_sum(temperature, |_| 1.0);
        self.weighted_sum(temperature, |p| f.value(p)) / norm
    }

    /// Centroid and rms size (σ_x, σ_y, σ_z) in meters.
    pub fn moments(&self, temperature: f64) -> (Position, [f64; 3]) {
        let mut s = [0.0; 7];
        let kt = kelvin_to_hz(temperature);
        let (ny, nz) = (self.ys.len(), self.zs.len());
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &y) in self.ys.iter().enumerate() {
                let base = (i * ny + j) * nz;
                let wxy = self.wx[i] * self.wy[j];
                for (k, &z) in self.zs.iter().enumerate() {
                    let n = occupation(self.u[base + k] as f64, self.depth, kt);
                    if n > 0.0 {
                        let w = wxy * self.wz[k] * n;
                        s[0] += w;
                        s[1] += w * x;
                        s[2] += w * y;
                        s[3] += w * z;
                        s[4] += w * x * x;
                        s[5] += w * y * y;
                        s[6] += w * z * z;
                    }
                }
            }
        }
        let m = [s[1] / s[0], s[2] / s[0], s[3] / s[0]];
        let var = |k: usize, mean: f64| (s[k] / s[0] - mean * mean).max(0.0).sqrt();
        (Position::new(m[0], m[1], m[2]), [var(4, m[0]), var(5, m[1]), var(6, m[2])])
    }

    /// rms sizes (σ_x, σ_y, σ_z), m.
    pub fn rms_sizes(&self, temperature: f64) -> [f64; 3] {
        self.moments(temperature).1
    }

    /// Thermal state truncated at the trap depth.
    pub fn state(&self, temperature: f64, n0: f64) -> ThermalState {
        ThermalState { temperature, truncation: self.depth, n0, bottom: self.bottom, config: self.config.clone() }
    }

    /// n(r) on `n1 × n2` points of the requested plane through the trap bottom.
    pub fn density_map(
        &self,
        temperature: f64,
        n0: f64,
        plane: Plane,
        n1: usize,
        n2: usize,
    ) -> Result<DensityMap, EnsembleError> {
        if n1 < 2 || n2 < 2 {
            return Err(EnsembleError::InvalidInput("density map needs at least 2×2 points".into()));
        }
        let ts = self.state(temperature, n0);
        let g = &self.grid;
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        };
        let first = match plane {
            Plane::Xz => lin(-g.x_half, g.x_half, n1),
            Plane::Yz => lin(-g.y_half, g.y_half, n1),
        };
        let second = lin(g.z_min, g.z_max, n2);
        let values = first
            .par_iter()
            .map(|&a| {
                second
                    .iter()
                    .map(|&z| {
                        let p = match plane {
                            Plane::Xz => Position::new(a, self.center.y, z),
                            Plane::Yz => Position::new(self.center.x, a, z),
                        };
                        truncated_density(&p, &ts)
                    })
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DensityMap { plane, first, second, values })
    }
}
