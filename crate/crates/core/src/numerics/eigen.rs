//! Bound states of the 1D Schrödinger operator on a uniform grid.
//!
//! The Hamiltonian `-ħ²/2m d²/dz² + V(z)` is discretized with the
//! symmetric three-point Laplacian and hard walls one spacing beyond each
//! end of the grid. Eigenvalues come from Sturm-sequence bisection, so
//! exactly the states below `max_energy` are returned; eigenvectors from
//! inverse iteration on a pivoted tridiagonal factorization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::roots::brent_root;
use super::NumericsError;
use crate::units::H;

/// Bound-state energies (Hz) and grid-normalized wavefunctions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenSystem {
    pub grid: Grid1D,
    pub energies: Vec<f64>,
    /// `Σ ψ_i² h = 1` for each state.
    pub wavefunctions: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `⟨a| f |b⟩` by grid quadrature.
    pub fn matrix_element(&self, a: usize, b: usize, f: &[f64]) -> f64 {
        let h = self.grid.spacing();
        self.wavefunctions[a]
            .iter()
            .zip(&self.wavefunctions[b])
            .zip(f)
            .map(|((x, y), w)| x * y * w)
            .sum::<f64>()
            * h
    }

    /// Number of interior sign changes of wavefunction `i`.
    pub fn node_count(&self, i: usize) -> usize {
        node_count(&self.wavefunctions[i])
    }
}

/// `ħ²/(2m)` divided by h, in Hz m².
pub fn kinetic_prefactor(mass: f64) -> f64 {
    H / (8.0 * std::f64::consts::PI * std::f64::consts::PI * mass)
}

const DET_RADIX: f64 = 1e150;

struct Tridiagonal {
    potential: Vec<f64>,
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    fn new(potential: &[f64], spacing: f64, mass: f64) -> Self {
        let c = kinetic_prefactor(mass) / (spacing * spacing);
        Self { potential: potential.to_vec(), diag: potential.iter().map(|v| v + 2.0 * c).collect(), off: -c }
    }

    /// Number of eigenvalues strictly below `x`.
    ///
    /// The Sturm pivots are carried as `q_i = c (1 + s_i)`, which turns the
    /// recurrence into `s_i = (V_i − x)/c + s_{i−1}/(1 + s_{i−1})` and avoids
    /// cancelling the large kinetic diagonal against `x` on fine grids.
    fn count_below(&self, x: f64) -> usize {
        let inv_c = -1.0 / self.off;
        let mut count = 0;
        let mut s = 0.0;
        for (i, &v) in self.potential.iter().enumerate() {
            let eps = (v - x) * inv_c;
            s = if i == 0 {
                eps + 1.0
            } else {
                let r = 1.0 + s;
                let r = if r == 0.0 { f64::EPSILON } else { r };
                eps + s / r
            };
            if 1.0 + s < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// All `count` eigenvalues inside `(lo, hi)`, ascending.
    ///
    /// Shared bisection isolates each eigenvalue in its own interval, then a
    /// Brent iteration on the rescaled determinant polishes it.
    fn eigenvalues(&self, lo: f64, hi: f64) -> Vec<f64> {
        let c_lo = self.count_below(lo);
        let c_hi = self.count_below(hi);
        let mut isolated: Vec<(f64, f64, usize, bool)> = Vec::with_capacity(c_hi - c_lo);
        let mut stack = vec![(lo, hi, c_lo, c_hi)];
        while let Some((a, b, ca, cb)) = stack.pop() {
            if cb == ca {
                continue;
            }
            let tiny = 4.0 * f64::EPSILON * a.abs().max(b.abs());
            if cb == ca + 1 || b - a <= tiny {
                for k in ca..cb {
                    isolated.push((a, b, k, cb == ca + 1));
                }
                continue;
            }
            let mid = 0.5 * (a + b);
            let cm = self.count_below(mid);
            stack.push((mid, b, cm, cb));
            stack.push((a, mid, ca, cm));
        }
        isolated.sort_by_key(|&(_, _, k, _)| k);
        isolated
            .into_par_iter()
            .map(|(a, b, k, single)| if single { self.polish(a, b, k) } else { self.bisect(k, a, b) })
            .collect()
    }

    /// det(T − x)/cⁿ as a mantissa times a power of `DET_RADIX`.
    fn scaled_det(&self, x: f64) -> (f64, i32) {
        let inv_c = -1.0 / self.off;
        let mut s = 0.0;
        let mut mant = 1.0;
        let mut exp = 0;
        for (i, &v) in self.potential.iter().enumerate() {
            let eps = (v - x) * inv_c;
            s = if i == 0 {
                eps + 1.0
            } else {
                let r = 1.0 + s;
                let r = if r == 0.0 { f64::EPSILON } else { r };
                eps + s / r
            };
            mant *= 1.0 + s;
            if mant.abs() > DET_RADIX {
                mant /= DET_RADIX;
                exp += 1;
            } else if mant.abs() < 1.0 / DET_RADIX {
                mant *= DET_RADIX;
                exp -= 1;
            }
        }
        (mant, exp)
    }

    /// Eigenvalue `k`, the only one in `[a, b]`, as the root of det(T − x).
    fn polish(&self, a: f64, b: f64, k: usize) -> f64 {
        let (_, e_ref) = self.scaled_det(a);
        let det = |x: f64| {
            let (m, e) = self.scaled_det(x);
            Ok(m * DET_RADIX.powi((e - e_ref).clamp(-2, 2)))
        };
        brent_root(det, a, b, 2.0 * f64::EPSILON * a.abs().max(b.abs())).unwrap_or_else(|_| self.bisect(k, a, b))
    }

    /// k-th eigenvalue (0-based) by bisection inside `[lo, hi]`.
    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda;
        let lu = PivotedTridiagonal::factor(&self.diag, self.off, shift);
        // deterministic, non-symmetric start vector
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..3 {
            lu.solve(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut x {
                *v /= norm;
            }
        }
        x
    }
}

/// LU factorization with partial pivoting of `T - shift I` (the same
/// elimination LAPACK's `gttrf` performs).
struct PivotedTridiagonal {
    // U has up to two superdiagonals after pivoting
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagonal {
    fn factor(diag: &[f64], off: f64, shift: f64) -> Self {
        let n = diag.len();
        let tiny = f64::EPSILON * (off.abs() + diag.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut du = vec![off; n.saturating_sub(1)];
        let mut dl = vec![off; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                let piv = if d[i] == 0.0 { tiny } else { d[i] };
                d[i] = piv;
                let fact = dl[i] / piv;
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self { d, du, du2, dl, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn node_count(psi: &[f64]) -> usize {
    let peak = psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-8 * peak;
    let mut last = 0.0;
    let mut nodes = 0;
    for &v in psi {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            nodes += 1;
        }
        last = v.signum();
    }
    nodes
}

fn check_resolution(grid: &Grid1D, potential: &[f64], mass: f64, max_energy: f64) -> Result<(), NumericsError> {
    let v_min = potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let kinetic = (max_energy - v_min) * H;
    if kinetic <= 0.0 {
        return Ok(());
    }
    let wavelength = H / (2.0 * mass * kinetic).sqrt();
    let per_wavelength = wavelength / grid.spacing();
    if per_wavelength < 10.0 {
        return Err(NumericsError::Resolution { points_per_wavelength: per_wavelength });
    }
    Ok(())
}

fn prepare(grid: &Grid1D, potential: &[f64], mass: f64, max_energy: f64) -> Result<Tridiagonal, NumericsError> {
    if !grid.is_uniform() {
        return Err(NumericsError::InvalidGrid("eigensolver requires a uniform grid".into()));
    }
    if potential.len() != grid.len() {
        return Err(NumericsError::InvalidGrid(format!(
            "potential has {} samples for {} grid points",
            potential.len(),
            grid.len()
        )));
    }
    if potential.iter().any(|v| !v.is_finite()) || !max_energy.is_finite() || !(mass > 0.0) {
        return Err(NumericsError::NonFinite("bound-state problem".into()));
    }
    check_resolution(grid, potential, mass, max_energy)?;
    Ok(Tridiagonal::new(potential, grid.spacing(), mass))
}

/// Energies (Hz) of all states below `max_energy`, ascending, without wavefunctions.
pub fn bound_state_energies(
    grid: &Grid1D,
    potential: &[f64],
    mass: f64,
    max_energy: f64,
) -> Result<Vec<f64>, NumericsError> {
    let t = prepare(grid, potential, mass, max_energy)?;
    let count = t.count_below(max_energy);
    if count == 0 {
        return Err(NumericsError::NoBoundStates { max_energy });
    }
    let (lo, _) = t.bounds();
    Ok(t.eigenvalues(lo, max_energy))
}

/// All eigenpairs of the discretized Hamiltonian with energy below `max_energy`.
///
/// `potential` holds V/h (Hz) at the grid points; `mass` in kg.
pub fn solve_bound_states(
    grid: &Grid1D,
    potential: &[f64],
    mass: f64,
    max_energy: f64,
) -> Result<EigenSystem, NumericsError> {
    let t = prepare(grid, potential, mass, max_energy)?;
    let count = t.count_below(max_energy);
    if count == 0 {
        return Err(NumericsError::NoBoundStates { max_energy });
    }
    let (lo, _) = t.bounds();
    let h = grid.spacing();
    let close = 1e-9 * (max_energy - lo);
    let raw: Vec<(f64, Vec<f64>)> =
        t.eigenvalues(lo, max_energy).into_par_iter().map(|e| (e, t.eigenvector(e))).collect();
    let mut energies: Vec<f64> = Vec::with_capacity(count);
    let mut wavefunctions: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (e, mut psi) in raw {
        // re-orthogonalize against numerically close neighbours
        for (j, prev) in wavefunctions.iter().enumerate().rev() {
            if (e - energies[j]).abs() > close {
                break;
            }
            let overlap: f64 = psi.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>() * h;
            for (p, q) in psi.iter_mut().zip(prev) {
                *p -= overlap * q;
            }
        }
        let norm = (psi.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
        let first = psi.iter().cloned().find(|v| v.abs() > 1e-6 * norm / h.sqrt()).unwrap_or(1.0);
        let sign = first.signum() / norm;
        for v in &mut psi {
            *v *= sign;
        }
        energies.push(e);
        wavefunctions.push(psi);
    }
    // ties within 1e-12 relative are ordered by node count
    let mut order: Vec<usize> = (0..count).collect();
    let nodes: Vec<usize> = wavefunctions.iter().map(|w| node_count(w)).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (energies[a], energies[b]);
        if (ea - eb).abs() <= 1e-12 * ea.abs().max(eb.abs()) {
            nodes[a].cmp(&nodes[b])
        } else {
            ea.partial_cmp(&eb).unwrap()
        }
    });
    let energies = order.iter().map(|&i| energies[i]).collect();
    let wavefunctions = order.iter().map(|&i| wavefunctions[i].clone()).collect();
    Ok(EigenSystem { grid: grid.clone(), energies, wavefunctions })
}
