//! Separable trap eigensystems and Raman coupling between motional levels.

use serde::{Deserialize, Serialize};

use crate::numerics::{bound_state_energies, solve_bound_states, EigenSystem, Grid1D};
use crate::trapmodel::{fictitious_field, total_potential, trap_center, Position, TrapConfig, TrapError};
use crate::units::{CS_MASS, MU_B_OVER_H};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Sampling of the axis cuts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxisResolution {
    pub z_min: f64,
    pub z_max: f64,
    pub z_step: f64,
    /// Fraction of the transverse window π/(2q) spanned along x.
    pub x_fraction: f64,
    pub x_step: f64,
    pub y_half: f64,
    pub y_step: f64,
}

impl Default for AxisResolution {
    fn default() -> Self {
        Self {
            z_min: 50e-9,
            z_max: 3.0e-6,
            z_step: 0.25e-9,
            x_fraction: 0.99,
            x_step: 0.25e-9,
            y_half: 20e-6,
            y_step: 1.6e-9,
        }
    }
}

/// 1D cut of U_tot through the trap center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisCut {
    pub axis: Axis,
    pub grid: Grid1D,
    /// Hz.
    pub potential: Vec<f64>,
    pub center: Position,
    /// Lower of the two end values; states below it are bound.
    pub max_energy: f64,
}

impl AxisCut {
    pub fn position(&self, s: f64) -> Position {
        let c = self.center;
        match self.axis {
            Axis::X => Position::new(s, c.y, c.z),
            Axis::Y => Position::new(c.x, s, c.z),
            Axis::Z => Position::new(c.x, c.y, s),
        }
    }

    pub fn minimum(&self) -> f64 {
        self.potential.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn trap_axis_potential(axis: Axis, cfg: &TrapConfig) -> Result<AxisCut, TrapError> {
    trap_axis_potential_with(axis, cfg, &AxisResolution::default())
}

pub fn trap_axis_potential_with(axis: Axis, cfg: &TrapConfig, res: &AxisResolution) -> Result<AxisCut, TrapError> {
    let (zc, _) = trap_center(cfg)?;
    let grid = match axis {
        Axis::Z => Grid1D::with_spacing(res.z_min, res.z_max, res.z_step)?,
        Axis::X => {
            let half = res.x_fraction * cfg.transverse_half_width();
            Grid1D::with_spacing(-half, half, res.x_step)?
        }
        Axis::Y => Grid1D::with_spacing(-res.y_half, res.y_half, res.y_step)?,
    };
    let center = Position::new(0.0, 0.0, zc);
    let mut cut = AxisCut { axis, grid, potential: Vec::new(), center, max_energy: 0.0 };
    cut.potential = cut
        .grid
        .points()
        .iter()
        .map(|&s| total_potential(&cut.position(s), cfg))
        .collect::<Result<_, _>>()?;
    cut.max_energy = cut.potential[0].min(cut.potential[cut.potential.len() - 1]);
    Ok(cut)
}

/// All bound eigenpairs of a cut.
pub fn axis_eigensystem(cut: &AxisCut) -> Result<EigenSystem, TrapError> {
    Ok(solve_bound_states(&cut.grid, &cut.potential, CS_MASS, cut.max_energy)?)
}

/// Bound-state energies of a cut, optionally capped below the cut's own limit.
pub fn axis_energies(cut: &AxisCut, cap: Option<f64>) -> Result<Vec<f64>, TrapError> {
    let max = cap.map_or(cut.max_energy, |c| c.min(cut.max_energy));
    Ok(bound_state_energies(&cut.grid, &cut.potential, CS_MASS, max)?)
}

/// ΔE_ν = E_{ν+1} − E_ν.
pub fn level_spacings(energies: &[f64]) -> Vec<f64> {
    energies.windows(2).map(|w| w[1] - w[0]).collect()
}

/// |g_F| μ_B B₀ / h in Hz.
pub fn zeeman_splitting(b0: f64, g_f: f64) -> f64 {
    g_f.abs() * MU_B_OVER_H * b0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// m_F → m_F − 1.
    Lowering,
    /// m_F → m_F + 1.
    Raising,
}

/// |⟨m_F ∓ 1|F̂_∓|m_F⟩| = √(F(F+1) − m_F(m_F ∓ 1)).
pub fn spin_factor(f: i32, m_f: i32, branch: Branch) -> f64 {
    let (f, m) = (f as f64, m_f as f64);
    let v = match branch {
        Branch::Lowering => f * (f + 1.0) - m * (m - 1.0),
        Branch::Raising => f * (f + 1.0) - m * (m + 1.0),
    };
    v.max(0.0).sqrt()
}

/// Coupling rates |Ω_{ν,ν′}|/2π in Hz between bound states of one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanMatrix {
    pub axis: Axis,
    pub m_f_from: i32,
    pub m_f_to: i32,
    pub rates: Vec<Vec<f64>>,
}

impl RamanMatrix {
    pub fn max_rate(&self) -> f64 {
        self.rates.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// |Ω_{ν,ν−Δ}| for ν = Δ.. .
    pub fn band(&self, delta: usize) -> Vec<f64> {
        (delta..self.rates.len()).map(|n| self.rates[n][n - delta]).collect()
    }
}

/// B_fict magnitude (T) at each grid point of a cut.
pub fn axis_field_profile(cut: &AxisCut, cfg: &TrapConfig) -> Vec<f64> {
    cut.grid.points().iter().map(|&s| fictitious_field(&cut.position(s), cfg).magnitude).collect()
}

/// Ω_{ν,ν′}/2π = (g_F μ_B/h) · |⟨m_F′|F̂_±|m_F⟩| · ⟨ν′|B_fict|ν⟩.
///
/// Along y the field does not vary, so distinct levels are orthogonal and
/// the matrix is returned as all zeros.
pub fn raman_matrix(
    axis: Axis,
    m_f: i32,
    branch: Branch,
    es: &EigenSystem,
    field: &[f64],
    cfg: &TrapConfig,
) -> Result<RamanMatrix, TrapError> {
    let f = cfg.hyperfine_f;
    let m_to = match branch {
        Branch::Lowering => m_f - 1,
        Branch::Raising => m_f + 1,
    };
    if m_f.abs() > f || m_to.abs() > f {
        return Err(TrapError::InvalidConfig(format!("m_F {m_f} -> {m_to} outside F = {f}")));
    }
    if field.len() != es.grid.len() {
        return Err(TrapError::InvalidConfig("field profile and eigensystem grids differ".into()));
    }
    let n = es.len();
    let mut rates = vec![vec![0.0; n]; n];
    if axis != Axis::Y {
        let pref = (cfg.g_f * MU_B_OVER_H).abs() * spin_factor(f, m_f, branch);
        for a in 0..n {
            for b in 0..=a {
                let r = pref * es.matrix_element(a, b, field).abs();
                rates[a][b] = r;
                rates[b][a] = r;
            }
        }
    }
    Ok(RamanMatrix { axis, m_f_from: m_f, m_f_to: m_to, rates })
}
