//! Numerical kernels shared by the physics modules.

pub mod eigen;
pub mod grid;
pub mod lsq;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod special;

pub use eigen::{bound_state_energies, solve_bound_states, EigenSystem};
pub use grid::Grid1D;
pub use lsq::{fit_curve, fit_nonlinear, FitData, FitOptions, FitProblem, FitResult, Param};
pub use ode::{integrate_ode, integrate_ode_with, OdeOptions, Trajectory};
pub use quad::{quad_1d, quad_1d_try, quad_nd, Domain};
pub use roots::{brent_root, golden_min};
pub use special::{erf, ln_gamma};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too coarse: {points_per_wavelength:.2} points per de Broglie wavelength (need 10)")]
    Resolution { points_per_wavelength: f64 },
    #[error("no bound state below {max_energy} Hz")]
    NoBoundStates { max_energy: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("step size underflow at t = {t}; problem is stiff or singular")]
    Stiffness { t: f64 },
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureTolerance { tol: f64, estimate: f64 },
}
