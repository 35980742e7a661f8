//! Truncated-Boltzmann thermodynamics of the trapped cloud: densities,
//! trap-spill survival, thermometry, vibrational occupation, cloud sizes and
//! the density-weighted atom–resonator coupling.
//!
//! Energies are measured from the trap bottom of the |F=3, m_F=3⟩ potential.
//! The truncation energy ε_t is the smaller of the probe-trap depth and the
//! spill barrier ΔU_min.

pub mod coupling;
pub mod observables;
pub mod spill;
pub mod thermal;

pub use coupling::{atom_number, mean_coupling, CouplingProfile, UniformCoupling};
pub use observables::{mean_vibrational_numbers, mean_vibrational_numbers_with, thermal_mean_level};
pub use spill::{fit_temperature, survival_probability, SpillDataset, TemperatureFit};
pub use thermal::{
    occupation, truncation_factor, truncated_density, DensityMap, EnsembleGrid, Plane, ThermalState, ThermalTrap,
    ENSEMBLE_SPIN,
};

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::trapmodel::{Position, TrapError};

/// A scalar function of position.
pub trait ScalarField3D {
    fn value(&self, p: &Position) -> f64;
}

impl<F: Fn(&Position) -> f64> ScalarField3D for F {
    fn value(&self, p: &Position) -> f64 {
        self(p)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("fewer than two bound states along {0}")]
    DegenerateAxis(&'static str),
    #[error("temperature is not identifiable from the data: {0}")]
    Unidentifiable(String),
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
