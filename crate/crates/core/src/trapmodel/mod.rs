//! Trap potentials above the microring: guide beam, evanescent barrier,
//! Casimir–Polder attraction and the vector-shift fictitious field.

pub mod calibrate;
pub mod config;
pub mod field;
pub mod potential;

pub use calibrate::{calibrate, Calibration, CalibrationTargets};
pub use config::TrapConfig;
pub use field::{fictitious_field, full_spin_potential, xi_coefficient, zeeman_shift, FictitiousField};
pub use potential::{
    axial_minimum_count, barrier_potential, casimir_polder, corrugation_visibility, ey_fraction, guide_potential,
    near_field_potential, total_potential, trap_center, trap_depth,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::NumericsError;

/// Position above the waveguide: z from the top surface, x across the
/// waveguide, y along the local propagation direction. Meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("invalid trap configuration: {0}")]
    InvalidConfig(String),
    #[error("outside model validity: {0}")]
    Domain(String),
    #[error("no trap minimum: {0}")]
    NoMinimum(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
