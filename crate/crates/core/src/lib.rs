//! Atom trapping on a nanophotonic microring: trap potentials, spin-motion
//! Raman coupling, collective cavity spectra, superradiant decay, trap-spill
//! thermometry and loss kinetics.
//!
//! Energies are E/h in Hz and rates are ordinary frequencies throughout.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cavity;
pub mod data;
pub mod ensemble;
pub mod kinetics;
pub mod numerics;
pub mod spinmotion;
pub mod synth;
pub mod trapmodel;
pub mod units;

pub use cavity::{CavityError, CollectiveCoupling, DecayDataset, ResonatorParams, SpectrumDataset};
pub use ensemble::{EnsembleError, SpillDataset, ThermalState, ThermalTrap};
pub use kinetics::{KineticsError, LossModel, ModelFamily, TimeSeries};
pub use numerics::{EigenSystem, FitResult, Grid1D, NumericsError};
pub use spinmotion::{Axis, RamanMatrix};
pub use trapmodel::{Position, TrapConfig, TrapError};
