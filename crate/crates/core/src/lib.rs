//! Two-electron states of a laterally coupled GaAs double quantum dot in a
//! perpendicular magnetic field.
//!
//! Energies are in meV, lengths in nm, fields in tesla.

pub mod analysis;
pub mod basis;
pub mod error;
mod gaussian;
pub mod integrals;
pub mod model;
pub mod mo_solver;
mod quadrature;
pub mod uhf;
pub mod variational;

pub use error::{Error, Result};
pub use model::{ConfinementPotential, FieldConfig, MaterialParams};
