//! Quasienergies of periodically driven two-level systems from the periodic
//! classical trajectories on the Bloch sphere, with exact series expansions
//! and closed-form special cases.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod exact_models;
pub mod fourier;
pub mod par;
pub mod poisson;
pub mod quasienergy;
pub mod resonance;
pub mod scaled;
pub mod series;
pub mod series_limits;
pub mod specfun;

pub use dynamics::{BlochVector, DriveField, DriveParams, PeriodicOrbit};
pub use error::{Error, Result};
