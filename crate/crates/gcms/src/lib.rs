//! Generalized countable Markov shifts: sequence space, configuration space,
//! cylinder algebra, thermodynamic formalism and conformal measures.

pub mod config_space;
pub mod cylinder_algebra;
pub mod error;
pub mod measures;
pub mod series;
pub mod shift_space;
pub mod thermo;

pub use error::{GcmsError, Result};
