//! Nonlocal isoperimetric energies `P(E) − α s(1−s) P_K(E)` on planar grids.
//!
//! The crate is organised as
//! - [`shapes`]: lattice sets, star curves and their measurements,
//! - [`kernels`]: radial interaction kernels including the Bessel-type one,
//! - [`energy`]: perimeters, nonlocal perimeters and assembled energies,
//! - [`spectral`]: stability thresholds of the ball,
//! - [`optimize`]: annealing, star descent, splitting and constant searches.

pub mod config;
pub mod consts;
pub mod energy;
pub mod error;
pub mod kernels;
pub mod optimize;
pub mod quadrature;
pub mod shapes;
pub mod spectral;

pub use error::{Error, Result};
