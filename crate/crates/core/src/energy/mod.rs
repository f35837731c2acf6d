//! Energies.

mod fft;
pub mod lattice;
mod ball;
mod boundary;
mod diagnostics;
mod functional;
mod nonlocal;

pub use ball::{ball_overlap_defect, ball_pk, BallQuadrature};
pub use boundary::{singular_weights, star_fractional_perimeter, star_frame};
pub use diagnostics::{dilate, dilation_bound_check, dilation_sweep, gn_check, gn_constant, limit_sweep, DilationReport, DilationSweep, GNReport, LimitRow, LimitTable, GN_SLACK};
pub use functional::{confinement_moment, g_alpha, j_alpha, place_components, CollectionEnergy, EnergyBreakdown};
pub use lattice::{lattice_kernel, LatticeKernel, WeightMode};
pub use nonlocal::{interaction_energy, nonlocal_parts, nonlocal_perimeter, vk_energy, NonlocalParts, QuadratureSpec};
