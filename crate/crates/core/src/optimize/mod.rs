//! Optimizers.

mod anneal;
mod audit;
mod search;
mod split;
mod star;
mod width;

pub use anneal::{anneal, anneal_objective, AnnealConfig, AnnealOutcome, AnnealRecord};
pub use audit::{
    nondegeneracy_audit, nondegeneracy_audit_with, DensityAudit, DensityRow, DEFAULT_DENSITY_FLOOR,
};
pub use search::{gn_search, GNEpoch, GNSearchResult};
pub use split::{
    ball_interpolation_ratio, optimal_split, realize_ball_plan, split_energy, split_energy_rate,
    split_rate_envelope, SplitFamily, SplitPlan, SplitRate,
};
pub use star::{star_asymmetry, star_descent, StarDescent, BALL_TOLERANCE};
pub use width::{fit_line, speckle_start, width_scan, WidthRow, WidthScan};
