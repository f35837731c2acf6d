//! Density lower bounds of a set and its complement at boundary points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shapes::GridSet;

pub const DEFAULT_DENSITY_FLOOR: f64 = 0.05;
const MAX_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub radius: f64,
    /// Smallest `|E ∩ B_r| / r²` over the sampled boundary cells.
    pub inner: f64,
    /// Smallest `|Eᶜ ∩ B_r| / r²`.
    pub outer: f64,
    pub inner_flag: bool,
    pub outer_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityAudit {
    pub alpha: f64,
    pub floor: f64,
    pub samples: usize,
    pub rows: Vec<DensityRow>,
}

impl DensityAudit {
    pub fn flagged(&self) -> bool {
        self.rows.iter().any(|r| r.inner_flag || r.outer_flag)
    }
}

/// Audit with the default floor.
pub fn nondegeneracy_audit(set: &GridSet, alpha: f64, radii: &[f64]) -> Result<DensityAudit> {
    nondegeneracy_audit_with(set, alpha, radii, DEFAULT_DENSITY_FLOOR)
}

/// Ball densities centred on up to 256 evenly strided boundary cells; cells
/// off the grid count as complement.
pub fn nondegeneracy_audit_with(set: &GridSet, alpha: f64, radii: &[f64], floor: f64) -> Result<DensityAudit> {
    if set.is_empty() {
        return Err(Error::invalid("audit of an empty set"));
    }
    let spec = set.spec();
    let h = spec.spacing;
    if let Some(r) = radii.iter().find(|&&r| !(r >= 3.0 * h * (1.0 - 1e-12))) {
        return Err(Error::invalid(format!("audit radius {r} below three cells")));
    }
    let boundary: Vec<(usize, usize)> = set
        .cells()
        .filter(|&(ix, iy)| {
            let (x, y) = (ix as i64, iy as i64);
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|&(dx, dy)| !set.get_signed(x + dx, y + dy))
        })
        .collect();
    let stride = boundary.len().div_ceil(MAX_SAMPLES).max(1);
    let picks: Vec<(usize, usize)> = boundary.iter().step_by(stride).copied().collect();
    let rows = radii
        .iter()
        .map(|&r| {
            let reach = (r / h).floor() as i64;
            let r2 = (r / h).powi(2);
            let (mut inner, mut outer) = (f64::INFINITY, f64::INFINITY);
            for &(ix, iy) in &picks {
                let (mut a, mut b) = (0usize, 0usize);
                for dy in -reach..=reach {
                    for dx in -reach..=reach {
                        if ((dx * dx + dy * dy) as f64) <= r2 {
                            if set.get_signed(ix as i64 + dx, iy as i64 + dy) {
                                a += 1;
                            } else {
                                b += 1;
                            }
                        }
                    }
                }
                let scale = h * h / (r * r);
                inner = inner.min(a as f64 * scale);
                outer = outer.min(b as f64 * scale);
            }
            DensityRow {
                radius: r,
                inner,
                outer,
                inner_flag: inner < floor,
                outer_flag: outer < floor,
            }
        })
        .collect();
    Ok(DensityAudit {
        alpha,
        floor,
        samples: picks.len(),
        rows,
    })
}
