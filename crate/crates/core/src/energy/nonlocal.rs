//! Nonlocal perimeters and pair interactions of lattice sets.

use serde::{Deserialize, Serialize};

use super::lattice::{lattice_kernel, WeightMode};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::shapes::{perimeter, GridSet};

/// Near-field split and sub-sampling used for lattice energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Split radius; `None` means six cells.
    pub near_field_radius: Option<f64>,
    /// Samples per axis when averaging the kernel over a cell.
    pub subsample: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            near_field_radius: None,
            subsample: 4,
        }
    }
}

impl QuadratureSpec {
    pub fn radius(&self, h: f64) -> Result<f64> {
        let delta = self.near_field_radius.unwrap_or(6.0 * h);
        if !(delta >= 2.0 * h * (1.0 - 1e-12)) {
            return Err(Error::invalid(format!(
                "near-field radius under-resolved: {delta} < 2h = {}",
                2.0 * h
            )));
        }
        if self.subsample == 0 {
            return Err(Error::invalid("subsample factor must be positive"));
        }
        Ok(delta)
    }
}

/// The two pieces of a lattice nonlocal perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlocalParts {
    pub far: f64,
    pub near: f64,
    pub perimeter: f64,
    pub delta: f64,
    /// Band coefficient normalised by `δ^{1−s}`.
    pub c_near: f64,
}

impl NonlocalParts {
    pub fn total(&self) -> f64 {
        self.far + self.near
    }
}

fn check_planar(set: &GridSet, kernel: &KernelSpec) -> Result<()> {
    if kernel.n != 2 {
        return Err(Error::invalid("grid energies need a planar kernel"));
    }
    if set.is_empty() {
        return Err(Error::invalid("nonlocal perimeter of an empty set"));
    }
    Ok(())
}

/// `2∬ K(x − y) χ_E(x) χ_{Eᶜ}(y)` split into a far lattice sum and a
/// boundary-band term proportional to the perimeter.
pub fn nonlocal_parts(set: &GridSet, kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<NonlocalParts> {
    check_planar(set, kernel)?;
    let spec = set.spec();
    let h = spec.spacing;
    let delta = quad.radius(h)?;
    let lk = lattice_kernel(kernel, h, spec.cells_x, spec.cells_y, delta, quad.subsample, WeightMode::Far)?;
    let inner = lk.self_sum(set.mask())?;
    let far = 2.0 * (set.count() as f64 * lk.far_total - inner);
    let per = perimeter(set);
    Ok(NonlocalParts {
        far,
        near: lk.near_coef * per,
        perimeter: per,
        delta,
        c_near: lk.near_coef / delta.powf(1.0 - kernel.s()),
    })
}

pub fn nonlocal_perimeter(set: &GridSet, kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<f64> {
    Ok(nonlocal_parts(set, kernel, quad)?.total())
}

/// `4∬ K(x − y) χ_A(x) χ_B(y)` for disjoint sets on one grid.
pub fn interaction_energy(a: &GridSet, b: &GridSet, kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<f64> {
    if a.overlaps(b)? {
        return Err(Error::invalid("interacting sets overlap"));
    }
    if kernel.n != 2 {
        return Err(Error::invalid("grid energies need a planar kernel"));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let spec = a.spec();
    let lk = lattice_kernel(kernel, spec.spacing, spec.cells_x, spec.cells_y, 0.0, quad.subsample, WeightMode::Pairs)?;
    Ok((4.0 * lk.cross_sum(a.mask(), b.mask())?).max(0.0))
}

/// `∫χ_E (K ∗ χ_E)`, or `None` when the kernel does not have unit mass.
pub fn vk_energy(set: &GridSet, kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<Option<f64>> {
    let mass = kernel.mass();
    if kernel.n != 2 || !mass.is_finite() || (mass - 1.0).abs() > 1e-2 {
        return Ok(None);
    }
    if set.is_empty() {
        return Ok(Some(0.0));
    }
    let spec = set.spec();
    let lk = lattice_kernel(
        kernel,
        spec.spacing,
        spec.cells_x,
        spec.cells_y,
        0.0,
        quad.subsample,
        WeightMode::PairsWithSelf,
    )?;
    Ok(Some(lk.self_sum(set.mask())?))
}
