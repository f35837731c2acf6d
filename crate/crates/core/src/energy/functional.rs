//! Assembled energies `P − α s(1−s) P_K` of single sets and collections.

use serde::Serialize;

use super::nonlocal::{interaction_energy, nonlocal_parts, QuadratureSpec};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::shapes::{volume, GridSet, GridSpec, Placement, Point, ShapeCollection};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub volume: f64,
    pub perimeter: f64,
    pub pk: f64,
    /// Fractional perimeter, filled for power-law kernels.
    pub ps: Option<f64>,
    pub jalpha: f64,
    /// `∫|x − x̄| χ_E` about the barycenter, when a confinement weight is given.
    pub confinement: Option<f64>,
    /// Scale-free coupling `α m^{(1−s)/2}`.
    pub gamma: f64,
}

/// `Σ |x_c − x̄| h²` over the cells of a nonempty set.
pub fn confinement_moment(set: &GridSet) -> f64 {
    let Some(bar) = set.barycenter() else {
        return 0.0;
    };
    let spec = set.spec();
    set.cells().map(|(ix, iy)| spec.center(ix, iy).dist(bar)).sum::<f64>() * spec.cell_area()
}

pub fn j_alpha(
    set: &GridSet,
    alpha: f64,
    kernel: &KernelSpec,
    conf_beta: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<EnergyBreakdown> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid(format!("coupling must be non-negative, got {alpha}")));
    }
    let s = kernel.s();
    let parts = nonlocal_parts(set, kernel, quad)?;
    let pk = parts.total();
    let m = volume(set);
    let mut jalpha = parts.perimeter - alpha * s * (1.0 - s) * pk;
    let confinement = conf_beta.map(|b| {
        let c = confinement_moment(set);
        jalpha += b * c;
        c
    });
    Ok(EnergyBreakdown {
        volume: m,
        perimeter: parts.perimeter,
        pk,
        ps: kernel.is_power_law().then_some(pk),
        jalpha,
        confinement,
        gamma: alpha * m.powf((1.0 - s) / 2.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollectionEnergy {
    /// Sum of the component energies.
    pub total: f64,
    pub components: Vec<EnergyBreakdown>,
    /// `4∬Kχ_Aχ_B` summed over pairs of placed components; the union's
    /// kernel perimeter falls short of the sum by this amount.
    pub interaction: f64,
}

/// Places every component with an offset on one common grid.
pub fn place_components(collection: &ShapeCollection) -> Result<Vec<GridSet>> {
    let placed: Vec<(&GridSet, Point)> = collection
        .components
        .iter()
        .zip(&collection.placement)
        .filter_map(|(c, p)| match p {
            Placement::Offset(o) => Some((c, *o)),
            Placement::AtInfinity => None,
        })
        .collect();
    let Some(first) = placed.first() else {
        return Ok(Vec::new());
    };
    let h = first.0.spec().spacing;
    if placed.iter().any(|(c, _)| ((c.spec().spacing - h) / h).abs() > 1e-12) {
        return Err(Error::invalid("placed components must share a grid spacing"));
    }
    let corner = |c: &GridSet, o: Point| Point::new(c.spec().origin.x + o.x, c.spec().origin.y + o.y);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (c, o) in &placed {
        let p = corner(c, *o);
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x + c.spec().width());
        y1 = y1.max(p.y + c.spec().height());
    }
    let nx = ((x1 - x0) / h).round() as usize + 1;
    let ny = ((y1 - y0) / h).round() as usize + 1;
    let spec = GridSpec::new(nx, ny, h, Point::new(x0, y0))?;
    let mut out = Vec::with_capacity(placed.len());
    for (c, o) in &placed {
        let p = corner(c, *o);
        let (sx, sy) = (((p.x - x0) / h).round() as usize, ((p.y - y0) / h).round() as usize);
        let mut g = GridSet::empty(spec);
        for (ix, iy) in c.cells() {
            g.set(ix + sx, iy + sy, true);
        }
        if out.iter().any(|q: &GridSet| q.overlaps(&g).unwrap_or(true)) {
            return Err(Error::invalid("placed components overlap"));
        }
        out.push(g);
    }
    Ok(out)
}

/// `Σ J_α(E_i)` over the components, with the pairwise interaction of placed
/// components reported separately.
pub fn g_alpha(
    collection: &ShapeCollection,
    alpha: f64,
    kernel: &KernelSpec,
    quad: &QuadratureSpec,
) -> Result<CollectionEnergy> {
    if collection.components.iter().any(|c| c.is_empty()) {
        return Err(Error::invalid("collection has an empty component"));
    }
    let placed = place_components(collection)?;
    let components = collection
        .components
        .iter()
        .map(|c| j_alpha(c, alpha, kernel, None, quad))
        .collect::<Result<Vec<_>>>()?;
    let mut interaction = 0.0;
    for i in 0..placed.len() {
        for j in i + 1..placed.len() {
            interaction += interaction_energy(&placed[i], &placed[j], kernel, quad)?;
        }
    }
    Ok(CollectionEnergy {
        total: components.iter().map(|c| c.jalpha).sum(),
        components,
        interaction,
    })
}
