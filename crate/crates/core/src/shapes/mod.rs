//! Planar sets on square lattices and star-shaped curves, with their
//! geometric measurements.

mod components;
mod edt;
mod grid;
pub mod io;
mod measure;
mod perimeter;
mod star;

pub use components::components;
pub use edt::{distance_to_complement, inscribed_radius};
pub use grid::{GridSet, GridSpec, Placement, Point, ShapeCollection};
pub use measure::{ball_asymmetry, diameter, isoperimetric_deficit, volume};
pub use perimeter::{perimeter, PerimeterField};
pub use star::{star_perimeter, star_volume, RadiusInterpolant, StarShape};

use crate::error::{Error, Result};

/// Cells whose centre lies in the closed disk of `radius` about `center`.
pub fn rasterize_ball(center: Point, radius: f64, spec: GridSpec) -> Result<GridSet> {
    if !(radius >= 0.0) {
        return Err(Error::invalid(format!("radius must be non-negative, got {radius}")));
    }
    let (x0, y0) = (spec.origin.x, spec.origin.y);
    let (x1, y1) = (x0 + spec.width(), y0 + spec.height());
    if center.x - radius < x0 || center.y - radius < y0 || center.x + radius > x1 || center.y + radius > y1 {
        return Err(Error::invalid(format!(
            "ball needs extent [{}, {}] x [{}, {}], grid covers [{x0}, {x1}] x [{y0}, {y1}]",
            center.x - radius,
            center.x + radius,
            center.y - radius,
            center.y + radius
        )));
    }
    let r2 = radius * radius;
    Ok(GridSet::from_fn(spec, |p| {
        (p.x - center.x).powi(2) + (p.y - center.y).powi(2) <= r2
    }))
}
