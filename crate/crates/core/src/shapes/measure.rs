use std::f64::consts::PI;

use super::{perimeter, GridSet, Point};
use crate::error::{Error, Result};

pub fn volume(set: &GridSet) -> f64 {
    set.count() as f64 * set.spec().cell_area()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Monotone-chain hull, counter-clockwise without collinear points.
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Largest distance between true-cell centres.
pub fn diameter(set: &GridSet) -> Result<f64> {
    let s = set.spec();
    let mut pts = Vec::new();
    for iy in 0..s.cells_y {
        let row: Vec<usize> = (0..s.cells_x).filter(|&ix| set.get(ix, iy)).collect();
        if let (Some(&a), Some(&b)) = (row.first(), row.last()) {
            pts.push(s.center(a, iy));
            pts.push(s.center(b, iy));
        }
    }
    if pts.is_empty() {
        return Err(Error::invalid("diameter of an empty set"));
    }
    let hull = convex_hull(pts);
    let n = hull.len();
    if n == 1 {
        return Ok(0.0);
    }
    if n == 2 {
        return Ok(hull[0].dist(hull[1]));
    }
    // rotating calipers over antipodal pairs
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        while cross(a, b, hull[(j + 1) % n]).abs() > cross(a, b, hull[j]).abs() {
            j = (j + 1) % n;
        }
        best = best.max(a.dist(hull[j])).max(b.dist(hull[j]));
    }
    Ok(best)
}

/// Relative perimeter excess over the disk of equal area.
pub fn isoperimetric_deficit(set: &GridSet) -> Result<f64> {
    let m = volume(set);
    if m == 0.0 {
        return Err(Error::invalid("deficit of an empty set"));
    }
    let pb = 2.0 * (PI * m).sqrt();
    Ok((perimeter(set) - pb) / pb)
}

/// Smallest `|E Δ B| / |B|` over disks `B` of equal area centred near the
/// barycentre, searched on a half-cell lattice within four cells.
pub fn ball_asymmetry(set: &GridSet) -> Result<f64> {
    let c = set
        .barycenter()
        .ok_or_else(|| Error::invalid("asymmetry of an empty set"))?;
    let s = set.spec();
    let n = set.count() as f64;
    let r2 = n / PI;
    let cells: Vec<(f64, f64)> = set
        .cells()
        .map(|(ix, iy)| {
            let p = s.center(ix, iy);
            ((p.x - c.x) / s.spacing, (p.y - c.y) / s.spacing)
        })
        .collect();
    let mut best = f64::INFINITY;
    for a in -8..=8 {
        for b in -8..=8 {
            let (ox, oy) = (0.5 * a as f64, 0.5 * b as f64);
            let inside = cells
                .iter()
                .filter(|&&(x, y)| (x - ox).powi(2) + (y - oy).powi(2) <= r2)
                .count() as f64;
            best = best.min(2.0 * (n - inside) / n);
        }
    }
    Ok(best)
}
