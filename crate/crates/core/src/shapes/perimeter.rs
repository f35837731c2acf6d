//! Boundary length of a cell mask by a Cauchy–Crofton cut count.
//!
//! For each of sixteen lattice directions `e` (components up to 3) every
//! pair of cells `(i, i + e)` split by the mask adds `Δφ_e / (2|e|)` cell
//! widths, where `Δφ_e` is the angular sector the direction stands for. This
//! is a discrete Crofton formula: its direction average is exact, the worst
//! direction is off by under 1%, and every non-empty pattern, however
//! fine, pays for its cuts.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::GridSet;

const PAD: usize = 3;

/// Directions in `[0, π)` with their cut weights, in cell units.
fn stencil() -> &'static [((i64, i64), f64)] {
    static STENCIL: OnceLock<Vec<((i64, i64), f64)>> = OnceLock::new();
    STENCIL.get_or_init(|| {
        let mut dirs: Vec<(i64, i64)> = Vec::new();
        for a in 0..=3i64 {
            for b in -3..=3i64 {
                let prim = gcd(a, b.abs()) == 1;
                if prim && (a > 0 || b > 0) {
                    dirs.push((a, b));
                }
            }
        }
        let angle = |&(a, b): &(i64, i64)| (b as f64).atan2(a as f64).rem_euclid(PI);
        dirs.sort_by(|p, q| angle(p).total_cmp(&angle(q)));
        let n = dirs.len();
        (0..n)
            .map(|i| {
                let next = angle(&dirs[(i + 1) % n]);
                let prev = angle(&dirs[(i + n - 1) % n]);
                let span = 0.5 * (next - prev).rem_euclid(PI);
                let (a, b) = dirs[i];
                (dirs[i], span / (2.0 * (a as f64).hypot(b as f64)))
            })
            .collect()
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Padded membership mask supporting incremental flips.
#[derive(Debug, Clone)]
pub struct PerimeterField {
    nx: usize,
    ny: usize,
    w: usize,
    member: Vec<bool>,
}

impl PerimeterField {
    pub fn new(set: &GridSet) -> Self {
        let s = set.spec();
        let (nx, ny) = (s.cells_x, s.cells_y);
        let w = nx + 2 * PAD;
        let mut member = vec![false; w * (ny + 2 * PAD)];
        for (ix, iy) in set.cells() {
            member[(iy + PAD) * w + ix + PAD] = true;
        }
        PerimeterField { nx, ny, w, member }
    }

    fn at(&self, i: usize, d: (i64, i64)) -> bool {
        self.member[(i as i64 + d.1 * self.w as i64 + d.0) as usize]
    }

    /// Total cut weight in cell units.
    pub fn total(&self) -> f64 {
        let mut sum = 0.0;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let i = (iy + PAD) * self.w + ix + PAD;
                if !self.member[i] {
                    continue;
                }
                for &((a, b), wt) in stencil() {
                    sum += wt * (!self.at(i, (a, b)) as u8 + !self.at(i, (-a, -b)) as u8) as f64;
                }
            }
        }
        sum
    }

    /// Sets one cell and returns the change of cut weight in cell units.
    pub fn flip(&mut self, ix: usize, iy: usize, add: bool) -> f64 {
        debug_assert!(ix < self.nx && iy < self.ny);
        let i = (iy + PAD) * self.w + ix + PAD;
        if self.member[i] == add {
            return 0.0;
        }
        let mut out = 0.0;
        for &((a, b), wt) in stencil() {
            for d in [(a, b), (-a, -b)] {
                out += if self.at(i, d) { -wt } else { wt };
            }
        }
        self.member[i] = add;
        if add {
            out
        } else {
            -out
        }
    }
}

/// Boundary length of the set; cells outside the grid belong to the complement.
pub fn perimeter(set: &GridSet) -> f64 {
    PerimeterField::new(set).total() * set.spec().spacing
}
