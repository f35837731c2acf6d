use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// Uniform square lattice: `cells_x` by `cells_y` cells of side `spacing`,
/// with `origin` at the lower-left corner of the first cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub cells_x: usize,
    pub cells_y: usize,
    pub spacing: f64,
    pub origin: Point,
}

impl GridSpec {
    pub fn new(cells_x: usize, cells_y: usize, spacing: f64, origin: Point) -> Result<Self> {
        if cells_x == 0 || cells_y == 0 {
            return Err(Error::invalid("grid needs at least one cell per axis"));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid(format!("grid spacing must be positive, got {spacing}")));
        }
        Ok(GridSpec {
            cells_x,
            cells_y,
            spacing,
            origin,
        })
    }

    /// Square grid of `cells` per side centred on the origin.
    pub fn centered(cells: usize, spacing: f64) -> Result<Self> {
        let half = 0.5 * cells as f64 * spacing;
        GridSpec::new(cells, cells, spacing, Point::new(-half, -half))
    }

    pub fn len(&self) -> usize {
        self.cells_x * self.cells_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn width(&self) -> f64 {
        self.cells_x as f64 * self.spacing
    }

    pub fn height(&self) -> f64 {
        self.cells_y as f64 * self.spacing
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    pub fn center(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.origin.x + (ix as f64 + 0.5) * self.spacing,
            self.origin.y + (iy as f64 + 0.5) * self.spacing,
        )
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.cells_x + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.cells_x, idx / self.cells_x)
    }
}

/// Boolean cell mask on a [`GridSpec`]; a cell is in the set when its centre is.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    spec: GridSpec,
    mask: Vec<bool>,
}

impl GridSet {
    pub fn empty(spec: GridSpec) -> Self {
        GridSet {
            spec,
            mask: vec![false; spec.len()],
        }
    }

    pub fn full(spec: GridSpec) -> Self {
        GridSet {
            spec,
            mask: vec![true; spec.len()],
        }
    }

    pub fn from_mask(spec: GridSpec, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != spec.len() {
            return Err(Error::invalid(format!(
                "mask has {} cells, grid has {}",
                mask.len(),
                spec.len()
            )));
        }
        Ok(GridSet { spec, mask })
    }

    /// Marks every cell whose centre satisfies `inside`.
    pub fn from_fn(spec: GridSpec, inside: impl Fn(Point) -> bool) -> Self {
        let mut mask = vec![false; spec.len()];
        for iy in 0..spec.cells_y {
            for ix in 0..spec.cells_x {
                mask[spec.index(ix, iy)] = inside(spec.center(ix, iy));
            }
        }
        GridSet { spec, mask }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn into_mask(self) -> Vec<bool> {
        self.mask
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.mask[self.spec.index(ix, iy)]
    }

    /// Membership with everything outside the grid counted as complement.
    pub fn get_signed(&self, ix: i64, iy: i64) -> bool {
        if ix < 0 || iy < 0 || ix >= self.spec.cells_x as i64 || iy >= self.spec.cells_y as i64 {
            false
        } else {
            self.mask[self.spec.index(ix as usize, iy as usize)]
        }
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: bool) {
        let i = self.spec.index(ix, iy);
        self.mask[i] = v;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.spec.cells_x;
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % nx, i / nx))
    }

    /// Area-weighted centroid of the true cells.
    pub fn barycenter(&self) -> Option<Point> {
        let mut n = 0usize;
        let (mut sx, mut sy) = (0.0, 0.0);
        for (ix, iy) in self.cells() {
            let c = self.spec.center(ix, iy);
            sx += c.x;
            sy += c.y;
            n += 1;
        }
        (n > 0).then(|| Point::new(sx / n as f64, sy / n as f64))
    }

    /// Same mask on a grid whose origin is shifted by whole cells.
    pub fn translated(&self, dx_cells: i64, dy_cells: i64) -> GridSet {
        let mut spec = self.spec;
        spec.origin.x += dx_cells as f64 * spec.spacing;
        spec.origin.y += dy_cells as f64 * spec.spacing;
        GridSet {
            spec,
            mask: self.mask.clone(),
        }
    }

    /// Copy embedded in a larger grid with `pad` empty cells on every side.
    pub fn padded(&self, pad: usize) -> GridSet {
        let s = self.spec;
        let spec = GridSpec {
            cells_x: s.cells_x + 2 * pad,
            cells_y: s.cells_y + 2 * pad,
            spacing: s.spacing,
            origin: Point::new(
                s.origin.x - pad as f64 * s.spacing,
                s.origin.y - pad as f64 * s.spacing,
            ),
        };
        let mut out = GridSet::empty(spec);
        for (ix, iy) in self.cells() {
            out.set(ix + pad, iy + pad, true);
        }
        out
    }

    /// Smallest sub-grid holding every true cell, with a margin of `pad` cells.
    pub fn cropped(&self, pad: usize) -> Option<GridSet> {
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for (ix, iy) in self.cells() {
            x0 = x0.min(ix);
            y0 = y0.min(iy);
            x1 = x1.max(ix);
            y1 = y1.max(iy);
        }
        if x0 == usize::MAX {
            return None;
        }
        let s = self.spec;
        let spec = GridSpec {
            cells_x: x1 - x0 + 1 + 2 * pad,
            cells_y: y1 - y0 + 1 + 2 * pad,
            spacing: s.spacing,
            origin: Point::new(
                s.origin.x + (x0 as f64 - pad as f64) * s.spacing,
                s.origin.y + (y0 as f64 - pad as f64) * s.spacing,
            ),
        };
        let mut out = GridSet::empty(spec);
        for (ix, iy) in self.cells() {
            out.set(ix - x0 + pad, iy - y0 + pad, true);
        }
        Some(out)
    }

    /// Rotation of the mask by a quarter turn counter-clockwise.
    pub fn rotated_quarter(&self) -> GridSet {
        let s = self.spec;
        let spec = GridSpec {
            cells_x: s.cells_y,
            cells_y: s.cells_x,
            ..s
        };
        let mut out = GridSet::empty(spec);
        for (ix, iy) in self.cells() {
            out.set(s.cells_y - 1 - iy, ix, true);
        }
        out
    }

    /// Exact lattice dilation by an integer factor: each cell becomes a
    /// `factor` by `factor` block of cells of the same spacing.
    pub fn scaled_up(&self, factor: usize) -> GridSet {
        let s = self.spec;
        let f = factor as f64;
        let spec = GridSpec {
            cells_x: s.cells_x * factor,
            cells_y: s.cells_y * factor,
            spacing: s.spacing,
            origin: Point::new(s.origin.x * f, s.origin.y * f),
        };
        let mut out = GridSet::empty(spec);
        for (ix, iy) in self.cells() {
            for a in 0..factor {
                for b in 0..factor {
                    out.set(ix * factor + a, iy * factor + b, true);
                }
            }
        }
        out
    }

    /// Same set resampled on cells of half the spacing.
    pub fn refined(&self) -> GridSet {
        let s = self.spec;
        let spec = GridSpec {
            cells_x: s.cells_x * 2,
            cells_y: s.cells_y * 2,
            spacing: s.spacing / 2.0,
            origin: s.origin,
        };
        let mut out = GridSet::empty(spec);
        for (ix, iy) in self.cells() {
            for a in 0..2 {
                for b in 0..2 {
                    out.set(ix * 2 + a, iy * 2 + b, true);
                }
            }
        }
        out
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet> {
        self.same_grid(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect();
        Ok(GridSet { spec: self.spec, mask })
    }

    pub fn overlaps(&self, other: &GridSet) -> Result<bool> {
        self.same_grid(other)?;
        Ok(self.mask.iter().zip(&other.mask).any(|(a, b)| *a && *b))
    }

    fn same_grid(&self, other: &GridSet) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::invalid("sets live on different grids"));
        }
        Ok(())
    }
}

/// Placement of one component of a [`ShapeCollection`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// Shift of the component's grid origin.
    Offset(Point),
    /// Infinitely far from every other component.
    AtInfinity,
}

#[derive(Debug, Clone)]
pub struct ShapeCollection {
    pub components: Vec<GridSet>,
    pub placement: Vec<Placement>,
}

impl ShapeCollection {
    pub fn new(components: Vec<GridSet>, placement: Vec<Placement>) -> Result<Self> {
        if components.len() != placement.len() {
            return Err(Error::invalid("one placement per component required"));
        }
        Ok(ShapeCollection {
            components,
            placement,
        })
    }

    pub fn at_infinity(components: Vec<GridSet>) -> Self {
        let placement = vec![Placement::AtInfinity; components.len()];
        ShapeCollection {
            components,
            placement,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(super::volume).sum()
    }
}
