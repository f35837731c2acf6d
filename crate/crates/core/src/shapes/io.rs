//! Plain PBM masks with a JSON sidecar carrying the geometry.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GridSet, GridSpec, Point};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    spacing: f64,
    origin_x: f64,
    origin_y: f64,
}

/// Path of the geometry file that accompanies a mask file.
pub fn sidecar_path(mask: &Path) -> PathBuf {
    mask.with_extension("json")
}

/// Mask as P1 text, top row first.
pub fn to_pbm(set: &GridSet) -> String {
    let s = set.spec();
    let mut out = format!("P1\n{} {}\n", s.cells_x, s.cells_y);
    for iy in (0..s.cells_y).rev() {
        let row: Vec<&str> = (0..s.cells_x)
            .map(|ix| if set.get(ix, iy) { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn pbm_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace())
}

pub fn from_pbm(text: &str, spacing: f64, origin: Point) -> Result<GridSet> {
    let mut tok = pbm_tokens(text);
    if tok.next() != Some("P1") {
        return Err(Error::invalid("mask file is not a plain PBM (magic P1)"));
    }
    let mut dim = || -> Result<usize> {
        tok.next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::invalid("malformed PBM header"))
    };
    let (w, h) = (dim()?, dim()?);
    let spec = GridSpec::new(w, h, spacing, origin)?;
    let mut bits = Vec::with_capacity(w * h);
    for t in tok {
        for ch in t.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::invalid(format!("unexpected PBM token {t:?}"))),
            }
        }
    }
    if bits.len() != w * h {
        return Err(Error::invalid(format!("PBM holds {} pixels, header says {}", bits.len(), w * h)));
    }
    let mut set = GridSet::empty(spec);
    for (k, b) in bits.into_iter().enumerate() {
        let (col, row) = (k % w, k / w);
        set.set(col, h - 1 - row, b);
    }
    Ok(set)
}

pub fn write_mask(set: &GridSet, path: &Path) -> Result<()> {
    fs::write(path, to_pbm(set))?;
    let s = set.spec();
    let car = Sidecar {
        spacing: s.spacing,
        origin_x: s.origin.x,
        origin_y: s.origin.y,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&car)?)?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<GridSet> {
    let text = fs::read_to_string(path)?;
    let car: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    from_pbm(&text, car.spacing, Point::new(car.origin_x, car.origin_y))
}
