//! Inequality diagnostics: Gagliardo–Nirenberg type bound, dilation
//! stability and the `s → 0`, `s → 1` limits.

use std::f64::consts::PI;

use serde::Serialize;

use super::nonlocal::{nonlocal_parts, nonlocal_perimeter, QuadratureSpec};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::shapes::{perimeter, volume, GridSet, GridSpec, Point};

/// Relative slack allowed for lattice error in the interpolation bound.
pub const GN_SLACK: f64 = 0.01;

/// Planar constant `2^{1−s} · 2π` of the interpolation bound.
pub fn gn_constant(s: f64) -> f64 {
    2f64.powf(1.0 - s) * 2.0 * PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GNReport {
    pub s: f64,
    /// `P^s m^{1−s} / (s(1−s) P_s)`.
    pub ratio: f64,
    pub bound_ok: bool,
    /// `1/ratio`, a lower bound for the optimal constant.
    pub mu_lower_estimate: f64,
}

pub fn gn_check(set: &GridSet, s: f64, quad: &QuadratureSpec) -> Result<GNReport> {
    let kernel = KernelSpec::power_law(2, s)?;
    let parts = nonlocal_parts(set, &kernel, quad)?;
    let lhs = s * (1.0 - s) * parts.total();
    let scale = parts.perimeter.powf(s) * volume(set).powf(1.0 - s);
    let ratio = scale / lhs;
    Ok(GNReport {
        s,
        ratio,
        bound_ok: lhs <= gn_constant(s) * scale * (1.0 + GN_SLACK),
        mu_lower_estimate: 1.0 / ratio,
    })
}

/// Dilation of a set by `factor` about its barycenter, resampled at the cell
/// centres of a grid of the same spacing large enough to hold it.
pub fn dilate(set: &GridSet, factor: f64) -> Result<GridSet> {
    if !(factor > 0.0) {
        return Err(Error::invalid("dilation factor must be positive"));
    }
    let bar = set.barycenter().ok_or_else(|| Error::invalid("cannot dilate an empty set"))?;
    let spec = set.spec();
    let h = spec.spacing;
    let grow = |len: f64| ((factor - 1.0).max(0.0) * len / h).ceil() as usize + 2;
    let (px, py) = (grow(spec.width()), grow(spec.height()));
    let out_spec = GridSpec::new(
        spec.cells_x + 2 * px,
        spec.cells_y + 2 * py,
        h,
        Point::new(spec.origin.x - px as f64 * h, spec.origin.y - py as f64 * h),
    )?;
    Ok(GridSet::from_fn(out_spec, |p| {
        let x = bar.x + (p.x - bar.x) / factor;
        let y = bar.y + (p.y - bar.y) / factor;
        let ix = ((x - spec.origin.x) / h).floor();
        let iy = ((y - spec.origin.y) / h).floor();
        ix >= 0.0 && iy >= 0.0 && set.get_signed(ix as i64, iy as i64)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilationReport {
    pub t: f64,
    pub pk: f64,
    pub pk_dilated: f64,
    /// `|ΔP_K| / (t P^s m^{1−s})`, zero at `t = 0`.
    pub ratio: f64,
}

/// Change of `P_K` under the volume dilation `F ↦ (1+t)^{1/2} F`.
pub fn dilation_bound_check(set: &GridSet, t: f64, kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<DilationReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("dilation parameter {t} outside [0, 1]")));
    }
    let pk = nonlocal_perimeter(set, kernel, quad)?;
    if t == 0.0 {
        return Ok(DilationReport {
            t,
            pk,
            pk_dilated: pk,
            ratio: 0.0,
        });
    }
    let big = dilate(set, (1.0 + t).sqrt())?;
    let pk_dilated = nonlocal_perimeter(&big, kernel, quad)?;
    let s = kernel.s();
    let scale = perimeter(set).powf(s) * volume(set).powf(1.0 - s);
    Ok(DilationReport {
        t,
        pk,
        pk_dilated,
        ratio: (pk_dilated - pk).abs() / (t * scale),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationSweep {
    pub reports: Vec<DilationReport>,
    /// Largest over smallest positive ratio.
    pub spread: f64,
    pub bounded: bool,
}

/// Bounded means the ratio varies by at most a factor two across the sweep.
pub fn dilation_sweep(set: &GridSet, ts: &[f64], kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<DilationSweep> {
    let reports = ts
        .iter()
        .map(|&t| dilation_bound_check(set, t, kernel, quad))
        .collect::<Result<Vec<_>>>()?;
    let pos: Vec<f64> = reports.iter().filter(|r| r.t > 0.0).map(|r| r.ratio).collect();
    let spread = if pos.is_empty() {
        1.0
    } else {
        pos.iter().cloned().fold(f64::MIN, f64::max) / pos.iter().cloned().fold(f64::MAX, f64::min)
    };
    Ok(DilationSweep {
        reports,
        spread,
        bounded: spread.is_finite() && spread <= 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub s: f64,
    pub one_minus_s_ps: f64,
    pub s_ps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitTable {
    pub rows: Vec<LimitRow>,
    /// Limit of `(1−s) P_s` as `s → 1`: `4P`.
    pub perimeter_limit: f64,
    /// Limit of `s P_s` as `s → 0`: `4π|E|`.
    pub volume_limit: f64,
}

pub fn limit_sweep(set: &GridSet, s_values: &[f64], quad: &QuadratureSpec) -> Result<LimitTable> {
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        if !(s > 0.02 && s < 0.98) {
            return Err(Error::invalid(format!("limit sweep exponent {s} outside (0.02, 0.98)")));
        }
        let ps = nonlocal_perimeter(set, &KernelSpec::power_law(2, s)?, quad)?;
        rows.push(LimitRow {
            s,
            one_minus_s_ps: (1.0 - s) * ps,
            s_ps: s * ps,
        });
    }
    Ok(LimitTable {
        rows,
        perimeter_limit: 4.0 * perimeter(set),
        volume_limit: 4.0 * PI * volume(set),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::rasterize_ball;

    fn disk() -> GridSet {
        let spec = GridSpec::centered(72, 1.0 / 64.0).unwrap();
        rasterize_ball(Point::new(0.0, 0.0), 0.4, spec).unwrap()
    }

    #[test]
    fn disk_satisfies_bound() {
        let r = gn_check(&disk(), 0.5, &QuadratureSpec::default()).unwrap();
        assert!(r.bound_ok);
        assert!(r.mu_lower_estimate > 0.0 && r.mu_lower_estimate <= gn_constant(0.5));
    }

    #[test]
    fn dilation_of_power_law_is_homogeneous() {
        let k = KernelSpec::power_law(2, 0.5).unwrap();
        let q = QuadratureSpec::default();
        let zero = dilation_bound_check(&disk(), 0.0, &k, &q).unwrap();
        assert_eq!(zero.pk_dilated, zero.pk);
        let r = dilation_bound_check(&disk(), 0.3, &k, &q).unwrap();
        let want = 1.3f64.powf(0.75) * r.pk;
        assert!(((r.pk_dilated - want) / want).abs() < 0.01);
    }
}
