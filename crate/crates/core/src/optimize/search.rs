//! Search for sets with a large interpolation ratio `s(1−s) P_s / P^s` at fixed volume.

use std::f64::consts::PI;

use serde::Serialize;

use super::anneal::{anneal_objective, AnnealConfig, AnnealRecord};
use crate::energy::{gn_check, gn_constant, GN_SLACK};
use crate::error::Result;
use crate::kernels::KernelSpec;
use crate::shapes::{perimeter, rasterize_ball, volume, GridSet, GridSpec, Point};

/// Cells per unit length at epoch `e`.
fn resolution(e: usize) -> usize {
    24 + 8 * e
}

/// Side of the square window, in units of the unit-area disk diameter.
const WINDOW: f64 = 2.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GNEpoch {
    pub epoch: usize,
    pub spacing: f64,
    /// `s(1−s) P_s / (P^s |E|^{1−s})` of the epoch's annealed set.
    pub ratio: f64,
    /// Running maximum of `ratio` over admissible epochs.
    pub best: f64,
    /// Perimeter of the incumbent rescaled to unit volume.
    pub perimeter: f64,
    /// Whether the epoch's set respected the interpolation bound.
    pub bound_ok: bool,
}

#[derive(Debug, Clone)]
pub struct GNSearchResult {
    pub s: f64,
    /// Largest ratio found, a lower estimate of the optimal constant.
    pub best_ratio_inverse: f64,
    /// Unit-volume perimeter of the incumbent after each epoch.
    pub perimeter_trace: Vec<f64>,
    pub epochs: Vec<GNEpoch>,
    /// Annealing records of all epochs, in order.
    pub trace: Vec<AnnealRecord>,
    pub incumbent: GridSet,
}

/// Samples `set` at the cell centres of `spec`, cells off the old grid being empty.
fn resample(set: &GridSet, spec: GridSpec) -> GridSet {
    let old = *set.spec();
    GridSet::from_fn(spec, |p| {
        let ix = ((p.x - old.origin.x) / old.spacing).floor() as i64;
        let iy = ((p.y - old.origin.y) / old.spacing).floor() as i64;
        set.get_signed(ix, iy)
    })
}

fn window(e: usize) -> Result<GridSpec> {
    let res = resolution(e);
    let cells = (WINDOW * 2.0 / PI.sqrt() * res as f64).ceil() as usize;
    GridSpec::centered(cells, 1.0 / res as f64)
}

/// Anneals `−ln P_s + s ln P` at fixed cell count over `budget` epochs of
/// increasing resolution, each starting from the incumbent, which begins as
/// the unit-area disk.
pub fn gn_search(s: f64, budget: usize, cfg: &AnnealConfig) -> Result<GNSearchResult> {
    let kernel = KernelSpec::power_law(2, s)?;
    let spec = window(0)?;
    let mut incumbent = rasterize_ball(Point::new(0.0, 0.0), 1.0 / PI.sqrt(), spec)?;
    let first = gn_check(&incumbent, s, &cfg.quad)?;
    let mut best = first.mu_lower_estimate;
    let mut epochs = Vec::with_capacity(budget);
    let mut perimeter_trace = Vec::with_capacity(budget);
    let mut trace = Vec::new();
    let cap = gn_constant(s) * (1.0 + GN_SLACK);
    for e in 0..budget {
        let spec = window(e)?;
        let start = resample(&incumbent, spec);
        let p0 = perimeter(&start);
        let epoch_cfg = AnnealConfig {
            seed: cfg.seed.wrapping_add(e as u64),
            t0: Some(cfg.t0.unwrap_or(0.5 * spec.spacing) * s / p0),
            ..*cfg
        };
        let out = anneal_objective(&start, &kernel, &epoch_cfg, |p, pk| s * p.ln() - pk.ln())?;
        let offset = trace.len() as u64;
        trace.extend(out.trace.iter().map(|r| AnnealRecord {
            epoch: r.epoch + offset,
            ..*r
        }));
        let report = gn_check(&out.best, s, &cfg.quad)?;
        let ratio = report.mu_lower_estimate;
        let bound_ok = ratio <= cap;
        if bound_ok && ratio > best {
            best = ratio;
            incumbent = out.best;
        }
        let p_unit = perimeter(&incumbent) / volume(&incumbent).sqrt();
        perimeter_trace.push(p_unit);
        epochs.push(GNEpoch {
            epoch: e,
            spacing: spec.spacing,
            ratio,
            best,
            perimeter: p_unit,
            bound_ok,
        });
    }
    Ok(GNSearchResult {
        s,
        best_ratio_inverse: best,
        perimeter_trace,
        epochs,
        trace,
        incumbent,
    })
}
