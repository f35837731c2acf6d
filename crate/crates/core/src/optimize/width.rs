//! Width of annealed minimisers across a sweep of couplings.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::anneal::{anneal, AnnealConfig, AnnealRecord};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::shapes::{components, inscribed_radius, GridSet, GridSpec, Point};
use crate::spectral::beta_bar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthRow {
    pub alpha: f64,
    /// `α m^{(1−s)/2}`.
    pub gamma: f64,
    pub inscribed_radius: f64,
    pub components: usize,
    pub best_energy: f64,
    #[serde(skip)]
    pub best: GridSet,
    #[serde(skip)]
    pub trace: Vec<AnnealRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthScan {
    pub m: f64,
    pub s: f64,
    pub spacing: f64,
    /// One entry per coupling, in input order; failed points carry the error text.
    pub rows: Vec<std::result::Result<WidthRow, String>>,
    /// Slope of `ln r` against `ln α` over the successful points.
    pub slope: f64,
    pub intercept: f64,
    /// Radii non-increasing in `α` over the successful points.
    pub monotone: bool,
}

/// Random speckle of exactly `m / h²` cells filling half of the centred disk of area `2m`.
pub fn speckle_start(m: f64, spacing: f64, seed: u64) -> Result<GridSet> {
    let want = (m / (spacing * spacing)).round() as usize;
    if want < 2 {
        return Err(Error::invalid("mass below two cells"));
    }
    let reach = (2.0 * m / PI).sqrt();
    let cells = (2.2 * reach / spacing).ceil() as usize + 8;
    let spec = GridSpec::centered(cells, spacing)?;
    let sites: Vec<(usize, usize)> = (0..cells)
        .flat_map(|iy| (0..cells).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| spec.center(ix, iy).dist(Point::new(0.0, 0.0)) < reach)
        .collect();
    if sites.len() < want {
        return Err(Error::numerical("speckle window too small", sites.len() as f64));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = GridSet::empty(spec);
    let mut placed = 0;
    while placed < want {
        let (ix, iy) = sites[rng.gen_range(0..sites.len())];
        if !set.get(ix, iy) {
            set.set(ix, iy, true);
            placed += 1;
        }
    }
    Ok(set)
}

fn scan_point(alpha: f64, m: f64, s: f64, spacing: f64, kernel: &KernelSpec, cfg: &AnnealConfig) -> Result<WidthRow> {
    let start = speckle_start(m, spacing, cfg.seed)?;
    let out = anneal(&start, alpha, kernel, cfg)?;
    Ok(WidthRow {
        alpha,
        gamma: alpha * m.powf(0.5 * (1.0 - s)),
        inscribed_radius: inscribed_radius(&out.best),
        components: components(&out.best).len(),
        best_energy: out.best_energy,
        best: out.best,
        trace: out.trace,
    })
}

/// Anneals each coupling from a speckle of mass `m` and fits the log-log
/// slope of the inscribed radius; at most `threads` points run at once.
pub fn width_scan(alphas: &[f64], m: f64, s: f64, spacing: f64, cfg: &AnnealConfig, threads: usize) -> Result<WidthScan> {
    let kernel = KernelSpec::power_law(2, s)?;
    cfg.validate()?;
    if alphas.len() < 2 || alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::invalid("need at least two positive couplings"));
    }
    let (lo, hi) = alphas.iter().fold((f64::MAX, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
    if hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(Error::invalid(format!("coupling sweep spans {:.3} decades, need one", (hi / lo).log10())));
    }
    // the two-ball crossover in the unit-ball normalisation, carried to mass m
    let crossover = beta_bar(2, s)? / (m / PI).powf(0.5 * (1.0 - s));
    if hi <= crossover {
        return Err(Error::invalid(format!(
            "largest coupling {hi} stays in the ball regime (crossover {crossover:.4})"
        )));
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<std::result::Result<WidthRow, String>>>> = Mutex::new(vec![None; alphas.len()]);
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, alphas.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= alphas.len() {
                    break;
                }
                let row = scan_point(alphas[i], m, s, spacing, &kernel, cfg).map_err(|e| e.to_string());
                slots.lock().expect("scan slots")[i] = Some(row);
            });
        }
    });
    let rows: Vec<_> = slots
        .into_inner()
        .expect("scan slots")
        .into_iter()
        .map(|r| r.expect("every point visited"))
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.inscribed_radius > 0.0)
        .map(|r| (r.alpha.ln(), r.inscribed_radius.ln()))
        .collect();
    let (slope, intercept) = fit_line(&pts);
    let mut ordered: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|r| (r.alpha, r.inscribed_radius))
        .collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = ordered.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(WidthScan {
        m,
        s,
        spacing,
        rows,
        slope,
        intercept,
        monotone,
    })
}

/// Least-squares line through the points, NaN with fewer than two.
pub fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
