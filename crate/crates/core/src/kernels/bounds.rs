use serde::Serialize;

use super::{log_grid, KernelSpec};

const UPPER_SLACK: f64 = 1e-3;
const LADDER: [f64; 8] = [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1000.0];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LowerBound {
    pub rho0: f64,
    /// `inf_{r ≥ ρ0} K(r) r^{n+s}` over the probe radii, after rescaling.
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundsReport {
    pub upper_ok: bool,
    pub monotone_ok: bool,
    /// Factor applied to the kernel before the comparisons.
    pub rescale: f64,
    /// Smallest ladder radius with `c ≥ ½`, with its constant.
    pub c: f64,
    pub rho0: f64,
    pub ladder: Vec<LowerBound>,
    pub worst_upper_ratio: f64,
}

/// Probes `K` against `r^{-(n+s)}` on a log grid and along the table radii.
pub fn verify_kernel_bounds(kernel: &KernelSpec) -> KernelBoundsReport {
    let mut probes = log_grid(-6.0, 4.0, 40);
    let rescale = match kernel.table() {
        Some(t) => {
            probes.extend_from_slice(t.radii());
            1.0 / t.k0()
        }
        None => 1.0,
    };
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    let q = kernel.order();
    let vals: Vec<f64> = probes.iter().map(|&r| rescale * kernel.value(r)).collect();
    let ratio: Vec<f64> = probes.iter().zip(&vals).map(|(r, v)| v * r.powf(q)).collect();
    let worst_upper_ratio = ratio.iter().cloned().fold(0.0, f64::max);
    let upper_ok = worst_upper_ratio <= 1.0 + UPPER_SLACK;
    let monotone_ok = vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let ladder: Vec<LowerBound> = LADDER
        .iter()
        .map(|&rho0| LowerBound {
            rho0,
            c: probes
                .iter()
                .zip(&ratio)
                .filter(|(r, _)| **r >= rho0)
                .map(|(_, c)| *c)
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    let (c, rho0) = ladder
        .iter()
        .find(|l| l.c >= 0.5)
        .map(|l| (l.c, l.rho0))
        .unwrap_or((0.0, f64::INFINITY));
    KernelBoundsReport {
        upper_ok,
        monotone_ok,
        rescale,
        c,
        rho0,
        ladder,
        worst_upper_ratio,
    }
}
