//! Planar kernel with Fourier symbol `1/(1+|ξ|^s)`.
//!
//! With `a = s/2` the symbol is a Stieltjes function of `λ = |ξ|²`:
//! `1/(1+λ^a) = ∫ μ(τ)/(τ+λ) dτ`, `μ(τ) = sin(πa)/π · τ^a/(1 + 2τ^a cos(πa) + τ^{2a})`.
//! Each resolvent `1/(τ+|ξ|²)` inverts to `K₀(√τ r)/(2π)`, so
//! `K(r) = (1/2π) ∫ μ(τ) K₀(√τ r) dτ`, a positive, non-oscillatory integral that
//! the trapezoid rule in `ln τ` resolves to near machine precision.

use std::f64::consts::PI;

use super::table::RadialTable;
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::INFINITY;
    }
    if x <= 2.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut i0 = 1.0;
        let mut harm = 0.0;
        let mut sum = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            term *= q / (kf * kf);
            harm += 1.0 / kf;
            i0 += term;
            sum += term * harm;
            if term < 1e-18 * i0 {
                break;
            }
        }
        return -((0.5 * x).ln() + EULER_GAMMA) * i0 + sum;
    }
    if x > 745.0 {
        return 0.0;
    }
    // K₀(x) = e^{-x} ∫₀^∞ exp(-2x sinh²(t/2)) dt; the integrand is analytic in a
    // strip, so the trapezoid rule converges geometrically in the step.
    let step = (PI * PI / (2.0 * (0.3 * x + 40.0))).min(0.25);
    let t_max = (1.0 + 45.0 / x).acosh();
    let n = (t_max / step).ceil() as usize;
    let mut sum = 0.5;
    for k in 1..=n {
        let t = k as f64 * step;
        let sh = (0.5 * t).sinh();
        sum += (-2.0 * x * sh * sh).exp();
    }
    sum * step * (-x).exp()
}

fn weight(tau: f64, a: f64) -> f64 {
    let ta = tau.powf(a);
    (PI * a).sin() / PI * ta / (1.0 + 2.0 * ta * (PI * a).cos() + ta * ta)
}

/// Kernel value at one radius with the achieved relative residual.
pub fn bessel_kernel_value(s: f64, r: f64) -> Result<(f64, f64)> {
    let a = 0.5 * s;
    let lr = r.ln();
    // τ ~ 1/r² carries the mass; below it the integrand decays like τ^{1+a},
    // above it K₀ decays exponentially.
    let hi = 2.0 * (48.0 / r).ln();
    let lo = (-2.0 * lr).min(0.0) - 42.0 / (1.0 + a) - 4.0;
    let lo = lo.min(hi - 10.0);
    let f = |y: f64| {
        let tau = y.exp();
        weight(tau, a) * tau * bessel_k0(tau.sqrt() * r)
    };
    let mut step = 0.2;
    let mut n = ((hi - lo) / step).ceil() as usize;
    step = (hi - lo) / n as f64;
    let mut sum: f64 = (0..=n).map(|k| f(lo + k as f64 * step) * if k == 0 || k == n { 0.5 } else { 1.0 }).sum();
    let mut value = sum * step;
    for _ in 0..6 {
        let mids: f64 = (0..n).map(|k| f(lo + (k as f64 + 0.5) * step)).sum();
        sum += mids;
        n *= 2;
        step *= 0.5;
        let next = sum * step;
        let res = ((next - value) / next).abs();
        value = next;
        if res < 1e-12 {
            return Ok((value / (2.0 * PI), res));
        }
    }
    let res = 1.0;
    Err(Error::numerical(format!("kernel quadrature at r = {r} did not settle"), res))
}

/// Exact leading tail coefficient: `K(r) ~ k0 r^{-(2+s)}`.
pub fn bessel_tail_coefficient(s: f64) -> f64 {
    let g = statrs::function::gamma::gamma(1.0 + 0.5 * s);
    (0.5 * PI * s).sin() / (2.0 * PI * PI) * 2f64.powf(1.0 + s) * g * g
}

/// Log-spaced radii with `per_decade` points from `10^lo` to `10^hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi - lo) * per_decade as f64).round() as usize;
    (0..=n)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / n as f64))
        .collect()
}

/// Default radii: far enough out that the next-order tail correction, which
/// decays like `r^{-s}`, has fallen below 10⁻³ over the last decade.
pub fn default_bessel_grid(s: f64) -> Vec<f64> {
    let hi = (4.0 / s).clamp(3.0, 30.0).ceil();
    log_grid(-4.0, hi, 40)
}

/// Tabulates the kernel on `r_grid` and fits its power-law tail.
pub fn build_bessel_table(n: usize, s: f64, r_grid: &[f64]) -> Result<RadialTable> {
    if n != 2 {
        return Err(Error::invalid(format!("the Bessel-type kernel is built for n = 2 only, got {n}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("exponent must lie in (0,1), got {s}")));
    }
    let (first, last) = match (r_grid.first(), r_grid.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::invalid("empty radius grid")),
    };
    if first > 1e-3 * (1.0 + 1e-12) || last < 1e3 * (1.0 - 1e-12) {
        return Err(Error::invalid(format!(
            "radius grid [{first}, {last}] must cover [1e-3, 1e3]"
        )));
    }
    let mut values = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        values.push(bessel_kernel_value(s, r)?.0);
    }
    let table = RadialTable::fitted(n, s, r_grid.to_vec(), values)?;
    let mass = table.mass();
    if (mass - 1.0).abs() > 5e-3 {
        return Err(Error::numerical(format!("tabulated kernel integrates to {mass}"), (mass - 1.0).abs()));
    }
    Ok(table)
}
