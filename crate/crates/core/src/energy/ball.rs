//! Radial quadratures for the nonlocal perimeter of a ball.

use serde::Serialize;

use crate::consts::{ball_volume, sphere_area};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{integrate_weak_singular_scaled, Tolerance};

const REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallQuadrature {
    pub n: usize,
    pub s: f64,
    pub r0: f64,
    /// Nonlocal perimeter per unit area of the unit sphere.
    pub psi1: f64,
    pub pk_ball: f64,
    /// Derivative of `λ ↦ P_K((1+λ) B_{r0})` at zero.
    pub fprime0: f64,
}

/// `∫_0^Y cos^n`, stable for small `Y`.
fn cos_power_integral(n: usize, y: f64) -> f64 {
    match n {
        0 => y,
        1 => y.sin(),
        _ => {
            let nf = n as f64;
            y.cos().powi(n as i32 - 1) * y.sin() / nf + (nf - 1.0) / nf * cos_power_integral(n - 2, y)
        }
    }
}

/// `|B_{r0} Δ (B_{r0} + z)|` as a function of `t = |z|`.
pub fn ball_overlap_defect(n: usize, r0: f64, t: f64) -> f64 {
    if t >= 2.0 * r0 {
        return 2.0 * ball_volume(n) * r0.powi(n as i32);
    }
    let y = (t / (2.0 * r0)).asin();
    4.0 * ball_volume(n - 1) * r0.powi(n as i32) * cos_power_integral(n, y)
}

/// `P_K(B_{r0}) = |S^{n−1}| ∫ t^{n−1} K(t) φ(t) dt` with its derivative along dilations.
pub fn ball_pk(n: usize, kernel: &KernelSpec, r0: f64) -> Result<BallQuadrature> {
    if !(2..=7).contains(&n) {
        return Err(Error::invalid(format!("ball quadrature needs 2 ≤ n ≤ 7, got {n}")));
    }
    if kernel.n != n {
        return Err(Error::invalid("kernel dimension differs from the ball dimension"));
    }
    if !(r0 > 0.0) {
        return Err(Error::invalid("ball radius must be positive"));
    }
    let s = kernel.s();
    let tol = Tolerance::new(0.0, 1e-11);
    let nf = n as f64;
    let edge = 2.0 * r0;
    // both integrands behave like t^{-s} near the origin
    let q = kernel.order();
    let head = integrate_weak_singular_scaled(
        |t| kernel.scaled_value(t, q) * ball_overlap_defect(n, r0, t) / t,
        s,
        edge,
        tol,
    )?;
    let tail = 2.0 * ball_volume(n) * r0.powi(n as i32) * kernel.tail_moment(nf - 1.0, edge);
    let slope = integrate_weak_singular_scaled(
        |t| (r0 * r0 - 0.25 * t * t).max(0.0).powf(0.5 * (nf - 1.0)) * kernel.scaled_value(t, q),
        s,
        edge,
        tol,
    )?;
    for q in [&head, &slope] {
        if !(q.error <= REL_TOL * q.value.abs()) {
            return Err(Error::numerical(
                "ball quadrature did not reach its tolerance",
                q.error / q.value.abs(),
            ));
        }
    }
    let area = sphere_area(n);
    let pk = area * (head.value + tail);
    let fprime0 = nf * pk - 2.0 * area * ball_volume(n - 1) * slope.value;
    Ok(BallQuadrature {
        n,
        s,
        r0,
        psi1: pk / area,
        pk_ball: pk,
        fprime0,
    })
}
