//! Linear stability of the ball: eigenvalue gaps, thresholds and a
//! finite-difference check of the second variation.

use std::fmt::Write as _;

use serde::Serialize;

use crate::consts::{ball_volume, sphere_area};
use crate::energy::{ball_pk, nonlocal_perimeter, star_fractional_perimeter, QuadratureSpec};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::shapes::{star_perimeter, volume, GridSpec, Point, StarShape};

fn check_dimension(n: usize) -> Result<()> {
    if !(2..=7).contains(&n) {
        return Err(Error::invalid(format!("dimension {n} outside 2..=7")));
    }
    Ok(())
}

fn check_exponent(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("exponent {s} outside (0, 1)")));
    }
    Ok(())
}

/// `λ_k¹ − λ₁¹ = k(k+n−2) − (n−1)`.
pub fn perimeter_gap(n: usize, k: usize) -> f64 {
    (k * (k + n - 2)) as f64 - (n as f64 - 1.0)
}

/// `ln ∏_{j=1}^{k−1} (j + (n+s)/2) / (j + (n−2−s)/2)`.
fn log_eigen_ratio(n: usize, s: f64, k: usize) -> f64 {
    let (a, b) = (0.5 * (n as f64 + s), 0.5 * (n as f64 - 2.0 - s));
    (1..k).map(|j| ((j as f64 + a) / (j as f64 + b)).ln()).sum()
}

/// Fractional gap of mode `k` relative to mode 2.
pub fn fractional_gap_ratio(n: usize, s: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!("mode {k} below 2")));
    }
    let top = log_eigen_ratio(n, s, k).exp_m1();
    let base = log_eigen_ratio(n, s, 2).exp_m1();
    Ok(top / base)
}

/// Ratio of the mode-`k` crossing coupling to the mode-2 one.
pub fn a_k(n: usize, s: f64, k: usize) -> Result<f64> {
    check_exponent(s)?;
    let r = fractional_gap_ratio(n, s, k)?;
    Ok(perimeter_gap(n, k) / (n as f64 + 1.0) / r)
}

/// `P_s(B₁)` by radial quadrature.
pub fn unit_ball_fractional_perimeter(n: usize, s: f64) -> Result<f64> {
    Ok(ball_pk(n, &KernelSpec::power_law(n, s)?, 1.0)?.pk_ball)
}

/// `λ₂^s − λ₁^s = s(n+s) P_s(B₁) / P(B₁)`.
pub fn fractional_gap_two(n: usize, s: f64) -> Result<f64> {
    Ok(s * (n as f64 + s) * unit_ball_fractional_perimeter(n, s)? / sphere_area(n))
}

fn ball_coupling_scale(n: usize, s: f64) -> Result<f64> {
    check_dimension(n)?;
    check_exponent(s)?;
    Ok(sphere_area(n) / (s * (1.0 - s) * unit_ball_fractional_perimeter(n, s)?))
}

/// Coupling at which the unit ball loses stability along the mode-2 direction.
pub fn beta2_star(n: usize, s: f64) -> Result<f64> {
    Ok((n as f64 + 1.0) / (s * (n as f64 + s)) * ball_coupling_scale(n, s)?)
}

/// [`beta2_star`] in the volume-free normalisation.
pub fn gamma2_star(n: usize, s: f64) -> Result<f64> {
    Ok(beta2_star(n, s)? * ball_volume(n).powf((1.0 - s) / n as f64))
}

/// Coupling beyond which two half balls beat one ball.
pub fn beta_bar(n: usize, s: f64) -> Result<f64> {
    let nf = n as f64;
    Ok((2f64.powf(1.0 / nf) - 1.0) / (2f64.powf(s / nf) - 1.0) * ball_coupling_scale(n, s)?)
}

/// `(2^{s/n} − 1)/(2^{1/n} − 1) − s(n+s)/(n+1)`, positive on `(0, 1)`.
pub fn f_of_s(n: usize, s: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!("exponent {s} outside [0, 1]")));
    }
    let nf = n as f64;
    Ok((2f64.powf(s / nf) - 1.0) / (2f64.powf(1.0 / nf) - 1.0) - s * (nf + s) / (nf + 1.0))
}

/// `(λ_k¹ − λ₁¹) − β s(1−s)(λ_k^s − λ₁^s)` on the unit ball.
pub fn mode_second_variation(n: usize, s: f64, k: usize, beta: f64) -> Result<f64> {
    check_dimension(n)?;
    check_exponent(s)?;
    let gap_s = fractional_gap_two(n, s)? * fractional_gap_ratio(n, s, k)?;
    Ok(perimeter_gap(n, k) - beta * s * (1.0 - s) * gap_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeRow {
    pub k: usize,
    pub a_k: f64,
    pub gap1: f64,
    pub gap_s: f64,
    /// Coupling at which this mode's second variation vanishes.
    pub crossing_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityTable {
    pub n: usize,
    pub s: f64,
    pub modes: Vec<ModeRow>,
    pub beta2_star: f64,
    pub gamma2_star: f64,
    pub beta_bar: f64,
    pub f_of_s: f64,
}

impl StabilityTable {
    pub fn build(n: usize, s: f64, k_max: usize) -> Result<Self> {
        check_dimension(n)?;
        check_exponent(s)?;
        if k_max < 2 {
            return Err(Error::invalid("table needs k_max ≥ 2"));
        }
        let b2 = beta2_star(n, s)?;
        let two = fractional_gap_two(n, s)?;
        let modes = (2..=k_max)
            .map(|k| {
                let a = a_k(n, s, k)?;
                Ok(ModeRow {
                    k,
                    a_k: a,
                    gap1: perimeter_gap(n, k),
                    gap_s: two * fractional_gap_ratio(n, s, k)?,
                    crossing_beta: a * b2,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilityTable {
            n,
            s,
            modes,
            beta2_star: b2,
            gamma2_star: b2 * ball_volume(n).powf((1.0 - s) / n as f64),
            beta_bar: beta_bar(n, s)?,
            f_of_s: f_of_s(n, s)?,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a_k,crossing_beta\n");
        for m in &self.modes {
            let _ = writeln!(out, "{},{:e},{:e}", m.k, m.a_k, m.crossing_beta);
        }
        out
    }
}

/// How the fractional perimeter of a perturbed disk is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdEvaluator {
    /// Lattice energy of the rasterised curve.
    Raster { spacing: f64 },
    /// Boundary double integral of the curve itself.
    Boundary,
}

impl Default for FdEvaluator {
    fn default() -> Self {
        FdEvaluator::Raster { spacing: 1.0 / 512.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSecondVariation {
    /// Second difference of the perimeter, over `ε²`.
    pub d_perimeter: f64,
    /// Second difference of `P_s`, over `ε²`.
    pub d_ps: f64,
    pub value: f64,
    /// Coupling (unit-ball normalisation) where `value` changes sign.
    pub crossing_beta: f64,
}

fn unit_area_mode(k: usize, eps: f64, m: usize) -> Result<StarShape> {
    let r0 = 1.0 / (std::f64::consts::PI * (1.0 + 0.5 * eps * eps)).sqrt();
    StarShape::from_fn(r0, m, |t| eps * (k as f64 * t).cos())
}

fn mode_energies(shape: &StarShape, s: f64, eval: FdEvaluator) -> Result<(f64, f64)> {
    let p = star_perimeter(shape);
    let ps = match eval {
        FdEvaluator::Boundary => star_fractional_perimeter(shape, s)?,
        FdEvaluator::Raster { spacing } => {
            let (_, hi) = shape.interpolant().bounds();
            let cells = (2.0 * hi / spacing).ceil() as usize + 16;
            let set = shape.rasterize(Point::new(0.0, 0.0), GridSpec::centered(cells, spacing)?);
            let raw = nonlocal_perimeter(&set, &KernelSpec::power_law(2, s)?, &QuadratureSpec::default())?;
            // rescale to the exact unit area of the curve
            raw * volume(&set).powf(-(2.0 - s) / 2.0)
        }
    };
    Ok((p, ps))
}

/// Second difference `[F(ε) + F(−ε) − 2F(0)]/ε²` of `F = P − α s(1−s) P_s` on
/// the unit-area curves `r = r0(1 + ε cos kθ)`, where `α = β |B₁|^{(1−s)/2}`
/// carries the unit-ball coupling `β` to unit area.
pub fn fd_second_variation(
    s: f64,
    k: usize,
    beta: f64,
    eps: f64,
    samples: usize,
    eval: FdEvaluator,
) -> Result<FdSecondVariation> {
    check_exponent(s)?;
    if !(1e-3..=1e-1).contains(&eps) {
        return Err(Error::invalid(format!("amplitude {eps} outside [1e-3, 1e-1]")));
    }
    if let FdEvaluator::Raster { spacing } = eval {
        if !(spacing > 0.0 && spacing <= 1.0 / 512.0 * (1.0 + 1e-12)) {
            return Err(Error::invalid(format!("grid under-resolved: spacing {spacing} > 1/512")));
        }
    }
    let (p0, q0) = mode_energies(&unit_area_mode(k, 0.0, samples)?, s, eval)?;
    let (pp, qp) = mode_energies(&unit_area_mode(k, eps, samples)?, s, eval)?;
    let (pm, qm) = mode_energies(&unit_area_mode(k, -eps, samples)?, s, eval)?;
    let d_perimeter = (pp + pm - 2.0 * p0) / (eps * eps);
    let d_ps = (qp + qm - 2.0 * q0) / (eps * eps);
    let c = s * (1.0 - s);
    let alpha = beta * std::f64::consts::PI.powf((1.0 - s) / 2.0);
    let crossing_beta = d_perimeter / (c * d_ps) / std::f64::consts::PI.powf((1.0 - s) / 2.0);
    Ok(FdSecondVariation {
        d_perimeter,
        d_ps,
        value: d_perimeter - alpha * c * d_ps,
        crossing_beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_mode_ratio_is_one() {
        for n in 2..=7 {
            for s in [0.1, 0.5, 0.9] {
                assert!((a_k(n, s, 2).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert!(a_k(2, 0.5, 1).is_err());
    }

    #[test]
    fn third_mode_ratio_exact() {
        // n = 2, s = 1/2: ratio_2 = 9/5, ratio_3 = 117/35, gap1(3) = 7
        assert!((a_k(2, 0.5, 3).unwrap() - 7.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn ratios_stay_finite_far_out() {
        assert!(a_k(3, 0.3, 10_000).unwrap().is_finite());
    }

    #[test]
    fn threshold_is_a_zero() {
        let b = beta2_star(2, 0.5).unwrap();
        let v = mode_second_variation(2, 0.5, 2, b).unwrap();
        assert!(v.abs() < 1e-8 * perimeter_gap(2, 2));
        assert!(mode_second_variation(2, 0.5, 2, 0.5 * b).unwrap() > 0.0);
        assert!(mode_second_variation(2, 0.5, 2, 1.5 * b).unwrap() < 0.0);
        let a3 = a_k(2, 0.5, 3).unwrap();
        assert!(mode_second_variation(2, 0.5, 3, a3 * b).unwrap().abs() < 1e-8 * perimeter_gap(2, 3));
    }

    #[test]
    fn threshold_at_one_half() {
        // P(B₁) = 2π, P_s(B₁) = 124.26127755555804
        let want = 3.0 / (0.5 * 2.5) * 2.0 * std::f64::consts::PI / (0.25 * 124.26127755555804);
        assert!((beta2_star(2, 0.5).unwrap() - want).abs() < 1e-9 * want);
    }

    #[test]
    fn limit_near_one_is_inverse_twice_lower_ball() {
        // (1−s)P_s(B₁) → 2ω_{n−1}P(B₁) forces β₂* → 1/(2ω_{n−1})
        let b = beta2_star(2, 0.999).unwrap();
        assert!((b - 0.25).abs() < 0.01, "{b}");
    }

    #[test]
    fn fd_oracle_on_boundary_integral() {
        let b = beta2_star(2, 0.5).unwrap();
        let fd = fd_second_variation(0.5, 2, b, 0.02, 128, FdEvaluator::Boundary).unwrap();
        assert!((fd.crossing_beta / b - 1.0).abs() < 2e-3, "{}", fd.crossing_beta / b);
        let fd3 = fd_second_variation(0.5, 3, b, 0.02, 128, FdEvaluator::Boundary).unwrap();
        let a3 = a_k(2, 0.5, 3).unwrap();
        assert!((fd3.crossing_beta / (a3 * b) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn rejects_coarse_grid() {
        let e = fd_second_variation(0.5, 2, 1.0, 0.05, 64, FdEvaluator::Raster { spacing: 1.0 / 256.0 });
        assert!(e.is_err());
    }
}
