//! Gradient descent of `P − α s(1−s) P_s` in the class of star-shaped curves.

use std::f64::consts::PI;

use serde::Serialize;

use crate::energy::star_fractional_perimeter;
use crate::error::{Error, Result};
use crate::shapes::{star_perimeter, star_volume, StarShape};

/// Asymmetry below which a descent counts as having stayed at the ball.
pub const BALL_TOLERANCE: f64 = 0.05;
const MAX_HALVINGS: usize = 20;
const FD_STEP: f64 = 1e-4;
const STEP: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct StarDescent {
    #[serde(skip)]
    pub shape: StarShape,
    pub energy: f64,
    pub asymmetry: f64,
    pub stayed_ball: bool,
    /// Energy after every accepted step, starting with the initial one.
    pub trace: Vec<f64>,
}

fn star_energy(shape: &StarShape, alpha: f64, s: f64) -> Result<f64> {
    Ok(star_perimeter(shape) - alpha * s * (1.0 - s) * star_fractional_perimeter(shape, s)?)
}

/// `|E Δ B| / |B|` against the disk of equal area centred at the origin.
pub fn star_asymmetry(shape: &StarShape) -> f64 {
    let m = star_volume(shape);
    let r2 = m / PI;
    let n = shape.samples();
    let diff: f64 = (0..n).map(|j| (shape.radius(j).powi(2) - r2).abs()).sum::<f64>() * PI / n as f64;
    diff / m
}

/// Same profile, radius rescaled to enclose area `m`.
fn with_area(u: Vec<f64>, r0: f64, m: f64) -> Result<StarShape> {
    let trial = StarShape::new(r0, u)?;
    let r = r0 * (m / star_volume(&trial)).sqrt();
    trial.with_r0(r)
}

fn positive(u: &[f64]) -> bool {
    u.iter().all(|&v| 1.0 + v > 0.0)
}

/// Descends along the modes `2..=modes` of the relative radius at fixed area.
/// Translations (mode 1) are left out.
pub fn star_descent(initial: &StarShape, alpha: f64, s: f64, modes: usize, steps: usize) -> Result<StarDescent> {
    let m_samples = initial.samples();
    if modes < 2 || modes > m_samples / 4 {
        return Err(Error::invalid(format!(
            "mode count {modes} outside 2..={} for {m_samples} samples",
            m_samples / 4
        )));
    }
    if !(alpha >= 0.0) {
        return Err(Error::invalid("coupling must be non-negative"));
    }
    let area = star_volume(initial);
    let basis: Vec<(usize, Vec<f64>)> = (2..=modes)
        .flat_map(|k| {
            let th = move |j: usize| 2.0 * PI * (k * j % m_samples) as f64 / m_samples as f64;
            [
                (k, (0..m_samples).map(|j| th(j).cos()).collect::<Vec<_>>()),
                (k, (0..m_samples).map(|j| th(j).sin()).collect::<Vec<_>>()),
            ]
        })
        .collect();
    let mut shape = initial.clone();
    let mut energy = star_energy(&shape, alpha, s)?;
    let mut trace = vec![energy];
    for _ in 0..steps {
        let r0 = shape.r0();
        let u = shape.u();
        let mut direction = vec![0.0; m_samples];
        for (k, b) in &basis {
            let shifted = |sign: f64| -> Result<f64> {
                let v: Vec<f64> = u.iter().zip(b).map(|(a, e)| a + sign * FD_STEP * e).collect();
                star_energy(&with_area(v, r0, area)?, alpha, s)
            };
            let g = (shifted(1.0)? - shifted(-1.0)?) / (2.0 * FD_STEP);
            let precond = 1.0 / (PI * r0 * ((k * k) as f64 - 1.0));
            for (d, e) in direction.iter_mut().zip(b) {
                *d -= precond * g * e;
            }
        }
        if direction.iter().all(|d| d.abs() < 1e-14) {
            break;
        }
        let mut tau = STEP;
        let mut accepted = None;
        let mut blocked = false;
        for _ in 0..=MAX_HALVINGS {
            let v: Vec<f64> = u.iter().zip(&direction).map(|(a, d)| a + tau * d).collect();
            if positive(&v) {
                blocked = false;
                let trial = with_area(v, r0, area)?;
                let e = star_energy(&trial, alpha, s)?;
                if e < energy {
                    accepted = Some((trial, e));
                    break;
                }
            } else {
                blocked = true;
            }
            tau *= 0.5;
        }
        match accepted {
            Some((trial, e)) => {
                shape = trial;
                energy = e;
                trace.push(e);
            }
            None if blocked => {
                return Err(Error::numerical(
                    "radius stays non-positive after repeated step halving",
                    tau,
                ))
            }
            None => break,
        }
    }
    let asymmetry = star_asymmetry(&shape);
    Ok(StarDescent {
        shape,
        energy,
        asymmetry,
        stayed_ball: asymmetry <= BALL_TOLERANCE,
        trace,
    })
}
