use std::f64::consts::PI;

use super::{GridSet, GridSpec, Point};
use crate::error::{Error, Result};

/// Star-shaped curve `r(θ) = r0 (1 + u(θ))` sampled at `θ_j = 2πj/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarShape {
    r0: f64,
    u: Vec<f64>,
}

impl StarShape {
    pub fn new(r0: f64, u: Vec<f64>) -> Result<Self> {
        if !(r0 > 0.0) {
            return Err(Error::invalid(format!("star radius must be positive, got {r0}")));
        }
        let m = u.len();
        if m < 16 || m % 2 != 0 {
            return Err(Error::invalid(format!("need an even sample count of at least 16, got {m}")));
        }
        if let Some(j) = u.iter().position(|&v| !(1.0 + v > 0.0)) {
            return Err(Error::invalid(format!("radius sample {j} is not positive")));
        }
        Ok(StarShape { r0, u })
    }

    pub fn circle(r0: f64, m: usize) -> Result<Self> {
        StarShape::new(r0, vec![0.0; m])
    }

    /// Samples `u` from a closure of the angle.
    pub fn from_fn(r0: f64, m: usize, u: impl Fn(f64) -> f64) -> Result<Self> {
        StarShape::new(r0, (0..m).map(|j| u(angle(j, m))).collect())
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn samples(&self) -> usize {
        self.u.len()
    }

    pub fn radius(&self, j: usize) -> f64 {
        self.r0 * (1.0 + self.u[j])
    }

    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        StarShape::new(r0, self.u.clone())
    }

    /// Trigonometric interpolant of the radius at an arbitrary angle.
    pub fn interpolant(&self) -> RadiusInterpolant {
        RadiusInterpolant::new(self)
    }

    /// Cells whose centre lies within the curve drawn around `center`.
    pub fn rasterize(&self, center: Point, spec: GridSpec) -> GridSet {
        let f = self.interpolant();
        let (lo, hi) = f.bounds();
        GridSet::from_fn(spec, |p| {
            let (dx, dy) = (p.x - center.x, p.y - center.y);
            let rho = dx.hypot(dy);
            if rho <= lo {
                true
            } else if rho > hi {
                false
            } else {
                rho <= f.eval(dy.atan2(dx))
            }
        })
    }
}

fn angle(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

/// `½ Σ r_j² Δθ`.
pub fn star_volume(shape: &StarShape) -> f64 {
    let m = shape.samples();
    let dt = 2.0 * PI / m as f64;
    0.5 * dt * (0..m).map(|j| shape.radius(j).powi(2)).sum::<f64>()
}

/// `Σ sqrt(r_j² + r'_j²) Δθ` with the spectral derivative `r'`.
pub fn star_perimeter(shape: &StarShape) -> f64 {
    let m = shape.samples();
    let dt = 2.0 * PI / m as f64;
    let f = shape.interpolant();
    (0..m)
        .map(|j| shape.radius(j).hypot(f.derivative(angle(j, m))))
        .sum::<f64>()
        * dt
}

/// Band-limited Fourier series of the sampled radius.
#[derive(Debug, Clone)]
pub struct RadiusInterpolant {
    mean: f64,
    modes: Vec<(f64, f64, f64)>,
    lo: f64,
    hi: f64,
    nyquist: f64,
}

impl RadiusInterpolant {
    fn new(shape: &StarShape) -> Self {
        let m = shape.samples();
        let r: Vec<f64> = (0..m).map(|j| shape.radius(j)).collect();
        let mean = r.iter().sum::<f64>() / m as f64;
        let mut modes = Vec::new();
        let scale = r.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        for k in 1..=m / 2 {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &v) in r.iter().enumerate() {
                let t = angle(j * k % m, m);
                a += v * t.cos();
                b += v * t.sin();
            }
            let w = if k == m / 2 { 1.0 } else { 2.0 } / m as f64;
            let (a, b) = (a * w, b * w);
            if a.abs().max(b.abs()) > 1e-15 * scale {
                modes.push((k as f64, a, b));
            }
        }
        let amp: f64 = modes.iter().map(|&(_, a, b)| a.hypot(b)).sum();
        RadiusInterpolant {
            mean,
            modes,
            lo: mean - amp,
            hi: mean + amp,
            nyquist: (m / 2) as f64,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.mean
            + self
                .modes
                .iter()
                .map(|&(k, a, b)| a * (k * theta).cos() + b * (k * theta).sin())
                .sum::<f64>()
    }

    /// Angular derivative, without the Nyquist mode.
    pub fn derivative(&self, theta: f64) -> f64 {
        let nyq = self.nyquist;
        self.modes
            .iter()
            .filter(|m| m.0 < nyq)
            .map(|&(k, a, b)| k * (b * (k * theta).cos() - a * (k * theta).sin()))
            .sum()
    }

    /// Radii bracketing the curve.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}
