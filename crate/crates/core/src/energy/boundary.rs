//! Fractional perimeter of star-shaped curves as a double boundary integral,
//! `P_s = (2/s²) ∮∮ X′(θ)·X′(φ) |X(θ) − X(φ)|^{−s} dθ dφ`.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::shapes::StarShape;

/// Fourier coefficients of `|2 sin(ψ/2)|^{−s}` for modes `0..=top`.
pub fn sine_power_coefficients(s: f64, top: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(top + 1);
    c.push((ln_gamma(1.0 - s) - 2.0 * ln_gamma(1.0 - 0.5 * s)).exp());
    for m in 0..top {
        let prev = c[m];
        let mf = m as f64;
        c.push(prev * (mf + 0.5 * s) / (mf + 1.0 - 0.5 * s));
    }
    c
}

/// Product-quadrature weights `w_d` for `∫ g(φ) |2 sin((θ_j − φ)/2)|^{−s} dφ ≈ Σ_k w_{j−k} g(φ_k)`.
pub fn singular_weights(s: f64, m: usize) -> Vec<f64> {
    let half = m / 2;
    let c = sine_power_coefficients(s, half);
    (0..m)
        .map(|d| {
            let mut w = c[0];
            for (k, ck) in c.iter().enumerate().take(half).skip(1) {
                w += 2.0 * ck * (2.0 * PI * (k * d % m) as f64 / m as f64).cos();
            }
            w += c[half] * if d % 2 == 0 { 1.0 } else { -1.0 };
            w * 2.0 * PI / m as f64
        })
        .collect()
}

/// Curve points and tangents at the sample angles.
pub fn star_frame(shape: &StarShape) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let m = shape.samples();
    let f = shape.interpolant();
    let mut pts = Vec::with_capacity(m);
    let mut tan = Vec::with_capacity(m);
    for j in 0..m {
        let t = 2.0 * PI * j as f64 / m as f64;
        let (c, sn) = (t.cos(), t.sin());
        let r = shape.radius(j);
        let dr = f.derivative(t);
        pts.push([r * c, r * sn]);
        tan.push([dr * c - r * sn, dr * sn + r * c]);
    }
    (pts, tan)
}

/// Spectrally accurate `P_s` of a smooth star-shaped curve.
pub fn star_fractional_perimeter(shape: &StarShape, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("exponent {s} outside (0, 1)")));
    }
    let m = shape.samples();
    let w = singular_weights(s, m);
    let (pts, tan) = star_frame(shape);
    let dt = 2.0 * PI / m as f64;
    let mut total = 0.0;
    for j in 0..m {
        let mut row = 0.0;
        for k in 0..m {
            let d = (j + m - k) % m;
            let dot = tan[j][0] * tan[k][0] + tan[j][1] * tan[k][1];
            let g = if d == 0 {
                dot.powf(1.0 - 0.5 * s)
            } else {
                let chord = (pts[j][0] - pts[k][0]).hypot(pts[j][1] - pts[k][1]);
                let sine = 2.0 * (PI * d as f64 / m as f64).sin().abs();
                dot * (chord / sine).powf(-s)
            };
            row += w[d] * g;
        }
        total += row;
    }
    Ok(2.0 / (s * s) * dt * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::ball_pk;
    use crate::kernels::KernelSpec;

    #[test]
    fn coefficients_match_direct_quadrature() {
        // c_1 = (1/2π) ∫ cos ψ |2 sin(ψ/2)|^{-s} dψ by a fine midpoint rule on the smooth part
        let s = 0.4;
        let c = sine_power_coefficients(s, 3);
        let n = 400_000;
        let mut acc = [0.0; 4];
        for i in 0..n {
            let psi = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            let v = (2.0 * (psi / 2.0).sin()).abs().powf(-s);
            for (k, a) in acc.iter_mut().enumerate() {
                *a += (k as f64 * psi).cos() * v / n as f64;
            }
        }
        for k in 0..4 {
            assert!((acc[k] - c[k]).abs() < 2e-3, "mode {k}: {} vs {}", acc[k], c[k]);
        }
    }

    #[test]
    fn circle_matches_radial_quadrature() {
        for s in [0.2, 0.5, 0.8] {
            let star = StarShape::circle(0.7, 32).unwrap();
            let v = star_fractional_perimeter(&star, s).unwrap();
            let want = ball_pk(2, &KernelSpec::power_law(2, s).unwrap(), 0.7).unwrap().pk_ball;
            assert!(((v - want) / want).abs() < 1e-12, "s={s}: {v} vs {want}");
        }
    }

    #[test]
    fn perturbed_curve_converges_spectrally() {
        let f = |t: f64| 0.15 * (3.0 * t).cos() + 0.05 * (5.0 * t).sin();
        let coarse = star_fractional_perimeter(&StarShape::from_fn(1.0, 64, f).unwrap(), 0.5).unwrap();
        let fine = star_fractional_perimeter(&StarShape::from_fn(1.0, 256, f).unwrap(), 0.5).unwrap();
        assert!(((coarse - fine) / fine).abs() < 1e-8);
    }
}
