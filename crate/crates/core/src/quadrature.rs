//! Adaptive Gauss–Kronrod integration on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integral value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 2000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(0.0, 1e-12)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quad {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = fc * WGK[7];
    let mut ga = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kr += WGK[j] * pair;
        if j % 2 == 1 {
            ga += WG[j / 2] * pair;
        }
    }
    Quad {
        value: kr * half,
        error: ((kr - ga) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`, bisecting the worst interval until the
/// error estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quad> {
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut parts: Vec<(f64, f64, Quad)> = vec![(a, b, kronrod(&f, a, b))];
    loop {
        let value: f64 = parts.iter().map(|p| p.2.value).sum();
        let error: f64 = parts.iter().map(|p| p.2.error).sum();
        if !value.is_finite() {
            return Err(Error::numerical("integrand produced a non-finite value", f64::INFINITY));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Quad { value, error });
        }
        if parts.len() >= tol.max_intervals {
            let rel = if value != 0.0 { error / value.abs() } else { error };
            return Err(Error::numerical("adaptive quadrature did not converge", rel));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, kronrod(&f, lo, mid)));
        parts.push((mid, hi, kronrod(&f, mid, hi)));
    }
}

/// Integrates over several consecutive pieces separated by `breaks`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Quad> {
    let mut total = Quad {
        value: 0.0,
        error: 0.0,
    };
    for w in breaks.windows(2) {
        let q = integrate(&f, w[0], w[1], tol)?;
        total.value += q.value;
        total.error += q.error;
    }
    Ok(total)
}

/// Integrates `f` on `[0, b]` when `f(t)` may blow up like `t^(-p)` at the
/// origin with `p < 1`, via the substitution `t = u^(1/(1-p))`.
pub fn integrate_weak_singular<F: Fn(f64) -> f64>(f: F, p: f64, b: f64, tol: Tolerance) -> Result<Quad> {
    let q = 1.0 - p;
    let e = 1.0 / q;
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let t = u.powf(e);
        if t <= 0.0 {
            return 0.0;
        }
        f(t) * e * t / u
    };
    integrate(g, 0.0, b.powf(q), tol)
}

/// Like [`integrate_weak_singular`] but takes the bounded factor
/// `g(t) = t^p f(t)` instead of `f`, so strong singularities never overflow.
pub fn integrate_weak_singular_scaled<F: Fn(f64) -> f64>(g: F, p: f64, b: f64, tol: Tolerance) -> Result<Quad> {
    let q = 1.0 - p;
    let e = 1.0 / q;
    integrate(|u: f64| e * g(u.powf(e).max(f64::MIN_POSITIVE)), 0.0, b.powf(q), tol)
}
