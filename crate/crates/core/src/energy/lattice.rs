//! Pair weights of a radial kernel between lattice cells, with their
//! Fourier transforms for fast mask sums.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::fft::{fast_len, Fft2, C64};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{integrate, Tolerance};

const GL_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Which cell pairs carry weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    /// Only pairs farther apart than the near-field radius.
    Far,
    /// Every pair of distinct cells.
    Pairs,
    /// Every pair including a cell with itself.
    PairsWithSelf,
}

fn gl8() -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (GL_X[i], GL_W[i]);
        out[2 * i + 1] = (-GL_X[i], GL_W[i]);
    }
    out
}

/// `h⁴` times the mean of `K` over a `sub × sub` sample of the offset cell.
pub fn cell_average(kernel: &KernelSpec, h: f64, ox: i64, oy: i64, sub: usize) -> f64 {
    let mut acc = 0.0;
    for a in 0..sub {
        let x = (ox as f64 + (a as f64 + 0.5) / sub as f64 - 0.5) * h;
        for b in 0..sub {
            let y = (oy as f64 + (b as f64 + 0.5) / sub as f64 - 0.5) * h;
            acc += kernel.value(x.hypot(y));
        }
    }
    acc / (sub * sub) as f64 * h.powi(4)
}

/// Midpoint approximation of [`pair_weight`] on a `2 sub × 2 sub` sample of the
/// tent support.
pub fn tent_average(kernel: &KernelSpec, h: f64, ox: i64, oy: i64, sub: usize) -> f64 {
    let m = 2 * sub;
    let pts: Vec<(f64, f64)> = (0..m)
        .map(|a| {
            let u = (a as f64 + 0.5) / sub as f64 - 1.0;
            (u * h, 1.0 - u.abs())
        })
        .collect();
    let mut acc = 0.0;
    for &(dx, wx) in &pts {
        let x = ox as f64 * h + dx;
        for &(dy, wy) in &pts {
            acc += wx * wy * kernel.value(x.hypot(oy as f64 * h + dy));
        }
    }
    acc / (sub * sub) as f64 * h.powi(4)
}

/// Exact `∫_{cell 0} ∫_{cell o} K(x − y) dx dy`: the kernel against the tent
/// function `(h − |z_x − o_x h|)₊ (h − |z_y − o_y h|)₊`.
pub fn pair_weight(kernel: &KernelSpec, h: f64, ox: i64, oy: i64) -> Result<f64> {
    let (cx, cy) = (ox as f64 * h, oy as f64 * h);
    let tent = |x: f64, y: f64| (h - (x - cx).abs()).max(0.0) * (h - (y - cy).abs()).max(0.0);
    let mut total = 0.0;
    for i in [-1i64, 0] {
        for j in [-1i64, 0] {
            let (x0, y0) = ((ox + i) as f64 * h, (oy + j) as f64 * h);
            let corner = [(ox + i, oy + j), (ox + i + 1, oy + j), (ox + i, oy + j + 1), (ox + i + 1, oy + j + 1)]
                .iter()
                .position(|&c| c == (0, 0));
            total += match corner {
                None => {
                    let nodes = gl8();
                    let mut acc = 0.0;
                    for &(xa, wa) in &nodes {
                        let x = x0 + 0.5 * h * (1.0 + xa);
                        for &(ya, wb) in &nodes {
                            let y = y0 + 0.5 * h * (1.0 + ya);
                            acc += wa * wb * kernel.value(x.hypot(y)) * tent(x, y);
                        }
                    }
                    acc * 0.25 * h * h
                }
                Some(k) => {
                    // polar coordinates about the origin corner, axes pointing into the square
                    let (sx, sy) = match k {
                        0 => (1.0, 1.0),
                        1 => (-1.0, 1.0),
                        2 => (1.0, -1.0),
                        _ => (-1.0, -1.0),
                    };
                    let t = |u: f64, v: f64| tent(sx * u, sy * v);
                    let (t00, t10, t01, t11) = (t(0.0, 0.0), t(h, 0.0), t(0.0, h), t(h, h));
                    let radial = |theta: f64| -> f64 {
                        let (c, s) = (theta.cos(), theta.sin());
                        let rho = h / c.max(s);
                        let b = ((t10 - t00) * c + (t01 - t00) * s) / h;
                        let cc = (t11 - t10 - t01 + t00) * c * s / (h * h);
                        let mut v = 0.0;
                        if t00 != 0.0 {
                            v += t00 * kernel.head_moment(1.0, rho);
                        }
                        if b != 0.0 {
                            v += b * kernel.head_moment(2.0, rho);
                        }
                        if cc != 0.0 {
                            v += cc * kernel.head_moment(3.0, rho);
                        }
                        v
                    };
                    let tol = Tolerance::new(0.0, 1e-10);
                    integrate(radial, 0.0, PI / 4.0, tol)?.value + integrate(radial, PI / 4.0, PI / 2.0, tol)?.value
                }
            };
        }
    }
    Ok(total)
}

fn taper(r: f64, r1: f64, r2: f64) -> f64 {
    if r <= r1 {
        1.0
    } else if r >= r2 {
        0.0
    } else {
        0.5 * (1.0 + (PI * (r - r1) / (r2 - r1)).cos())
    }
}

/// Contribution per unit boundary length of the pairs closer than `delta`,
/// calibrated on a straight boundary: the continuum half-plane value minus
/// what the far lattice sum already captures, averaged over boundary
/// directions. A smooth taper beyond `4δ` makes both sides finite.
pub fn near_band_coefficient(kernel: &KernelSpec, h: f64, delta: f64, sub: usize) -> Result<f64> {
    let (r1, r2) = (4.0 * delta, 8.0 * delta);
    let tol = Tolerance::new(0.0, 1e-11);
    let inner = kernel.head_moment(2.0, r1);
    if !inner.is_finite() {
        return Err(Error::invalid("kernel singularity too strong for a boundary band"));
    }
    let outer = integrate(|r| kernel.value(r) * r * r * taper(r, r1, r2), r1, r2, tol)?.value;
    let continuum = 4.0 * (inner + outer);
    let m = (r2 / h).ceil() as i64 + 1;
    let mut terms = Vec::new();
    for oy in -m..=m {
        for ox in -m..=m {
            let d = (ox as f64).hypot(oy as f64) * h;
            if d <= delta * (1.0 + 1e-12) || d >= r2 {
                continue;
            }
            let kbar = cell_average(kernel, h, ox, oy, sub) / h.powi(4);
            terms.push((ox as f64 * h, oy as f64 * h, 2.0 * kbar * taper(d, r1, r2) * h * h));
        }
    }
    let na = 16;
    let mut avg = 0.0;
    for k in 0..=na {
        let th = 0.25 * PI * k as f64 / na as f64;
        let (c, s) = (th.cos(), th.sin());
        let v: f64 = terms.iter().map(|&(x, y, w)| w * (x * c + y * s).max(0.0)).sum();
        avg += if k == 0 || k == na { 0.5 } else { 1.0 } * v;
    }
    avg /= na as f64;
    Ok(continuum - avg)
}

/// `∫` of `K` over the plane outside the rectangle `[-lx, lx] × [-ly, ly]`.
pub fn outside_rectangle(kernel: &KernelSpec, lx: f64, ly: f64) -> Result<f64> {
    let split = ly.atan2(lx);
    let tol = Tolerance::new(0.0, 1e-11);
    let a = integrate(|t: f64| kernel.tail_moment(1.0, lx / t.cos()), 0.0, split, tol)?.value;
    let b = integrate(|t: f64| kernel.tail_moment(1.0, ly / t.sin()), split, PI / 2.0, tol)?.value;
    Ok(4.0 * (a + b))
}

/// Lattice weights of one kernel on one grid size.
#[derive(Debug)]
pub struct LatticeKernel {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub delta: f64,
    pub mode: WeightMode,
    quad: Vec<f64>,
    /// Far weight summed over every partner cell in the plane.
    pub far_total: f64,
    /// Near-band contribution per unit boundary length.
    pub near_coef: f64,
    fft: Fft2,
    spectrum: Vec<f64>,
}

impl LatticeKernel {
    pub fn build(kernel: &KernelSpec, h: f64, nx: usize, ny: usize, delta: f64, sub: usize, mode: WeightMode) -> Result<Self> {
        if kernel.n != 2 {
            return Err(Error::invalid("lattice energies need a planar kernel"));
        }
        let exact = (delta / h).ceil() as i64 + 1;
        let mut quad = vec![0.0; nx * ny];
        for oy in 0..ny as i64 {
            for ox in 0..nx as i64 {
                let near = ((ox * ox + oy * oy) as f64) * h * h <= delta * delta * (1.0 + 1e-12);
                let w = match mode {
                    WeightMode::Far if near => 0.0,
                    WeightMode::Far => cell_average(kernel, h, ox, oy, sub),
                    WeightMode::Pairs if ox == 0 && oy == 0 => 0.0,
                    _ if ox <= exact && oy <= exact => pair_weight(kernel, h, ox, oy)?,
                    _ => tent_average(kernel, h, ox, oy, sub),
                };
                if !w.is_finite() {
                    return Err(Error::invalid("kernel weight is infinite on the lattice"));
                }
                quad[oy as usize * nx + ox as usize] = w;
            }
        }
        let (mut far_total, mut near_coef) = (f64::NAN, f64::NAN);
        if mode == WeightMode::Far {
            let mut boxed = 0.0;
            for oy in 0..ny {
                for ox in 0..nx {
                    let mult = if ox > 0 { 2.0 } else { 1.0 } * if oy > 0 { 2.0 } else { 1.0 };
                    boxed += mult * quad[oy * nx + ox];
                }
            }
            let lx = (nx as f64 - 0.5) * h;
            let ly = (ny as f64 - 0.5) * h;
            far_total = boxed + h * h * outside_rectangle(kernel, lx, ly)?;
            near_coef = near_band_coefficient(kernel, h, delta, sub)?;
        }
        let (px, py) = (fast_len(2 * nx - 1), fast_len(2 * ny - 1));
        let fft = Fft2::new(px, py);
        let mut buf = vec![C64::new(0.0, 0.0); px * py];
        for dy in -(ny as i64 - 1)..ny as i64 {
            let row = dy.rem_euclid(py as i64) as usize * px;
            for dx in -(nx as i64 - 1)..nx as i64 {
                buf[row + dx.rem_euclid(px as i64) as usize] =
                    C64::new(quad[dy.unsigned_abs() as usize * nx + dx.unsigned_abs() as usize], 0.0);
            }
        }
        fft.forward(&mut buf);
        let spectrum = buf.iter().map(|c| c.re).collect();
        Ok(LatticeKernel {
            h,
            nx,
            ny,
            delta,
            mode,
            quad,
            far_total,
            near_coef,
            fft,
            spectrum,
        })
    }

    /// Weight between cells `dx`, `dy` apart, `|dx| < nx`, `|dy| < ny`.
    #[inline]
    pub fn weight(&self, dx: i64, dy: i64) -> f64 {
        self.quad[dy.unsigned_abs() as usize * self.nx + dx.unsigned_abs() as usize]
    }

    /// Row `|dy|` of the quadrant table, indexed by `|dx|`.
    pub fn weight_row(&self, dy: usize) -> &[f64] {
        &self.quad[dy * self.nx..(dy + 1) * self.nx]
    }

    fn transform(&self, mask: &[bool]) -> Vec<C64> {
        let px = self.fft.w;
        let mut buf = vec![C64::new(0.0, 0.0); self.fft.len()];
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if mask[iy * self.nx + ix] {
                    buf[iy * px + ix].re = 1.0;
                }
            }
        }
        self.fft.forward(&mut buf);
        buf
    }

    fn check(&self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.nx * self.ny {
            return Err(Error::invalid("mask does not match the lattice kernel grid"));
        }
        Ok(())
    }

    /// `Σ_{i,j ∈ E} w(i − j)`.
    pub fn self_sum(&self, mask: &[bool]) -> Result<f64> {
        self.check(mask)?;
        let t = self.transform(mask);
        let s: f64 = t.iter().zip(&self.spectrum).map(|(c, w)| w * c.norm_sqr()).sum();
        Ok(s / self.fft.len() as f64)
    }

    /// `Σ_{i ∈ A, j ∈ B} w(i − j)`.
    pub fn cross_sum(&self, a: &[bool], b: &[bool]) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        let (ta, tb) = (self.transform(a), self.transform(b));
        let s: f64 = ta
            .iter()
            .zip(&tb)
            .zip(&self.spectrum)
            .map(|((x, y), w)| w * (x * y.conj()).re)
            .sum();
        Ok(s / self.fft.len() as f64)
    }

    /// `φ(i) = Σ_{j ∈ E} w(i − j)` for every cell of the grid.
    pub fn field(&self, mask: &[bool]) -> Result<Vec<f64>> {
        self.check(mask)?;
        let mut t = self.transform(mask);
        for (c, w) in t.iter_mut().zip(&self.spectrum) {
            *c *= *w;
        }
        self.fft.inverse(&mut t);
        let px = self.fft.w;
        let norm = self.fft.len() as f64;
        let mut out = vec![0.0; self.nx * self.ny];
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out[iy * self.nx + ix] = t[iy * px + ix].re / norm;
            }
        }
        Ok(out)
    }
}

type CacheEntry = (String, Arc<LatticeKernel>);

fn cache() -> &'static Mutex<Vec<CacheEntry>> {
    static CACHE: OnceLock<Mutex<Vec<CacheEntry>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

const CACHE_SLOTS: usize = 6;

/// Shared, lazily built lattice weights.
pub fn lattice_kernel(
    kernel: &KernelSpec,
    h: f64,
    nx: usize,
    ny: usize,
    delta: f64,
    sub: usize,
    mode: WeightMode,
) -> Result<Arc<LatticeKernel>> {
    let key = format!(
        "{}|{:016x}|{nx}|{ny}|{:016x}|{sub}|{mode:?}",
        kernel.cache_key(),
        h.to_bits(),
        delta.to_bits()
    );
    {
        let mut c = cache().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(pos) = c.iter().position(|(k, _)| *k == key) {
            let entry = c.remove(pos);
            let lk = entry.1.clone();
            c.push(entry);
            return Ok(lk);
        }
    }
    let lk = Arc::new(LatticeKernel::build(kernel, h, nx, ny, delta, sub, mode)?);
    let mut c = cache().lock().unwrap_or_else(|e| e.into_inner());
    if c.len() >= CACHE_SLOTS {
        c.remove(0);
    }
    c.push((key, lk.clone()));
    Ok(lk)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_weight_of_smooth_kernel() {
        // far offsets: pair weight ≈ h⁴ K(|o|h)
        let k = KernelSpec::power_law(2, 0.5).unwrap();
        let h = 0.1;
        let w = pair_weight(&k, h, 9, 4).unwrap();
        let approx = tent_average(&k, h, 9, 4, 16);
        assert!(((w - approx) / w).abs() < 1e-4, "{w} {approx}");
    }

    #[test]
    fn pair_weights_sum_to_mass_for_integrable_kernel() {
        // truncated kernel: Σ_o w(o) over a large box ≈ h² ∫ K
        let k = KernelSpec::truncated(2, 0.5, 0.3).unwrap();
        let h = 0.1;
        let mut box_sum = 0.0;
        let m: i64 = 40;
        for oy in -m..=m {
            for ox in -m..=m {
                box_sum += if ox.abs() <= 4 && oy.abs() <= 4 {
                    pair_weight(&k, h, ox, oy).unwrap()
                } else {
                    tent_average(&k, h, ox, oy, 4)
                };
            }
        }
        let l = (m as f64 + 0.5) * h;
        let total = box_sum + h * h * outside_rectangle(&k, l, l).unwrap();
        let mass = 2.0 * PI * (k.head_moment(1.0, 1.0) + k.tail_moment(1.0, 1.0));
        assert!(((total - h * h * mass) / (h * h * mass)).abs() < 1e-3, "{total} {}", h * h * mass);
    }

    #[test]
    fn outside_rectangle_power_law() {
        let k = KernelSpec::power_law(2, 0.5).unwrap();
        let l = 1.3;
        // (8/s) ∫_0^{π/4} (L/cos θ)^{-s} dθ
        let f = |t: f64| (l / t.cos()).powf(-0.5);
        let want = 16.0 * integrate(f, 0.0, PI / 4.0, Tolerance::default()).unwrap().value;
        assert!((outside_rectangle(&k, l, l).unwrap() - want).abs() < 1e-10 * want);
    }

    #[test]
    fn fft_sums_match_direct() {
        let k = KernelSpec::power_law(2, 0.3).unwrap();
        let (nx, ny) = (9, 7);
        let lk = LatticeKernel::build(&k, 0.1, nx, ny, 0.25, 4, WeightMode::Far).unwrap();
        let mask: Vec<bool> = (0..nx * ny).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let other: Vec<bool> = mask.iter().map(|b| !b).collect();
        let mut direct = 0.0;
        let mut cross = 0.0;
        for i in 0..nx * ny {
            for j in 0..nx * ny {
                let (dx, dy) = ((i % nx) as i64 - (j % nx) as i64, (i / nx) as i64 - (j / nx) as i64);
                if mask[i] && mask[j] {
                    direct += lk.weight(dx, dy);
                }
                if mask[i] && other[j] {
                    cross += lk.weight(dx, dy);
                }
            }
        }
        assert!((lk.self_sum(&mask).unwrap() - direct).abs() < 1e-10 * direct);
        assert!((lk.cross_sum(&mask, &other).unwrap() - cross).abs() < 1e-10 * cross);
        let phi = lk.field(&mask).unwrap();
        let s: f64 = phi.iter().zip(&mask).filter(|(_, m)| **m).map(|(p, _)| p).sum();
        assert!((s - direct).abs() < 1e-10 * direct);
    }
}
