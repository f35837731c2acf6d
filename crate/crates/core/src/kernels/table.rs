//! Monotone radial tables with a fitted power-law tail.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::consts::sphere_area;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TableHeader {
    pub n: usize,
    pub s: f64,
    pub k0: f64,
    pub tail_exponent: f64,
}

/// Kernel profile `k(r)` on increasing radii, interpolated by a monotone
/// cubic in `(ln r, ln k)` and continued by `k0 r^{-(n+s)}` beyond the last radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    header: TableHeader,
    radii: Vec<f64>,
    values: Vec<f64>,
    lx: Vec<f64>,
    ly: Vec<f64>,
    slope: Vec<f64>,
    head_power: f64,
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = del[0];
        d[1] = del[0];
        return d;
    }
    for i in 1..n - 1 {
        if del[i - 1] * del[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let mut e = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if e * d0 <= 0.0 {
            e = 0.0;
        } else if d0 * d1 <= 0.0 && e.abs() > 3.0 * d0.abs() {
            e = 3.0 * d0;
        }
        e
    };
    d[0] = end(h[0], h[1], del[0], del[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

impl RadialTable {
    pub fn new(header: TableHeader, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 3 {
            return Err(Error::invalid("table needs at least three (radius, value) pairs"));
        }
        if !(radii[0] > 0.0) {
            return Err(Error::invalid("first table radius must be positive"));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("table radii must increase strictly"));
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("table values must be positive and finite"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("table values must be non-increasing"));
        }
        if !(header.s > 0.0 && header.s < 1.0) || !(header.k0 > 0.0) {
            return Err(Error::invalid("table header needs s in (0,1) and k0 > 0"));
        }
        let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let slope = pchip_slopes(&lx, &ly);
        let head_power = -(ly[1] - ly[0]) / (lx[1] - lx[0]);
        Ok(RadialTable {
            header,
            radii,
            values,
            lx,
            ly,
            slope,
            head_power,
        })
    }

    /// Builds the table and fits the tail over its last decade of radii:
    /// the free log-log slope gives the exponent, the slope pinned at
    /// `-(n+s)` gives `k0`.
    pub fn fitted(n: usize, s: f64, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let last = *radii.last().ok_or_else(|| Error::invalid("empty table"))?;
        let pts: Vec<(f64, f64)> = radii
            .iter()
            .zip(&values)
            .filter(|(r, _)| **r >= last / 10.0 * (1.0 - 1e-12))
            .map(|(r, v)| (r.ln(), v.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::invalid("tail fit needs two radii in the last decade"));
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let tail_exponent = sxy / sxx;
        let q = n as f64 + s;
        let k0 = (pts.iter().map(|p| p.1 + q * p.0).sum::<f64>() / m).exp();
        RadialTable::new(
            TableHeader {
                n,
                s,
                k0,
                tail_exponent,
            },
            radii,
            values,
        )
    }

    pub fn header(&self) -> &TableHeader {
        &self.header
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k0(&self) -> f64 {
        self.header.k0
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Decay rate of the power law continuing the table towards the origin.
    pub fn head_power(&self) -> f64 {
        self.head_power
    }

    fn tail_power(&self) -> f64 {
        self.header.n as f64 + self.header.s
    }

    fn interp(&self, i: usize, x: f64) -> f64 {
        let h = self.lx[i + 1] - self.lx[i];
        let t = (x - self.lx[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (h00 * self.ly[i] + h10 * h * self.slope[i] + h01 * self.ly[i + 1] + h11 * h * self.slope[i + 1]).exp()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.r_max() {
            return self.header.k0 * r.powf(-self.tail_power());
        }
        if r <= self.r_min() {
            return self.values[0] * (r / self.r_min()).powf(-self.head_power);
        }
        let x = r.ln();
        let i = match self.lx.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        self.interp(i, x)
    }

    /// `r^q k(r)`, finite for tiny `r` when `q` covers the head power.
    pub fn scaled_eval(&self, r: f64, q: f64) -> f64 {
        if r <= self.r_min() {
            return self.values[0] * self.r_min().powf(self.head_power) * r.powf(q - self.head_power);
        }
        r.powf(q) * self.eval(r)
    }

    fn panel(&self, i: usize, a: f64, b: f64, p: f64) -> f64 {
        let f = |x: f64| (x * (p + 1.0)).exp() * self.interp(i, x);
        integrate(f, a, b, Tolerance::new(0.0, 1e-13)).map(|q| q.value).unwrap_or(f64::NAN)
    }

    /// `∫_a^b r^p k(r) dr` for `r_min ≤ a ≤ b ≤ r_max`.
    fn segment_moment(&self, p: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let (xa, xb) = (a.ln(), b.ln());
        let start = match self.lx.binary_search_by(|v| v.total_cmp(&xa)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let mut total = 0.0;
        let mut x = xa;
        for i in start..self.lx.len() - 1 {
            let end = self.lx[i + 1].min(xb);
            if end > x {
                total += self.panel(i, x, end, p);
            }
            x = end;
            if x >= xb {
                break;
            }
        }
        total
    }

    /// `∫_a^b r^p k0 r^{-(n+s)} dr`.
    fn beyond_moment(&self, p: f64, a: f64, b: f64) -> f64 {
        let e = p + 1.0 - self.tail_power();
        if e.abs() < 1e-14 {
            self.header.k0 * (b / a).ln()
        } else {
            self.header.k0 * (b.powf(e) - a.powf(e)) / e
        }
    }

    /// `∫_ρ^∞ r^p k(r) dr`, requiring `p + 1 < n + s`.
    pub fn tail_moment(&self, p: f64, rho: f64) -> f64 {
        let q = self.tail_power() - p - 1.0;
        let (r0, r1) = (self.r_min(), self.r_max());
        let mut total = self.header.k0 * rho.max(r1).powf(-q) / q;
        if rho < r1 {
            total += self.segment_moment(p, rho.max(r0), r1);
        }
        if rho < r0 {
            total += self.head_moment(p, r0) - self.head_moment(p, rho);
        }
        total
    }

    /// `∫_0^ρ r^p k(r) dr` for `ρ` at or below the first radius.
    fn head_moment(&self, p: f64, rho: f64) -> f64 {
        let e = p + 1.0 - self.head_power;
        self.values[0] * self.r_min().powf(self.head_power) * rho.powf(e) / e
    }

    /// `∫_0^ρ r^p k(r) dr`, requiring `p + 1 > head power`.
    pub fn head_moment_to(&self, p: f64, rho: f64) -> f64 {
        let (r0, r1) = (self.r_min(), self.r_max());
        if rho <= r0 {
            return self.head_moment(p, rho);
        }
        let mut total = self.head_moment(p, r0) + self.segment_moment(p, r0, rho.min(r1));
        if rho > r1 {
            total += self.beyond_moment(p, r1, rho);
        }
        total
    }

    /// `∫_{R^n} K`.
    pub fn mass(&self) -> f64 {
        let n = self.header.n;
        if self.head_power >= n as f64 {
            return f64::INFINITY;
        }
        let p = n as f64 - 1.0;
        sphere_area(n) * (self.head_moment(p, self.r_min()) + self.tail_moment(p, self.r_min()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!("{r:e},{v:e}\n"));
        }
        out
    }

    pub fn from_csv(header: TableHeader, text: &str) -> Result<Self> {
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (k == 0 && line.starts_with('r')) {
                continue;
            }
            let mut it = line.split(',');
            let parse = |t: Option<&str>| -> Result<f64> {
                t.and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| Error::invalid(format!("bad table row {}: {line:?}", k + 1)))
            };
            radii.push(parse(it.next())?);
            values.push(parse(it.next())?);
        }
        RadialTable::new(header, radii, values)
    }

    /// Writes `<stem>.csv` with the samples and `<stem>.json` with the header.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        fs::write(csv_path, self.to_csv())?;
        fs::write(
            csv_path.with_extension("json"),
            serde_json::to_string_pretty(&self.header)?,
        )?;
        Ok(())
    }

    pub fn load(csv_path: &Path) -> Result<Self> {
        let header: TableHeader = serde_json::from_str(&fs::read_to_string(csv_path.with_extension("json"))?)?;
        RadialTable::from_csv(header, &fs::read_to_string(csv_path)?)
    }
}
