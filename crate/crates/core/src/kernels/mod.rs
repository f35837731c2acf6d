//! Radially symmetric interaction kernels.

mod bessel;
mod bounds;
mod table;

use std::sync::Arc;

pub use bessel::{
    bessel_k0, bessel_kernel_value, bessel_tail_coefficient, build_bessel_table, default_bessel_grid, log_grid,
};
pub use bounds::{verify_kernel_bounds, KernelBoundsReport, LowerBound};
pub use table::{RadialTable, TableHeader};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum KernelVariant {
    /// `r^{-(n+s)}`.
    PowerLaw { s: f64 },
    /// `min(ρ0^{-(n+s)}, r^{-(n+s)})`.
    Truncated { s: f64, rho0: f64 },
    /// Sampled profile with a power-law tail.
    Tabulated { s: f64, table: Arc<RadialTable> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub n: usize,
    pub variant: KernelVariant,
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("exponent s must lie in (0,1), got {s}")))
    }
}

impl KernelSpec {
    pub fn power_law(n: usize, s: f64) -> Result<Self> {
        check_s(s)?;
        Ok(KernelSpec {
            n,
            variant: KernelVariant::PowerLaw { s },
        })
    }

    pub fn truncated(n: usize, s: f64, rho0: f64) -> Result<Self> {
        check_s(s)?;
        if !(rho0 > 0.0) {
            return Err(Error::invalid(format!("truncation radius must be positive, got {rho0}")));
        }
        Ok(KernelSpec {
            n,
            variant: KernelVariant::Truncated { s, rho0 },
        })
    }

    pub fn tabulated(table: RadialTable) -> Result<Self> {
        let h = table.header().clone();
        check_s(h.s)?;
        Ok(KernelSpec {
            n: h.n,
            variant: KernelVariant::Tabulated {
                s: h.s,
                table: Arc::new(table),
            },
        })
    }

    pub fn s(&self) -> f64 {
        match &self.variant {
            KernelVariant::PowerLaw { s } | KernelVariant::Truncated { s, .. } | KernelVariant::Tabulated { s, .. } => {
                *s
            }
        }
    }

    pub fn is_power_law(&self) -> bool {
        matches!(self.variant, KernelVariant::PowerLaw { .. })
    }

    pub fn table(&self) -> Option<&RadialTable> {
        match &self.variant {
            KernelVariant::Tabulated { table, .. } => Some(table),
            _ => None,
        }
    }

    /// Decay exponent `n + s` of the reference power law.
    pub fn order(&self) -> f64 {
        self.n as f64 + self.s()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("kernel evaluated at non-positive radius {r}")));
        }
        Ok(self.value(r))
    }

    /// Kernel profile at `r > 0` without argument checks.
    pub fn value(&self, r: f64) -> f64 {
        let q = self.order();
        match &self.variant {
            KernelVariant::PowerLaw { .. } => r.powf(-q),
            KernelVariant::Truncated { rho0, .. } => r.max(*rho0).powf(-q),
            KernelVariant::Tabulated { table, .. } => table.eval(r),
        }
    }

    /// `r^q K(r)` evaluated without forming `K(r)` near the origin.
    pub fn scaled_value(&self, r: f64, q: f64) -> f64 {
        let o = self.order();
        match &self.variant {
            KernelVariant::PowerLaw { .. } => r.powf(q - o),
            KernelVariant::Truncated { rho0, .. } if r < *rho0 => r.powf(q) * rho0.powf(-o),
            KernelVariant::Truncated { .. } => r.powf(q - o),
            KernelVariant::Tabulated { table, .. } => table.scaled_eval(r, q),
        }
    }

    /// Power `p` with `K(r) ≲ r^{-p}` near the origin.
    pub fn singularity(&self) -> f64 {
        match &self.variant {
            KernelVariant::PowerLaw { .. } => self.order(),
            KernelVariant::Truncated { .. } => 0.0,
            KernelVariant::Tabulated { table, .. } => table.head_power().max(0.0),
        }
    }

    /// `∫_ρ^∞ r^p K(r) dr` for `p + 1 < n + s`.
    pub fn tail_moment(&self, p: f64, rho: f64) -> f64 {
        let q = self.order() - p - 1.0;
        match &self.variant {
            KernelVariant::PowerLaw { .. } => rho.powf(-q) / q,
            KernelVariant::Truncated { rho0, .. } => {
                if rho >= *rho0 {
                    rho.powf(-q) / q
                } else {
                    rho0.powf(-self.order()) * (rho0.powf(p + 1.0) - rho.powf(p + 1.0)) / (p + 1.0)
                        + rho0.powf(-q) / q
                }
            }
            KernelVariant::Tabulated { table, .. } => table.tail_moment(p, rho),
        }
    }

    /// `∫_0^ρ r^p K(r) dr`, infinite when the origin singularity is too strong.
    pub fn head_moment(&self, p: f64, rho: f64) -> f64 {
        match &self.variant {
            KernelVariant::PowerLaw { .. } => {
                let e = p + 1.0 - self.order();
                if e <= 0.0 {
                    f64::INFINITY
                } else {
                    rho.powf(e) / e
                }
            }
            KernelVariant::Truncated { rho0, .. } => {
                let q = self.order();
                let c = rho0.powf(-q);
                let inner = c * rho.min(*rho0).powf(p + 1.0) / (p + 1.0);
                if rho <= *rho0 {
                    return inner;
                }
                let e = p + 1.0 - q;
                let outer = if e.abs() < 1e-14 {
                    (rho / rho0).ln()
                } else {
                    (rho.powf(e) - rho0.powf(e)) / e
                };
                inner + outer
            }
            KernelVariant::Tabulated { table, .. } => {
                if p + 1.0 <= table.head_power() {
                    f64::INFINITY
                } else {
                    table.head_moment_to(p, rho)
                }
            }
        }
    }

    /// `∫_{ℝⁿ} K`, infinite for kernels with a non-integrable singularity.
    pub fn mass(&self) -> f64 {
        let p = self.n as f64 - 1.0;
        match &self.variant {
            KernelVariant::PowerLaw { .. } => f64::INFINITY,
            KernelVariant::Truncated { rho0, .. } => {
                crate::consts::sphere_area(self.n) * (self.head_moment(p, *rho0) + self.tail_moment(p, *rho0))
            }
            KernelVariant::Tabulated { table, .. } => table.mass(),
        }
    }

    /// Stable textual identity used to key cached lattice weights.
    pub fn cache_key(&self) -> String {
        match &self.variant {
            KernelVariant::PowerLaw { s } => format!("pow:{}:{:016x}", self.n, s.to_bits()),
            KernelVariant::Truncated { s, rho0 } => {
                format!("trunc:{}:{:016x}:{:016x}", self.n, s.to_bits(), rho0.to_bits())
            }
            KernelVariant::Tabulated { s, table } => {
                use std::hash::{Hash, Hasher};
                let mut h = std::collections::hash_map::DefaultHasher::new();
                for (r, v) in table.radii().iter().zip(table.values()) {
                    r.to_bits().hash(&mut h);
                    v.to_bits().hash(&mut h);
                }
                table.k0().to_bits().hash(&mut h);
                format!("tab:{}:{:016x}:{:016x}", self.n, s.to_bits(), h.finish())
            }
        }
    }
}

/// Coupling of the cell-motility model: `α = β k0 ε^s / (σ s (1−s))`.
pub fn cell_motility_alpha(sigma: f64, beta: f64, eps: f64, s: f64, k0: f64) -> Result<f64> {
    check_s(s)?;
    for (name, v) in [("surface tension", sigma), ("repulsion weight", beta), ("length", eps), ("k0", k0)] {
        if !(v > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(beta * k0 * eps.powf(s) / (sigma * s * (1.0 - s)))
}
