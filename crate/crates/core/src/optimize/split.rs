//! Equal-mass splitting into far-apart copies of a template set.

use serde::Serialize;

use crate::consts::{ball_volume, sphere_area};
use crate::energy::{ball_pk, nonlocal_perimeter, QuadratureSpec};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::shapes::{perimeter, rasterize_ball, volume, GridSet, GridSpec, Point, ShapeCollection};

/// Template shape whose rescaled copies make up a splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SplitFamily {
    /// Balls in dimension `n`.
    Ball { n: usize },
    /// A planar template given by its perimeter and fractional perimeter at unit volume.
    Custom { perimeter: f64, ps: f64 },
}

impl SplitFamily {
    /// Unit-volume constants of a lattice template.
    pub fn from_template(set: &GridSet, s: f64, quad: &QuadratureSpec) -> Result<Self> {
        let m = volume(set);
        if m == 0.0 {
            return Err(Error::invalid("template is empty"));
        }
        let ps = nonlocal_perimeter(set, &KernelSpec::power_law(2, s)?, quad)?;
        Ok(SplitFamily::Custom {
            perimeter: perimeter(set) / m.sqrt(),
            ps: ps / m.powf(1.0 - 0.5 * s),
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            SplitFamily::Ball { n } => *n,
            SplitFamily::Custom { .. } => 2,
        }
    }

    /// `(P(E₀), P_s(E₀))` at `|E₀| = 1`.
    pub fn unit_constants(&self, s: f64) -> Result<(f64, f64)> {
        match *self {
            SplitFamily::Ball { n } => {
                let r = ball_volume(n).powf(-1.0 / n as f64);
                let ps = ball_pk(n, &KernelSpec::power_law(n, s)?, r)?.pk_ball;
                Ok((sphere_area(n) * r.powi(n as i32 - 1), ps))
            }
            SplitFamily::Custom { perimeter, ps } => {
                if !(perimeter > 0.0 && ps > 0.0) {
                    return Err(Error::invalid("template constants must be positive"));
                }
                Ok((perimeter, ps))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitPlan {
    pub k: usize,
    pub masses: Vec<f64>,
    pub predicted_energy: f64,
    /// Real-valued minimiser of the copy count.
    pub kbar: f64,
    pub family: SplitFamily,
    /// Energy of `k` copies for `k = 1..=k_max`.
    pub energies: Vec<f64>,
}

struct SplitModel {
    n: f64,
    m: f64,
    p0: f64,
    /// `α s(1−s) P_s(E₀) / P(E₀)`.
    rho: f64,
    s: f64,
}

impl SplitModel {
    fn new(m: f64, alpha: f64, s: f64, family: &SplitFamily) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::invalid(format!("mass must be positive, got {m}")));
        }
        if !(alpha >= 0.0) {
            return Err(Error::invalid("coupling must be non-negative"));
        }
        let (p0, ps0) = family.unit_constants(s)?;
        Ok(SplitModel {
            n: family.dimension() as f64,
            m,
            p0,
            rho: alpha * s * (1.0 - s) * ps0 / p0,
            s,
        })
    }

    fn energy(&self, k: usize) -> f64 {
        let x = (k as f64).powf(1.0 / self.n);
        let g = x - x.powf(self.s) * self.m.powf((1.0 - self.s) / self.n) * self.rho;
        self.m.powf((self.n - 1.0) / self.n) * self.p0 * g
    }

    fn kbar(&self) -> f64 {
        (self.s * self.rho).powf(self.n / (1.0 - self.s)) * self.m
    }
}

/// Energy of `k` equal far-apart copies of the family template at total mass `m`.
pub fn split_energy(m: f64, alpha: f64, s: f64, family: &SplitFamily, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("copy count must be at least 1"));
    }
    Ok(SplitModel::new(m, alpha, s, family)?.energy(k))
}

/// Best equal-mass splitting with at most `k_max` copies; ties go to fewer copies.
pub fn optimal_split(m: f64, alpha: f64, s: f64, family: &SplitFamily, k_max: usize) -> Result<SplitPlan> {
    if k_max < 1 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let model = SplitModel::new(m, alpha, s, family)?;
    let energies: Vec<f64> = (1..=k_max).map(|k| model.energy(k)).collect();
    let mut k = 1;
    for (i, &e) in energies.iter().enumerate() {
        let best = energies[k - 1];
        if e < best - 1e-12 * best.abs() {
            k = i + 1;
        }
    }
    Ok(SplitPlan {
        k,
        masses: vec![m / k as f64; k],
        predicted_energy: energies[k - 1],
        kbar: model.kbar(),
        family: *family,
        energies,
    })
}

/// Lattice disks realising a planar ball plan, one at infinity from the next.
pub fn realize_ball_plan(plan: &SplitPlan, spacing: f64) -> Result<ShapeCollection> {
    if plan.family != (SplitFamily::Ball { n: 2 }) {
        return Err(Error::invalid("only planar ball plans can be rasterised"));
    }
    let comps = plan
        .masses
        .iter()
        .map(|&mi| {
            let r = (mi / std::f64::consts::PI).sqrt();
            let cells = (2.0 * r / spacing).ceil() as usize + 8;
            rasterize_ball(Point::new(0.0, 0.0), r, GridSpec::centered(cells, spacing)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeCollection::at_infinity(comps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitRate {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
    /// Large-mass envelope slope with the ball ratio in place of the optimal constant.
    pub envelope: f64,
    /// `(m, optimal energy, k)` per sweep point.
    pub points: Vec<(f64, f64, usize)>,
}

/// `s(1−s) P_s(B) / P(B)^s` for the unit-volume ball.
pub fn ball_interpolation_ratio(n: usize, s: f64) -> Result<f64> {
    let (p0, ps0) = SplitFamily::Ball { n }.unit_constants(s)?;
    Ok(s * (1.0 - s) * ps0 / p0.powf(s))
}

/// `−(1−s) s^{s/(1−s)} (α ρ)^{1/(1−s)}` with the ball ratio `ρ`.
pub fn split_rate_envelope(n: usize, alpha: f64, s: f64) -> Result<f64> {
    let rho = ball_interpolation_ratio(n, s)?;
    Ok(-(1.0 - s) * s.powf(s / (1.0 - s)) * (alpha * rho).powf(1.0 / (1.0 - s)))
}

/// Linear fit of the optimal planar ball-splitting energy against the mass.
pub fn split_energy_rate(m_sweep: &[f64], alpha: f64, s: f64) -> Result<SplitRate> {
    if m_sweep.len() < 4 {
        return Err(Error::invalid(format!("mass sweep needs at least 4 points, got {}", m_sweep.len())));
    }
    let family = SplitFamily::Ball { n: 2 };
    let mut points = Vec::with_capacity(m_sweep.len());
    for &m in m_sweep {
        let kbar = SplitModel::new(m, alpha, s, &family)?.kbar();
        let plan = optimal_split(m, alpha, s, &family, (2.0 * kbar).ceil() as usize + 2)?;
        points.push((m, plan.predicted_energy, plan.k));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("mass sweep has no spread"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SplitRate {
        slope,
        intercept,
        residual,
        envelope: split_rate_envelope(2, alpha, s)?,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::g_alpha;
    use crate::spectral::beta_bar;

    const BALL: SplitFamily = SplitFamily::Ball { n: 2 };

    /// Planar coupling whose ball of mass `m` has unit-ball coupling `beta`.
    fn alpha_for(beta: f64, m: f64, s: f64) -> f64 {
        beta / (m / std::f64::consts::PI).powf(0.5 * (1.0 - s))
    }

    #[test]
    fn small_coupling_keeps_one_piece() {
        let plan = optimal_split(1.0, 0.05, 0.5, &BALL, 10).unwrap();
        assert_eq!(plan.k, 1);
        assert_eq!(plan.masses, vec![1.0]);
    }

    #[test]
    fn two_balls_win_past_the_crossover() {
        let s = 0.4;
        let b = beta_bar(2, s).unwrap();
        let below = optimal_split(2.0, alpha_for(0.98 * b, 2.0, s), s, &BALL, 8).unwrap();
        let above = optimal_split(2.0, alpha_for(1.02 * b, 2.0, s), s, &BALL, 8).unwrap();
        assert_eq!(below.k, 1);
        assert!(above.k >= 2);
        let at = optimal_split(2.0, alpha_for(b, 2.0, s), s, &BALL, 8).unwrap();
        assert!((at.energies[0] - at.energies[1]).abs() < 1e-9 * at.energies[0].abs());
    }

    #[test]
    fn large_mass_follows_kbar() {
        for (m, a, s) in [(50.0, 1.0, 0.5), (400.0, 0.2, 0.3), (80.0, 0.5, 0.7)] {
            let kbar = optimal_split(m, a, s, &BALL, 1).unwrap().kbar;
            assert!(kbar > 5.0 && kbar < 1e5, "{kbar}");
            let plan = optimal_split(m, a, s, &BALL, 3 * kbar as usize + 10).unwrap();
            assert!((plan.k as f64 - plan.kbar.round()).abs() <= 1.0, "{} vs {}", plan.k, plan.kbar);
            assert!((plan.masses.iter().sum::<f64>() - m).abs() < 1e-9 * m);
        }
    }

    #[test]
    fn rate_matches_envelope_and_scales() {
        let s = 0.5;
        let ms: Vec<f64> = (0..6).map(|i| 200.0 + 100.0 * i as f64).collect();
        let r1 = split_energy_rate(&ms, 1.0, s).unwrap();
        assert!(r1.slope < 0.0);
        assert!((r1.slope / r1.envelope - 1.0).abs() < 0.03, "{} {}", r1.slope, r1.envelope);
        let r2 = split_energy_rate(&ms, 2.0, s).unwrap();
        assert!((r2.slope / r1.slope / 2f64.powf(1.0 / (1.0 - s)) - 1.0).abs() < 0.03);
        assert!(split_energy_rate(&ms[..3], 1.0, s).is_err());
    }

    #[test]
    fn prediction_matches_lattice_collection() {
        let s = 0.5;
        let plan = optimal_split(1.0, 0.4, s, &BALL, 6).unwrap();
        let coll = realize_ball_plan(&plan, 1.0 / 160.0).unwrap();
        let k = KernelSpec::power_law(2, s).unwrap();
        let e = g_alpha(&coll, 0.4, &k, &QuadratureSpec::default()).unwrap();
        assert!((e.total / plan.predicted_energy - 1.0).abs() < 0.01, "{} vs {}", e.total, plan.predicted_energy);
    }

    #[test]
    fn rejects_empty_range() {
        assert!(optimal_split(1.0, 1.0, 0.5, &BALL, 0).is_err());
    }
}
