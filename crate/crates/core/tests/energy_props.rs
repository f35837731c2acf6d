use proptest::prelude::*;

use nliso::energy::{g_alpha, gn_check, j_alpha, nonlocal_perimeter, QuadratureSpec};
use nliso::kernels::{verify_kernel_bounds, KernelSpec};
use nliso::shapes::{GridSet, GridSpec, ShapeCollection};

const H: f64 = 1.0 / 32.0;

type Disks = Vec<(f64, f64, f64)>;

fn disks() -> impl Strategy<Value = Disks> {
    prop::collection::vec((-0.2f64..0.2, -0.2f64..0.2, 0.16f64..0.3), 1..4)
}

/// The union of `disks` dilated by `scale`, on a grid of `cells` per side.
fn raster(disks: &Disks, scale: f64, cells: usize, h: f64) -> GridSet {
    let spec = GridSpec::centered(cells, h).unwrap();
    GridSet::from_fn(spec, |p| {
        disks.iter().any(|&(x, y, r)| (p.x - scale * x).hypot(p.y - scale * y) < scale * r)
    })
}

/// Unions of disks at least five cells in radius.
fn blob(cells: usize) -> impl Strategy<Value = GridSet> {
    disks().prop_map(move |d| raster(&d, 1.0, cells, H))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncation_lowers_the_nonlocal_perimeter(set in blob(40), rho0 in 0.02f64..0.3) {
        let s = 0.5;
        let truncated = KernelSpec::truncated(2, s, rho0).unwrap();
        prop_assume!(verify_kernel_bounds(&truncated).upper_ok);
        let q = QuadratureSpec::default();
        let pk = nonlocal_perimeter(&set, &truncated, &q).unwrap();
        let ps = nonlocal_perimeter(&set, &KernelSpec::power_law(2, s).unwrap(), &q).unwrap();
        prop_assert!(pk <= ps * 1.02, "{pk} > {ps}");
    }

    #[test]
    fn energy_collapses_under_dilation(d in disks(), alpha in 0.1f64..3.0, s in 0.2f64..0.8) {
        let k = KernelSpec::power_law(2, s).unwrap();
        let q = QuadratureSpec::default();
        let small = j_alpha(&raster(&d, 1.0, 80, H / 2.0), alpha, &k, None, &q).unwrap();
        let big = j_alpha(&raster(&d, 2.0, 144, H / 2.0), alpha * 2f64.powf(-(1.0 - s)), &k, None, &q).unwrap();
        let scale = small.perimeter.max(small.jalpha.abs());
        prop_assert!((big.jalpha - 2.0 * small.jalpha).abs() <= 0.02 * 2.0 * scale, "J {} {} P {} {} pk {} {}", big.jalpha, small.jalpha, big.perimeter, small.perimeter, big.pk, small.pk);
    }

    #[test]
    fn interpolation_bound_holds(set in blob(40), s in 0.1f64..0.9) {
        prop_assert!(gn_check(&set, s, &QuadratureSpec::default()).unwrap().bound_ok);
    }

    #[test]
    fn collections_at_infinity_add_in_any_order(a in blob(32), b in blob(32), c in blob(32), alpha in 0.0f64..2.0) {
        let k = KernelSpec::power_law(2, 0.4).unwrap();
        let q = QuadratureSpec::default();
        let parts = [a, b, c];
        let sum: f64 = parts.iter().map(|p| j_alpha(p, alpha, &k, None, &q).unwrap().jalpha).sum();
        let fwd = g_alpha(&ShapeCollection::at_infinity(parts.to_vec()), alpha, &k, &q).unwrap();
        let rev: Vec<GridSet> = parts.iter().rev().cloned().collect();
        let back = g_alpha(&ShapeCollection::at_infinity(rev), alpha, &k, &q).unwrap();
        prop_assert!((fwd.total - sum).abs() <= 1e-9 * sum.abs().max(1.0));
        prop_assert!((fwd.total - back.total).abs() <= 1e-9 * sum.abs().max(1.0));
    }
}
