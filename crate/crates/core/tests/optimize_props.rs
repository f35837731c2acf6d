use proptest::prelude::*;

use nliso::energy::{g_alpha, QuadratureSpec};
use nliso::kernels::KernelSpec;
use nliso::optimize::{anneal, gn_search, optimal_split, realize_ball_plan, AnnealConfig, SplitFamily};
use nliso::shapes::{GridSet, GridSpec};

fn blob() -> impl Strategy<Value = GridSet> {
    prop::collection::vec((-0.2f64..0.2, -0.2f64..0.2, 0.1f64..0.25), 1..4).prop_map(|disks| {
        let spec = GridSpec::centered(32, 1.0 / 24.0).unwrap();
        GridSet::from_fn(spec, |p| disks.iter().any(|&(x, y, r)| (p.x - x).hypot(p.y - y) < r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn anneal_keeps_mass_and_best_energy_falls(set in blob(), alpha in 0.0f64..4.0, seed in any::<u64>()) {
        prop_assume!(set.count() >= 4);
        let cfg = AnnealConfig { steps: 6_000, record_every: 500, seed, ..AnnealConfig::default() };
        let out = anneal(&set, alpha, &KernelSpec::power_law(2, 0.5).unwrap(), &cfg).unwrap();
        prop_assert_eq!(out.best.count(), set.count());
        prop_assert!(out.trace.windows(2).all(|w| w[1].best_energy <= w[0].best_energy));
        prop_assert!(out.best_energy <= out.trace[0].energy + 1e-12);
    }

    #[test]
    fn split_prediction_matches_lattice(m in 0.2f64..1.5, alpha in 0.2f64..2.0) {
        let s = 0.5;
        let plan = optimal_split(m, alpha, s, &SplitFamily::Ball { n: 2 }, 8).unwrap();
        let coll = realize_ball_plan(&plan, 1.0 / 160.0).unwrap();
        let e = g_alpha(&coll, alpha, &KernelSpec::power_law(2, s).unwrap(), &QuadratureSpec::default()).unwrap();
        // both terms carry lattice error even when their difference cancels
        let scale: f64 = e.components.iter().map(|c| c.perimeter + alpha * s * (1.0 - s) * c.pk).sum();
        prop_assert!((e.total - plan.predicted_energy).abs() <= 0.01 * scale, "{} vs {}", e.total, plan.predicted_energy);
    }
}

#[test]
fn search_incumbent_never_drops_or_beats_the_bound() {
    let cfg = AnnealConfig { steps: 8_000, record_every: 500, seed: 3, ..AnnealConfig::default() };
    for s in [0.3, 0.7] {
        let r = gn_search(s, 3, &cfg).unwrap();
        let bound = nliso::energy::gn_constant(s);
        assert!(r.epochs.windows(2).all(|w| w[1].best >= w[0].best));
        assert!(r.epochs.iter().all(|e| e.best <= bound * (1.0 + nliso::energy::GN_SLACK)));
        assert_eq!(r.perimeter_trace.len(), 3);
    }
}
