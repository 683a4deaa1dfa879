
use isac_core::channel::ChannelSpec;
use isac_core::d2d::{example3_closed_form, nonadaptive_point};
use isac_core::mac::{kobayashi_point, Objective};
use isac_core::presets;
use isac_core::search::{
    concavity_of_points, example2_family, example3_family, sweep, EvalContext, SweepOptions, Theorem, DIST_TOL,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn mac_sweep_rows_survive_reevaluation(seed in any::<u64>(), p_s in 0.6..0.95f64, t in 0.0..0.2f64) {
        let spec = presets::example2_channel(p_s, t, t, t).unwrap();
        let ctx = EvalContext::new(ChannelSpec::Mac(spec.clone()), Theorem::Kobayashi, Objective::SumRate);
        let grid: Vec<f64> = (0..8).map(|i| 0.02 + 0.03 * i as f64).collect();
        let opts = SweepOptions { d2_grid: grid, d1_max: Some(0.5), budget: 300, seed };
        let curve = sweep(&example2_family(), &ctx, &opts).unwrap();
        let mut last = f64::NEG_INFINITY;
        for row in &curve.rows {
            prop_assert!(row.objective >= last, "objective decreased at {}", row.d2_bound);
            last = row.objective;
            if row.objective == f64::NEG_INFINITY {
                continue;
            }
            let aux = presets::example2_scheme(&row.params, false).unwrap();
            let point = kobayashi_point(&spec, &aux).unwrap();
            prop_assert!(point.region.verdict(row.r1, row.r2).unwrap().member);
            prop_assert!((row.r1 + row.r2 - row.objective).abs() < 1e-12);
            prop_assert!(point.d2 <= row.d2_bound + DIST_TOL && point.d1 <= 0.5 + DIST_TOL);
            prop_assert!((point.d2 - row.d2).abs() < 1e-12);
        }
    }

    #[test]
    fn d2d_sweep_rows_survive_reevaluation(seed in any::<u64>(), p1 in 0.02..0.45f64, p2 in 0.02..0.45f64) {
        let spec = presets::example3_channel(p1, p2).unwrap();
        let ctx = EvalContext::new(ChannelSpec::TwoWay(spec.clone()), Theorem::Nonadaptive, Objective::SumRate);
        let grid: Vec<f64> = (0..6).map(|i| 0.1 * i as f64).collect();
        let opts = SweepOptions { d2_grid: grid, d1_max: None, budget: 120, seed };
        let curve = sweep(&example3_family(p1, p2), &ctx, &opts).unwrap();
        let mut last = f64::NEG_INFINITY;
        for row in &curve.rows {
            prop_assert!(row.objective >= last);
            last = row.objective;
            if row.objective == f64::NEG_INFINITY {
                continue;
            }
            let (px1, px2, v1, v2) = presets::example3_scheme(p1, p2, row.params[0], row.params[1]).unwrap();
            let pt = nonadaptive_point(&px1, &px2, &spec, &v1, &v2).unwrap();
            prop_assert!(pt.d2 <= row.d2_bound + DIST_TOL);
            prop_assert!((pt.r1 + pt.r2 - row.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn sweeps_are_reproducible(seed in any::<u64>()) {
        let spec = presets::example3_channel(0.1, 0.2).unwrap();
        let ctx = EvalContext::new(ChannelSpec::TwoWay(spec), Theorem::Nonadaptive, Objective::SumRate);
        let opts = SweepOptions { d2_grid: vec![0.05, 0.1, 0.3], d1_max: None, budget: 60, seed };
        let family = example3_family(0.1, 0.2);
        prop_assert_eq!(sweep(&family, &ctx, &opts).unwrap().to_csv(), sweep(&family, &ctx, &opts).unwrap().to_csv());
    }
}

#[test]
fn closed_form_curve_is_concave() {
    for p in [0.05, 0.1, 0.25, 0.5] {
        let points: Vec<(f64, f64)> = (0..=50)
            .map(|i| {
                let d = 0.01 * i as f64;
                let b = example3_closed_form(p, p, 0.5, d).unwrap();
                (d, b.r1 + b.r2)
            })
            .collect();
        let report = concavity_of_points(&points).unwrap();
        assert!(report.is_concave(), "p={p}: {:?}", report.violations);
    }
}
