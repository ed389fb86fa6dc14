use proptest::prelude::*;
use radialmp_core::potentials::{
    check_hypothesis_a, fit_asymptotics, ratio_bound, End, PotentialSpec, RatioRegion,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_power_fit_is_exact(c in 0.05f64..20.0, e in -4.0f64..3.0) {
        let spec = PotentialSpec::pure_power(c, e);
        for end in [End::Zero, End::Infinity] {
            let fit = fit_asymptotics(&spec, end).unwrap();
            prop_assert!((fit.exponent - e).abs() < 1e-9);
            prop_assert!((fit.liminf - c).abs() < 1e-9 * c);
            prop_assert!((fit.limsup - c).abs() < 1e-9 * c);
        }
    }

    #[test]
    fn min_max_fits_pick_dominant_branch(
        c1 in 0.1f64..10.0, c2 in 0.1f64..10.0,
        e1 in -3.0f64..2.0, gap in 0.25f64..2.0,
    ) {
        let e2 = e1 + gap;
        // keep the crossover well inside the ladder's head
        prop_assume!((c2 / c1).ln().abs() / gap <= 1e3f64.ln());
        let min = PotentialSpec::min_power(c1, e1, c2, e2);
        let max = PotentialSpec::max_power(c1, e1, c2, e2);
        // near 0 the larger exponent is smaller; near infinity the smaller one is
        let m0 = fit_asymptotics(&min, End::Zero).unwrap();
        let mi = fit_asymptotics(&min, End::Infinity).unwrap();
        let x0 = fit_asymptotics(&max, End::Zero).unwrap();
        let xi = fit_asymptotics(&max, End::Infinity).unwrap();
        prop_assert!((m0.exponent - e2).abs() < 1e-9);
        prop_assert!((mi.exponent - e1).abs() < 1e-9);
        prop_assert!((x0.exponent - e1).abs() < 1e-9);
        prop_assert!((xi.exponent - e2).abs() < 1e-9);
    }

    #[test]
    fn crossover_continuity(c1 in 0.1f64..10.0, c2 in 0.1f64..10.0, e1 in -3.0f64..2.0, gap in 0.25f64..2.0) {
        let e2 = e1 + gap;
        let spec = PotentialSpec::min_power(c1, e1, c2, e2);
        let rc = spec.crossover().unwrap();
        let below = spec.eval(rc * (1.0 - 1e-9)).unwrap();
        let above = spec.eval(rc * (1.0 + 1e-9)).unwrap();
        prop_assert!((below - above).abs() < 1e-6 * below);
    }

    #[test]
    fn ratio_bound_monotone_in_region(r1 in 0.01f64..10.0, factor in 1.5f64..50.0, alpha in 0.0f64..1.0) {
        let k = PotentialSpec::max_power(1.0, 0.5, 1.0, 1.5);
        let v = PotentialSpec::constant(1.0);
        let r2 = r1 * factor;
        let small = ratio_bound(&k, &v, alpha, 0.0, RatioRegion::Ball(r1)).unwrap().lambda;
        let large = ratio_bound(&k, &v, alpha, 0.0, RatioRegion::Ball(r2)).unwrap().lambda;
        prop_assert!(large >= small);
        let far = ratio_bound(&k, &v, 2.0, 0.0, RatioRegion::Complement(r2)).unwrap().lambda;
        let near = ratio_bound(&k, &v, 2.0, 0.0, RatioRegion::Complement(r1)).unwrap().lambda;
        prop_assert!(near >= far);
    }
}

#[test]
fn example_coefficients_pass_hypothesis_a() {
    let cases = [
        (3, PotentialSpec::min_power(1.0, 2.0, 1.0, 1.5), 2.0, 1.5),
        (6, PotentialSpec::max_power(1.0, -2.0, 1.0, -3.0), -3.0, -2.0),
        (7, PotentialSpec::max_power(1.0, -2.0, 1.0, -3.0), -3.0, -2.0),
    ];
    for (n, spec, a0, ainf) in cases {
        let rep = check_hypothesis_a(&spec, n);
        assert!(rep.passed, "{:?}", rep.messages);
        assert!((rep.a0_est.unwrap() - a0).abs() < 1e-9);
        assert!((rep.ainf_est.unwrap() - ainf).abs() < 1e-9);
    }
}
