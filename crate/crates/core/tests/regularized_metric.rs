use conical_core::metric::{eval_f, lower_bound_margin, metric_cartesian, split_metric};
use conical_core::regularization::{
    beta_from_l1, Admissibility, Mollifier, RegularizedField, SampleSpec, Variant,
};
use conical_core::{ConicalParams, SpacetimePoint};
use proptest::prelude::*;

fn params(a: f64) -> ConicalParams {
    ConicalParams::new(a).unwrap()
}

fn catalog() -> Vec<Mollifier> {
    vec![
        Mollifier::gaussian(),
        Mollifier::bump(),
        Mollifier::moment_corrected(1).unwrap(),
        Mollifier::moment_corrected(2).unwrap(),
        Mollifier::strict_net(),
    ]
}

#[test]
fn beta_arithmetic() {
    match beta_from_l1(&params(0.5), 1.2) {
        Admissibility::Admissible { beta, .. } => assert!((beta - 0.175).abs() < 1e-15),
        other => panic!("{other:?}"),
    }
    assert_eq!(beta_from_l1(&params(0.3), 1.0).beta(), Some(0.09));
    let field = RegularizedField::new(params(0.3), Mollifier::gaussian());
    assert_eq!(field.beta(0.01).beta(), Some(0.09));
}

#[test]
fn moment_corrected_margin_uses_the_computed_beta() {
    let field = RegularizedField::new(params(0.5), Mollifier::moment_corrected(1).unwrap());
    assert_eq!(field.mollifier().variant(), Variant::B);
    for eps in [1.0, 0.1] {
        let beta = field.beta(eps).beta().unwrap();
        assert!(beta < 0.25);
        let spec = SampleSpec {
            samples: 20_000,
            ..SampleSpec::default()
        };
        let rep = field.verify_lower_bound(eps, &spec, 11).unwrap();
        assert_eq!(rep.beta, beta);
        assert!(rep.min_margin >= -1e-10, "{rep:?}");
    }
}

#[test]
fn sup_norm_and_mu_are_bounded_by_the_l1_norm() {
    for m in catalog() {
        let field = RegularizedField::new(params(0.5), m.clone());
        let l1 = m.l1_norm(0.5);
        assert!(
            field.sup_norm(0.5).unwrap() <= l1 * (1.0 + 1e-9),
            "{:?}",
            m.config()
        );
        for k in 0..200 {
            let r = 1e-3 * 1.05f64.powi(k);
            let th = 0.37 * k as f64;
            assert!(field.mu_eps(0.5, r * th.cos(), r * th.sin()).unwrap() >= -l1 * (1.0 + 1e-9));
        }
    }
}

#[test]
fn far_field_recovers_the_exact_metric() {
    // at r = 100ε the Gaussian net differs from f by its second moment / r²
    let field = RegularizedField::new(params(0.5), Mollifier::gaussian());
    let eps = 0.01;
    for k in 0..12 {
        let th = 0.5 * k as f64;
        let (x, y) = (th.cos(), th.sin());
        let (f1, f2) = eval_f(x, y).unwrap();
        let (g1, g2) = field.regularize(eps, x, y).unwrap();
        let (d1, d2) = field.regularize_direct(eps, x, y).unwrap();
        assert!((g1 - d1).abs() < 1e-9 && (g2 - d2).abs() < 1e-9);
        assert!((g1 - f1).abs() < 1e-3 && (g2 - f2).abs() < 1e-3);
        let p = SpacetimePoint::new(0.0, x, y, 0.0);
        let diff = field
            .metric(eps, &p)
            .unwrap()
            .max_abs_diff(&metric_cartesian(&p, &params(0.5)).unwrap());
        assert!(diff < 1e-3);
        // 1 + μ_ε decays like (ε/r)²
        let d1 = 1.0 + field.mu_eps(eps, 5.0 * x, 5.0 * y).unwrap();
        let d2 = 1.0 + field.mu_eps(eps, 10.0 * x, 10.0 * y).unwrap();
        assert!(d1 < 1e-4 && (d1 / d2 - 4.0).abs() < 0.05, "{d1} {d2}");
    }
}

proptest! {
    #[test]
    fn exact_spectrum(alpha in 0.01f64..=1.0, r in 1e-4f64..1e2, th in -3.1f64..3.1) {
        let g = metric_cartesian(&SpacetimePoint::new(0.0, r * th.cos(), r * th.sin(), 0.0), &params(alpha)).unwrap();
        let mut ev = g.eigenvalues();
        ev.sort_by(f64::total_cmp);
        let mut want = [-1.0, alpha * alpha, 1.0, 1.0];
        want.sort_by(f64::total_cmp);
        for i in 0..4 {
            prop_assert!((ev[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn splitting_reassembles(alpha in 0.01f64..=1.0, x in -5.0f64..5.0, y in 0.01f64..5.0) {
        let p = SpacetimePoint::new(0.0, x, y, 0.0);
        let s = split_metric(&p, &params(alpha)).unwrap();
        prop_assert!(s.reassemble().max_abs_diff(&metric_cartesian(&p, &params(alpha)).unwrap()) < 1e-14);
    }

    #[test]
    fn exact_lower_bound(alpha in 0.01f64..=1.0, x in -5.0f64..5.0, y in 0.01f64..5.0,
                         v in prop::array::uniform3(-1.0f64..1.0)) {
        prop_assert!(lower_bound_margin(x, y, 0.0, &v, &params(alpha)).unwrap() >= -1e-12);
    }

    #[test]
    fn regularized_lower_bound(alpha in 0.4f64..=1.0, which in 0usize..5, eps in 0.01f64..0.5,
                               r in 1e-3f64..10.0, th in -3.1f64..3.1,
                               v in prop::array::uniform3(-1.0f64..1.0)) {
        let m = catalog().swap_remove(which);
        let field = RegularizedField::new(params(alpha), m);
        if let Some(beta) = field.beta(eps).beta() {
            let margin = field.margin(eps, beta, &[r * th.cos(), r * th.sin(), 0.0], &v).unwrap();
            prop_assert!(margin >= -1e-10);
        }
    }
}
