use conical_core::causality::{
    cauchy_crossing, curve_causal_profile, generalized_crossing, helix_corpus, unit_speed_reparam,
    CurveFamily, Euclidean,
};
use conical_core::curve::SampledCurve;
use conical_core::io::{read_curve_csv, read_family, write_curve_csv, write_family};
use conical_core::regularization::{Mollifier, RegularizedField};
use conical_core::topology::{
    causal_lipschitz_bound, equicontinuity_modulus, gamma_map, image_subset_check, lipschitz_bound,
    proportional_reparam, uniform_distance, within_tube, Box4, ParamCurve01,
};
use conical_core::ConicalParams;

fn spiral(w: f64, window: f64) -> SampledCurve {
    // (t, r, φ, z) = (s, 1, ωs, 0)
    SampledCurve::from_fn(
        -window,
        window,
        801,
        |s| [s, (w * s).cos(), (w * s).sin(), 0.0],
        |s| [1.0, -w * (w * s).sin(), w * (w * s).cos(), 0.0],
    )
    .unwrap()
}

#[test]
fn spiral_csv_round_trip_then_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spiral.csv");
    write_curve_csv(&path, &spiral(1.5, 10.0)).unwrap();
    let c = read_curve_csv(&path).unwrap();
    let a = ConicalParams::new(0.5).unwrap();
    let prof = curve_causal_profile(&c, &a).unwrap();
    // g = −1 + α²ω² at every node
    for v in prof.values.iter().flatten() {
        assert!((v - (-1.0 + 0.25 * 2.25)).abs() < 1e-12);
    }
    let rep = cauchy_crossing(&c, 5.0, &a, 0.5).unwrap();
    assert!(rep.is_unique_crossing() && (rep.roots[0] - 5.0).abs() < 1e-12);
    assert!(rep.inequality_holds);
    let unit = unit_speed_reparam(&c, &Euclidean).unwrap();
    for v in unit.tangents() {
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-8);
    }
}

#[test]
fn family_manifest_drives_the_crossing_report() {
    let dir = tempfile::tempdir().unwrap();
    let h = helix_corpus(1, 0.95, 3)[0];
    let c = h.sample(1.0, 201).unwrap();
    let fam = CurveFamily::new(vec![(0.5, c.clone()), (0.25, c)], Some(5.0)).unwrap();
    let manifest = write_family(dir.path(), &fam).unwrap();
    let back = read_family(&manifest).unwrap();
    let field = RegularizedField::new(ConicalParams::new(0.5).unwrap(), Mollifier::gaussian());
    let rep = generalized_crossing(&back, &field, 1.0).unwrap();
    assert!(rep.all_bounds_hold() && rep.points_c_bounded);
    assert_eq!(rep.members[0].s_eps, rep.members[1].s_eps);
}

#[test]
fn uniform_distance_sees_parametrization() {
    let h = helix_corpus(1, 0.8, 4)[0];
    let a = ParamCurve01::rescaled(&h.sample(1.0, 401).unwrap()).unwrap();
    let b = ParamCurve01::rescaled(
        &SampledCurve::from_fn(
            -1.0,
            1.0,
            401,
            |s| h.position(0.5 * (s + s * s * s)),
            |s| {
                h.velocity(0.5 * (s + s * s * s))
                    .map(|c| c * 0.5 * (1.0 + 3.0 * s * s))
            },
        )
        .unwrap(),
    )
    .unwrap();
    assert!(uniform_distance(&a, &b) > 1e-3);
    let ca = gamma_map(&proportional_reparam(a.curve(), &Euclidean).unwrap()).unwrap();
    let cb = gamma_map(&proportional_reparam(b.curve(), &Euclidean).unwrap()).unwrap();
    assert!(uniform_distance(ca.canonical(), cb.canonical()) < 1e-6);
}

#[test]
fn lipschitz_constants_are_uniform_on_a_corpus() {
    let bx = Box4::new([-3.0; 4], [3.0; 4]).unwrap();
    let bound = causal_lipschitz_bound(0.5, &bx);
    for h in helix_corpus(25, 0.9, 5) {
        let c = proportional_reparam(&h.sample(1.0, 401).unwrap(), &Euclidean).unwrap();
        let l = lipschitz_bound(&c, &bx).unwrap();
        assert!(l <= bound);
        assert!(equicontinuity_modulus(&c, 40) <= l * (1.0 + 1e-9));
    }
}

#[test]
fn distinct_causal_classes_and_tubes() {
    let p = [0.0, 0.5, 0.5, 0.0];
    let q = [1.0, 0.5, 0.5, 0.0];
    let straight = SampledCurve::polyline(vec![0.0, 1.0], vec![p, q]).unwrap();
    let bent =
        SampledCurve::polyline(vec![0.0, 0.5, 1.0], vec![p, [0.5, 0.7, 0.5, 0.0], q]).unwrap();
    let a = gamma_map(&ParamCurve01::new(straight).unwrap()).unwrap();
    let b = gamma_map(&ParamCurve01::new(bent).unwrap()).unwrap();
    let ab = image_subset_check(&a, &b, 1e-8).unwrap();
    let ba = image_subset_check(&b, &a, 1e-8).unwrap();
    assert!(!(ab && ba));
    let shifted = SampledCurve::polyline(
        vec![0.0, 1.0],
        vec![[0.0, 0.5, 0.505, 0.0], [1.0, 0.5, 0.505, 0.0]],
    )
    .unwrap();
    let s = gamma_map(&ParamCurve01::new(shifted).unwrap()).unwrap();
    assert!(within_tube(&s, &a, 0.01));
}
