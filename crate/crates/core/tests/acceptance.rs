//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary (`harness = false`) so the lines are
//! always shown.

use std::process::ExitCode;
use std::time::Instant;

use conical_core::causality::{
    escaping_family, generalized_crossing, helix_corpus, oscillating_family, CurveFamily, Euclidean,
};
use conical_core::curve::SampledCurve;
use conical_core::metric::sobolev::{sobolev_probe, FieldComponent, QuadratureSpec};
use conical_core::metric::{lower_bound_margin, metric_cartesian, pullback_residual};
use conical_core::regularization::{
    beta_from_l1, c_phi, dyadic_eps, strict_net_threshold, Admissibility, Mollifier,
    RegularizedField, SampleSpec,
};
use conical_core::topology::{
    arzela_ascoli_extract, limit_causality, oscillation_family, proportional_reparam,
    uniform_distance, Box4, ParamCurve01,
};
use conical_core::wave::{
    epsilon_study, flat_convergence, time_grid, Grid2D, InitialData, SpatialOperator, WaveState,
    DEFAULT_CFL,
};
use conical_core::{ConicalParams, SpacetimePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn alphas() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

fn off_axis_point(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let r = 10f64.powf(rng.random_range(-6.0..2.0));
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    (r * phi.cos(), r * phi.sin(), rng.random_range(-10.0..10.0))
}

fn eigenvalue_spectrum() -> Outcome {
    let start = Instant::now();
    let worst = alphas()
        .par_iter()
        .enumerate()
        .map(|(k, &a)| {
            let params = ConicalParams::new(a).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
            let mut want = [-1.0, a * a, 1.0, 1.0];
            want.sort_by(f64::total_cmp);
            let mut worst: f64 = 0.0;
            for _ in 0..100_000 {
                let (x, y, z) = off_axis_point(&mut rng);
                let t = rng.random_range(-10.0..10.0);
                let g = metric_cartesian(&SpacetimePoint::new(t, x, y, z), &params).unwrap();
                let mut ev = g.eigenvalues();
                ev.sort_by(f64::total_cmp);
                for i in 0..4 {
                    worst = worst.max((ev[i] - want[i]).abs());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-10 && secs < 10.0,
        format!("9 x 1e5 points, max eigenvalue error {worst:.2e}, {secs:.2} s"),
    )
}

fn pullback_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let params = ConicalParams::new(rng.random_range(0.01..=1.0)).unwrap();
        // the residual is absolute and the angular entry grows like r²
        let r = 10f64.powf(rng.random_range(-6.0..1.0));
        let pi = std::f64::consts::PI;
        let res = pullback_residual(
            rng.random_range(-10.0..10.0),
            r,
            rng.random_range(-pi..pi),
            rng.random_range(-10.0..10.0),
            &params,
        )
        .unwrap();
        worst = worst.max(res);
    }
    check(
        worst < 1e-12,
        format!("1e4 samples, max residual {worst:.2e}"),
    )
}

fn spatial_lower_bound() -> Outcome {
    let chunks = 16usize;
    let (min_margin, max_angular) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + c as u64);
            let (mut m, mut ang): (f64, f64) = (f64::INFINITY, 0.0);
            for _ in 0..1_000_000 / chunks {
                let params = ConicalParams::new(rng.random_range(0.01..=1.0)).unwrap();
                let (x, y, z) = off_axis_point(&mut rng);
                let v = [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ];
                m = m.min(lower_bound_margin(x, y, z, &v, &params).unwrap());
                let r = x.hypot(y);
                let w = [-y / r, x / r, 0.0];
                ang = ang.max(lower_bound_margin(x, y, z, &w, &params).unwrap().abs());
            }
            (m, ang)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    check(
        min_margin >= -1e-12 && max_angular <= 1e-15,
        format!("1e6 samples, min margin {min_margin:.2e}, max |margin| on angular directions {max_angular:.2e}"),
    )
}

fn sobolev_probe_check() -> Outcome {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let masses: Vec<_> = (3..=12)
        .map(|k| sobolev_probe(FieldComponent::F1, 2f64.powi(-k), &spec))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ln2 = std::f64::consts::LN_2;
    let slopes: Vec<f64> = masses
        .windows(2)
        .map(|w| (w[1].l2_mass - w[0].l2_mass) / ln2)
        .collect();
    let last4 = &slopes[slopes.len() - 4..];
    let mean = last4.iter().sum::<f64>() / 4.0;
    let spread = last4
        .iter()
        .map(|s| ((s - mean) / mean).abs())
        .fold(0.0, f64::max);
    let incr: Vec<f64> = masses
        .windows(2)
        .map(|w| w[1].l1_mass - w[0].l1_mass)
        .collect();
    let min_ratio = incr
        .windows(2)
        .map(|w| w[0] / w[1])
        .fold(f64::INFINITY, f64::min);
    let secs = start.elapsed().as_secs_f64();
    check(
        mean > 0.0 && spread <= 0.05 && min_ratio >= 1.5 && secs < 30.0,
        format!(
            "L2 slope {mean:.6} (4 pi = {:.6}), spread {spread:.1e}, min L1 increment ratio {min_ratio:.4}, {secs:.2} s",
            4.0 * std::f64::consts::PI
        ),
    )
}

fn regularized_bound() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    // Variant A
    let p05 = ConicalParams::new(0.5).unwrap();
    for moll in [Mollifier::gaussian(), Mollifier::bump()] {
        let field = RegularizedField::new(p05, moll);
        for eps in [1.0, 0.1, 0.01] {
            let rep = field
                .verify_lower_bound(eps, &SampleSpec::default(), 5)
                .map_err(|e| e.to_string())?;
            ok &= rep.beta == 0.25 && rep.min_margin >= -1e-10;
            notes.push(rep.min_margin);
        }
    }
    let worst_a = notes.iter().copied().fold(f64::INFINITY, f64::min);
    // Variant B: admissible exactly when c_phi < alpha^2
    let moll = Mollifier::moment_corrected(1).map_err(|e| e.to_string())?;
    let l1 = moll.l1_norm(1.0);
    let c = c_phi(l1);
    let e2 = (-2.0f64).exp();
    ok &= (c - e2 / (1.0 + e2)).abs() < 1e-12;
    let mut b_ok = true;
    for k in 1..1000 {
        let alpha = k as f64 / 1000.0;
        let params = ConicalParams::new(alpha).unwrap();
        let adm = beta_from_l1(&params, l1);
        b_ok &= adm.is_admissible() == (alpha * alpha > c);
    }
    let two = beta_from_l1(&p05, 2.0);
    b_ok &= matches!(two, Admissibility::Inadmissible { c_phi, .. } if (c_phi - 1.0 / 3.0).abs() < 1e-15);
    ok &= b_ok;
    // Variant C
    let p02 = ConicalParams::new(0.2).unwrap();
    let spec = SampleSpec {
        samples: 20_000,
        ..SampleSpec::default()
    };
    let net =
        strict_net_threshold(&p02, &dyadic_eps(10), &spec, 6, 1e-10).map_err(|e| e.to_string())?;
    let c_ok = matches!(net.eps_star, Some(e) if e <= net.eps_analytic)
        && net
            .rows
            .iter()
            .filter(|r| r.eps > net.eps_analytic)
            .all(|r| r.beta.is_none());
    ok &= c_ok;
    check(
        ok,
        format!(
            "A: min margin {worst_a:.2e} with beta 0.25; B: c_phi {c:.6}, admissibility exact {b_ok}; C: eps* {:?} (analytic {:.5})",
            net.eps_star, net.eps_analytic
        ),
    )
}

fn wave_solver() -> Outcome {
    // (a) flat convergence against the standing-mode oracle
    let start = Instant::now();
    let rows =
        flat_convergence(&[64, 128, 256, 512], 1.0, (1, 2), 1.0).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let orders: Vec<f64> = rows.iter().filter_map(|r| r.order).collect();
    let a_ok = orders.iter().all(|&o| o >= 1.9) && secs < 120.0;

    // (b) leapfrog energy drift on a compact bump before boundary contact
    let field = RegularizedField::new(ConicalParams::new(0.5).unwrap(), Mollifier::gaussian());
    let grid = Grid2D::new(256, 2.0).unwrap();
    let op = SpatialOperator::assemble(&field, 0.1, &grid).map_err(|e| e.to_string())?;
    let data = InitialData::Bump {
        center: [0.5, 0.3],
        radius: 0.3,
        amplitude: 1.0,
    };
    let (steps, dt) = time_grid(0.5, op.max_dt(DEFAULT_CFL));
    let mut st = WaveState::from_data(&grid, &data).map_err(|e| e.to_string())?;
    st.run(&op, dt, steps, None, 1).map_err(|e| e.to_string())?;
    let e0 = st.trace()[0].leapfrog_energy;
    let drift = st
        .trace()
        .iter()
        .map(|s| ((s.leapfrog_energy - e0) / e0).abs())
        .fold(0.0, f64::max);
    let boundary = st.max_outside(&grid, [0.0, 0.0], 2.0 - 2.0 * grid.h());
    let b_ok = drift < 1e-4 && boundary < 1e-10;

    // (c) eps study on off-axis data
    let eps: Vec<f64> = dyadic_eps(5);
    let g = Grid2D::new(256, 3.0).unwrap();
    let data = InitialData::Bump {
        center: [1.5, 0.1],
        radius: 0.4,
        amplitude: 1.0,
    };
    let study = epsilon_study(&field, &eps, &g, &data, 0.5).map_err(|e| e.to_string())?;
    let c_ok = study.strictly_decreasing;
    check(
        a_ok && b_ok && c_ok,
        format!(
            "(a) orders {:?} in {secs:.1} s; (b) drift {drift:.2e}, boundary {boundary:.1e}; (c) distances {:?}",
            orders
                .iter()
                .map(|o| format!("{o:.3}"))
                .collect::<Vec<_>>(),
            study
                .distances
                .iter()
                .map(|d| format!("{d:.3e}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn slice_crossings() -> Outcome {
    let field = RegularizedField::new(ConicalParams::new(0.5).unwrap(), Mollifier::gaussian());
    let eps: Vec<f64> = (1..=400).map(|k| 1.0 / k as f64).collect();
    let fam = oscillating_family(&eps, 1.0, 21).map_err(|e| e.to_string())?;
    let rep = generalized_crossing(&fam, &field, 1.0).map_err(|e| e.to_string())?;
    let exact_zero = rep.members.iter().all(|m| m.s_eps == 0.0);
    let inside = rep.members.iter().all(|m| {
        m.p_eps[0].abs() <= 1e-9
            && m.p_eps[1].abs() <= 1.0 + 1e-9
            && m.p_eps[2].abs() <= 1e-9
            && m.p_eps[3].abs() <= 1e-9
    });
    let spread = rep.point_min[1] < -0.99 && rep.point_max[1] > 0.99;
    let oscillating_ok = exact_zero && inside && spread && rep.points_c_bounded;

    let esc = escaping_family(&dyadic_eps(10), 1.0, 21).map_err(|e| e.to_string())?;
    let rep2 = generalized_crossing(&esc, &field, 1.0).map_err(|e| e.to_string())?;
    let escaping_flagged = !rep2.points_c_bounded && !rep2.images_c_bounded;

    // time-speed floor on admissible corpora, every variant
    let family_eps = [0.5, 0.25, 0.125];
    let mut nodes_checked = 0usize;
    let mut bounds_ok = true;
    let mut worst: f64 = f64::INFINITY;
    for moll in [
        Mollifier::gaussian(),
        Mollifier::bump(),
        Mollifier::moment_corrected(1).unwrap(),
        Mollifier::strict_net(),
    ] {
        let f = RegularizedField::new(ConicalParams::new(0.5).unwrap(), moll);
        for h in helix_corpus(20, 0.95, 7) {
            let c = h.sample(1.0, 401).map_err(|e| e.to_string())?;
            let members = family_eps.iter().map(|&e| (e, c.clone())).collect();
            let fam = CurveFamily::new(members, Some(4.0)).map_err(|e| e.to_string())?;
            let r = generalized_crossing(&fam, &f, 1.0).map_err(|e| e.to_string())?;
            bounds_ok &= r.all_bounds_hold();
            for m in &r.members {
                worst = worst.min(m.time_speed_slack);
                nodes_checked += c.len();
            }
        }
    }
    check(
        oscillating_ok && escaping_flagged && bounds_ok,
        format!(
            "oscillating: s_eps = 0 on {} members, points in [-1,1]x0: {inside}; escaping flagged: {escaping_flagged}; time-speed min slack {worst:.3e} over {nodes_checked} nodes",
            rep.members.len()
        ),
    )
}

fn warped(h: &conical_core::causality::Helix, nodes: usize) -> SampledCurve {
    // increasing bijection of [−1, 1]
    let w = |s: f64| s + 0.2 * (1.0 - s * s) * s;
    let dw = |s: f64| 1.0 + 0.2 * (1.0 - 3.0 * s * s);
    SampledCurve::from_fn(
        -1.0,
        1.0,
        nodes,
        |s| h.position(w(s)),
        |s| h.velocity(w(s)).map(|c| c * dw(s)),
    )
    .unwrap()
}

fn curve_topology() -> Outcome {
    // 50-curve corpus: 40 helices and 10 polylines
    let mut idem: f64 = 0.0;
    let mut canon: f64 = 0.0;
    for h in helix_corpus(40, 0.6, 8) {
        let c = h.sample(1.0, 4001).unwrap();
        let r = proportional_reparam(&c, &Euclidean).map_err(|e| e.to_string())?;
        let rr = proportional_reparam(r.curve(), &Euclidean).map_err(|e| e.to_string())?;
        let rw = proportional_reparam(&warped(&h, 4001), &Euclidean).map_err(|e| e.to_string())?;
        idem = idem.max(uniform_distance(&r, &rr));
        canon = canon.max(uniform_distance(&r, &rw));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let n = 12;
        let params: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let mut p = [0.0; 4];
        let pts: Vec<[f64; 4]> = (0..n)
            .map(|_| {
                p[0] += rng.random_range(0.1..1.0);
                for x in &mut p[1..] {
                    *x += rng.random_range(-0.5..0.5);
                }
                p
            })
            .collect();
        let c = SampledCurve::polyline(params.clone(), pts.clone()).unwrap();
        let sq: Vec<f64> = params.iter().map(|s| s * s).collect();
        let c2 = SampledCurve::polyline(sq, pts).unwrap();
        let r = proportional_reparam(&c, &Euclidean).map_err(|e| e.to_string())?;
        let rr = proportional_reparam(r.curve(), &Euclidean).map_err(|e| e.to_string())?;
        let r2 = proportional_reparam(&c2, &Euclidean).map_err(|e| e.to_string())?;
        idem = idem.max(uniform_distance(&r, &rr));
        canon = canon.max(uniform_distance(&r, &r2));
    }
    let reparam_ok = idem <= 1e-8 && canon <= 1e-8;

    // Arzelà–Ascoli on γ_n = p + s(q − p) + (1/n) sin(nπs) ν
    let p = [0.0, 0.5, 0.3, 0.0];
    let q = [1.0, 0.6, 0.3, 0.0];
    let bx = Box4::new([-0.1, 0.0, 0.0, -0.1], [1.1, 1.0, 1.0, 0.1]).unwrap();
    let fam =
        oscillation_family(p, q, [0.0, 0.0, 0.25, 0.0], 1000, 2049).map_err(|e| e.to_string())?;
    let ex = arzela_ascoli_extract(&fam, &bx, 10.0, 8, 8).map_err(|e| e.to_string())?;
    let seg =
        ParamCurve01::new(SampledCurve::polyline(vec![0.0, 1.0], vec![p, q]).unwrap()).unwrap();
    let dist = uniform_distance(&ex.limit, &seg);
    let params = ConicalParams::new(0.5).unwrap();
    let lim = limit_causality(&ex.limit, &params).map_err(|e| e.to_string())?;
    let members_causal = fam.iter().all(|c| {
        limit_causality(c, &params)
            .map(|p| p.is_timelike())
            .unwrap_or(false)
    });
    let limit_ok = lim.is_causal_within(1e-12) && members_causal;
    check(
        reparam_ok && dist < 1e-3 && limit_ok,
        format!(
            "idempotence {idem:.1e}, canonicality {canon:.1e}; extracted {} of 1000, limit distance {dist:.2e}; limit causal {limit_ok}",
            ex.indices.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 eigenvalue spectrum", eigenvalue_spectrum),
        ("2 pullback identity", pullback_identity),
        ("3 spatial lower bound", spatial_lower_bound),
        ("4 sobolev probe", sobolev_probe_check),
        ("5 regularized bound", regularized_bound),
        ("6 wave solver", wave_solver),
        ("7 slice crossings", slice_crossings),
        ("8 curve topology", curve_topology),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS  {name:<24} {d}  [{secs:.1} s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name:<24} {d}  [{secs:.1} s]");
            }
        }
    }
    println!(
        "acceptance: {}/8 passed in {:.1} s",
        8 - failed,
        total.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
