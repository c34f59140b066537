use std::path::Path;

use conical_core::causality::{
    escaping_family, generalized_crossing, helix_corpus, oscillating_family, CurveFamily, Euclidean,
};
use conical_core::curve::SampledCurve;
use conical_core::io::{
    read_curve_csv, read_family, write_energy_csv, write_family, write_json, write_snapshot,
};
use conical_core::metric::sweep::{lower_bound_sweep, pullback_error, spectrum_error, SweepSpec};
use conical_core::metric::{sobolev_probe, FieldComponent, QuadratureSpec};
use conical_core::regularization::{
    beta_from_l1, c_phi, dyadic_eps, strict_net_threshold, Admissibility, RegularizedField,
    SampleSpec, Variant,
};
use conical_core::topology::{
    arzela_ascoli_extract, gamma_map, limit_causality, oscillation_family, proportional_reparam,
    uniform_distance, warp_parameters, Box4, ParamCurve01,
};
use conical_core::wave::{
    epsilon_study, flat_convergence, time_grid, Grid2D, SpatialOperator, WaveState, DEFAULT_CFL,
};
use serde::Serialize;

use crate::manifest::{self, CurvesTask, FamilyKind, WaveTask};
use crate::report::Report;

pub type RunResult = conical_core::Result<()>;

pub fn verify_metric(m: &manifest::VerifyMetric, out: &Path, r: &mut Report) -> RunResult {
    let params = m.validate().expect("validated by caller");
    let spec = |n| SweepSpec::new(n);
    let eig = spectrum_error(&params, &spec(m.eigen_samples), r.seed)?;
    r.check(
        "eigenvalue_spectrum",
        eig <= m.eigen_tol,
        eig,
        format!("<= {:e}", m.eigen_tol),
    );
    let pb = pullback_error(&params, &spec(m.pullback_samples), r.seed.wrapping_add(1))?;
    r.check(
        "pullback_identity",
        pb < m.pullback_tol,
        pb,
        format!("< {:e}", m.pullback_tol),
    );
    let lb = lower_bound_sweep(&params, &spec(m.bound_samples), r.seed.wrapping_add(2))?;
    r.check(
        "lower_bound_min_margin",
        lb.min_margin >= -m.bound_tol,
        lb.min_margin,
        format!(">= -{:e}", m.bound_tol),
    );
    r.check(
        "lower_bound_angular_zero",
        lb.max_angular <= 1e-15,
        lb.max_angular,
        "<= 1e-15",
    );
    let radial = 1.0 - params.alpha_sq();
    r.check(
        "lower_bound_radial",
        (lb.min_radial - radial).abs() <= 1e-12,
        lb.min_radial,
        format!("= 1 - alpha^2 = {radial} within 1e-12"),
    );
    r.result("lower_bound", lb);

    #[derive(Serialize)]
    struct Row {
        r_inner: f64,
        l1_mass: f64,
        l2_mass: f64,
    }
    let qs = QuadratureSpec::default();
    let rows: Vec<Row> = (m.sobolev_k_min..=m.sobolev_k_max)
        .map(|k| {
            let s = sobolev_probe(FieldComponent::F1, 2f64.powi(-(k as i32)), &qs)?;
            Ok(Row {
                r_inner: s.r_inner,
                l1_mass: s.l1_mass,
                l2_mass: s.l2_mass,
            })
        })
        .collect::<conical_core::Result<_>>()?;
    let ln2 = std::f64::consts::LN_2;
    let slopes: Vec<f64> = rows
        .windows(2)
        .map(|w| (w[1].l2_mass - w[0].l2_mass) / ln2)
        .collect();
    let last = &slopes[slopes.len() - 4..];
    let mean = last.iter().sum::<f64>() / 4.0;
    let spread = last
        .iter()
        .map(|s| ((s - mean) / mean).abs())
        .fold(0.0, f64::max);
    r.check("sobolev_l2_slope_positive", mean > 0.0, mean, "> 0");
    r.check(
        "sobolev_l2_slope_stable",
        spread <= m.sobolev_stability,
        spread,
        format!("<= {}", m.sobolev_stability),
    );
    let incr: Vec<f64> = rows
        .windows(2)
        .map(|w| w[1].l1_mass - w[0].l1_mass)
        .collect();
    let decay = incr
        .windows(2)
        .map(|w| w[0] / w[1])
        .fold(f64::INFINITY, f64::min);
    r.check(
        "sobolev_l1_increment_decay",
        decay >= m.l1_decay,
        decay,
        format!(">= {}", m.l1_decay),
    );
    let path = out.join("sobolev.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["r_inner", "l1_mass", "l2_mass"])
        .map_err(conical_core::Error::from)?;
    for row in &rows {
        w.write_record([row.r_inner, row.l1_mass, row.l2_mass].map(|v| v.to_string()))
            .map_err(conical_core::Error::from)?;
    }
    w.flush()?;
    r.artifact(out, &path);
    r.result("sobolev_slopes", slopes);
    Ok(())
}

fn csv_writer(path: &Path) -> conical_core::Result<csv::Writer<std::fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

pub fn regularize(m: &manifest::Regularize, out: &Path, r: &mut Report) -> RunResult {
    let (params, moll) = m.validate().expect("validated by caller");
    r.result("variant", format!("{:?}", moll.variant()));
    if let Some(l1) = m.l1_norm {
        let adm = beta_from_l1(&params, l1);
        let c = c_phi(l1);
        r.check(
            "admissibility_decided",
            adm.is_admissible() == (params.alpha_sq() > c),
            c,
            "admissible iff c_phi < alpha^2",
        );
        r.result("admissibility", adm);
        let path = out.join("admissibility.json");
        write_json(&path, &adm)?;
        r.artifact(out, &path);
        return Ok(());
    }
    let field = RegularizedField::new(params, moll.clone());
    #[derive(Serialize)]
    struct Row {
        eps: f64,
        admissibility: Admissibility,
        min_margin: Option<f64>,
    }
    let spec = SampleSpec {
        samples: m.samples,
        ..SampleSpec::default()
    };
    let mut rows = Vec::new();
    for (k, &eps) in m.eps.iter().enumerate() {
        let path = out.join(format!("profile_{k:02}.csv"));
        moll.write_profile_csv(eps, m.profile_points, &path)?;
        r.artifact(out, &path);
        let adm = field.beta(eps);
        let min_margin = if adm.is_admissible() {
            let rep = field.verify_lower_bound(eps, &spec, r.seed)?;
            r.check(
                format!("lower_bound_eps_{eps}"),
                rep.min_margin >= -m.tol,
                rep.min_margin,
                format!(">= -{:e} with beta = {}", m.tol, rep.beta),
            );
            Some(rep.min_margin)
        } else {
            None
        };
        rows.push(Row {
            eps,
            admissibility: adm,
            min_margin,
        });
    }
    if moll.variant() == Variant::C {
        let net = strict_net_threshold(
            &params,
            &dyadic_eps(m.threshold_k_max),
            &spec,
            r.seed,
            m.tol,
        )?;
        r.check(
            "strict_net_threshold_found",
            net.eps_star.is_some(),
            net.eps_star.unwrap_or(f64::NAN),
            "some eps* on the dyadic grid",
        );
        let path = out.join("threshold.json");
        write_json(&path, &net)?;
        r.artifact(out, &path);
    }
    let path = out.join("admissibility.json");
    write_json(&path, &rows)?;
    r.artifact(out, &path);
    r.result("rows", rows);
    Ok(())
}

pub fn wave(m: &manifest::Wave, out: &Path, r: &mut Report) -> RunResult {
    let (params, moll) = m.validate().expect("validated by caller");
    match m.task {
        WaveTask::Convergence => {
            let rows = flat_convergence(&m.sizes, m.half_width, (m.mode[0], m.mode[1]), m.t_final)?;
            let min = rows
                .iter()
                .filter_map(|row| row.order)
                .fold(f64::INFINITY, f64::min);
            r.check(
                "convergence_order",
                min >= m.min_order,
                min,
                format!(">= {}", m.min_order),
            );
            let path = out.join("convergence.json");
            write_json(&path, &rows)?;
            r.artifact(out, &path);
            r.result("convergence", rows);
        }
        WaveTask::Drift => {
            let field = RegularizedField::new(params, moll);
            let grid = Grid2D::new(m.n, m.half_width)?;
            let eps = m.eps[0];
            let op = SpatialOperator::assemble(&field, eps, &grid)?;
            let data = m.initial_data();
            let (steps, dt) = time_grid(m.t_final, op.max_dt(DEFAULT_CFL));
            let mut st = WaveState::from_data(&grid, &data)?;
            let stem = out.join("u_initial");
            write_snapshot(&stem, &grid, 0.0, st.u())?;
            r.artifact(out, &stem.with_extension("bin"));
            st.run(&op, dt, steps, None, m.record_every.max(1))?;
            let stem = out.join("u_final");
            write_snapshot(&stem, &grid, st.t(), st.u())?;
            r.artifact(out, &stem.with_extension("bin"));
            let e0 = st.trace()[0].leapfrog_energy;
            let drift = st
                .trace()
                .iter()
                .map(|s| ((s.leapfrog_energy - e0) / e0).abs())
                .fold(0.0, f64::max);
            r.check(
                "energy_drift",
                drift < m.drift_tol,
                drift,
                format!("< {:e}", m.drift_tol),
            );
            let min_e = st
                .trace()
                .iter()
                .map(|s| s.energy)
                .fold(f64::INFINITY, f64::min);
            r.check("energy_nonnegative", min_e >= 0.0, min_e, ">= 0");
            let edge = st.max_outside(&grid, [0.0, 0.0], m.half_width - 2.0 * grid.h());
            r.check(
                "no_boundary_contact",
                edge < 1e-10,
                edge,
                "< 1e-10 near the boundary",
            );
            let path = out.join("energy.csv");
            write_energy_csv(&path, st.trace())?;
            r.artifact(out, &path);
            r.result("dt", dt);
            r.result("steps", steps);
            r.result("c_max", op.c_max());
        }
        WaveTask::EpsStudy => {
            let field = RegularizedField::new(params, moll);
            let grid = Grid2D::new(m.n, m.half_width)?;
            let study = epsilon_study(&field, &m.eps, &grid, &m.initial_data(), m.t_final)?;
            if m.assert_decreasing {
                let worst = study
                    .distances
                    .windows(2)
                    .map(|w| w[1] / w[0])
                    .fold(0.0, f64::max);
                r.check(
                    "distances_strictly_decreasing",
                    study.strictly_decreasing,
                    worst,
                    "consecutive ratio < 1",
                );
            }
            let path = out.join("eps_study.json");
            write_json(&path, &study)?;
            r.artifact(out, &path);
            r.result("eps_study", study);
        }
    }
    Ok(())
}

fn warp(s: f64, a: f64, b: f64) -> (f64, f64) {
    // increasing bijection of [a, b]
    let u = (s - a) / (b - a);
    let w = u + 0.3 * u * (1.0 - u);
    (a + (b - a) * w, 1.0 + 0.3 * (1.0 - 2.0 * u))
}

pub fn curves(m: &manifest::Curves, out: &Path, r: &mut Report) -> RunResult {
    let mut m = m.clone();
    let manifest_path = r.manifest.clone();
    let (params, moll) = m.validate(&manifest_path).expect("validated by caller");
    let field = RegularizedField::new(params, moll);
    match m.task {
        CurvesTask::Crossing => {
            let families: Vec<CurveFamily> = match m.family {
                FamilyKind::Oscillating => vec![oscillating_family(&m.eps, m.window, m.nodes)?],
                FamilyKind::Escaping => vec![escaping_family(&m.eps, m.window, m.nodes)?],
                FamilyKind::File => vec![read_family(m.family_file.as_ref().expect("validated"))?],
                FamilyKind::Helix => helix_corpus(m.corpus_size, m.min_time_speed, r.seed)
                    .iter()
                    .map(|h| {
                        let c = h.sample(m.window, m.nodes | 1)?;
                        let members = m.eps.iter().map(|&e| (e, c.clone())).collect();
                        CurveFamily::new(members, m.compact_radius.or(Some(10.0)))
                    })
                    .collect::<conical_core::Result<_>>()?,
            };
            let mut reports = Vec::new();
            let (mut bounds_ok, mut c_bounded) = (true, true);
            let mut min_ss = f64::INFINITY;
            for fam in &families {
                let fam = match m.compact_radius {
                    Some(rad) if m.family != FamilyKind::Helix => {
                        CurveFamily::new(fam.members().to_vec(), Some(rad))?
                    }
                    _ => fam.clone(),
                };
                let rep = generalized_crossing(&fam, &field, m.q_exponent)?;
                bounds_ok &= rep.all_bounds_hold();
                c_bounded &= rep.points_c_bounded && rep.images_c_bounded;
                min_ss = rep
                    .members
                    .iter()
                    .map(|x| x.time_speed_slack)
                    .fold(min_ss, f64::min);
                reports.push(rep);
            }
            r.check(
                "member_bounds",
                bounds_ok,
                min_ss,
                "cone bound, time-speed floor and |s_eps| bound at every node",
            );
            if let Some(expect) = m.expect_c_bounded {
                r.check(
                    "c_bounded_flag",
                    c_bounded == expect,
                    c_bounded as u8 as f64,
                    format!("c-bounded = {expect}"),
                );
            }
            if families.len() == 1 {
                let path = write_family(out.join("family"), &families[0])?;
                r.artifact(out, &path);
            }
            r.result("c_bounded", c_bounded);
            let path = out.join("crossing.json");
            write_json(&path, &reports)?;
            r.artifact(out, &path);
        }
        CurvesTask::Canonicality => {
            let mut corpus: Vec<SampledCurve> = m
                .curve_files
                .iter()
                .map(read_curve_csv)
                .collect::<conical_core::Result<_>>()?;
            if corpus.is_empty() {
                corpus = helix_corpus(m.corpus_size, m.min_time_speed, r.seed)
                    .iter()
                    .map(|h| h.sample(m.window, m.curve_nodes))
                    .collect::<conical_core::Result<_>>()?;
            }
            let (mut idem, mut canon): (f64, f64) = (0.0, 0.0);
            let mut classes = Vec::new();
            for c in &corpus {
                let (a, b) = c.domain();
                let rep = proportional_reparam(c, &Euclidean)?;
                let again = proportional_reparam(rep.curve(), &Euclidean)?;
                let warped = warp_parameters(c, |s| warp(s, a, b).0, |s| warp(s, a, b).1)?;
                let other = proportional_reparam(&warped, &Euclidean)?;
                idem = idem.max(uniform_distance(&rep, &again));
                canon = canon.max(uniform_distance(&rep, &other));
                classes.push(gamma_map(&rep)?.report());
            }
            r.check(
                "reparam_idempotent",
                idem <= m.tol,
                idem,
                format!("<= {:e}", m.tol),
            );
            r.check(
                "reparam_canonical",
                canon <= m.tol,
                canon,
                format!("<= {:e}", m.tol),
            );
            let path = out.join("classes.json");
            write_json(&path, &classes)?;
            r.artifact(out, &path);
            r.result("corpus_size", corpus.len());
        }
        CurvesTask::Extraction => {
            let fam = oscillation_family(m.start, m.end, m.normal, m.count, m.curve_nodes)?;
            let lo: [f64; 4] = std::array::from_fn(|i| m.start[i].min(m.end[i]) - 1.0);
            let hi: [f64; 4] = std::array::from_fn(|i| m.start[i].max(m.end[i]) + 1.0);
            let bx = Box4::new(lo, hi)?;
            let ex = arzela_ascoli_extract(&fam, &bx, 1e3, m.depth, m.min_keep)?;
            let seg = ParamCurve01::new(SampledCurve::polyline(
                vec![0.0, 1.0],
                vec![m.start, m.end],
            )?)?;
            let d = uniform_distance(&ex.limit, &seg);
            r.check(
                "limit_is_segment",
                d < m.limit_tol,
                d,
                format!("< {:e}", m.limit_tol),
            );
            let members_causal = fam.iter().all(|c| {
                limit_causality(c, &params)
                    .map(|p| p.is_causal_within(1e-12))
                    .unwrap_or(false)
            });
            let lim = limit_causality(&ex.limit, &params)?;
            r.check(
                "limit_causal",
                !members_causal || lim.is_causal_within(1e-12),
                lim.max_value(),
                "<= 1e-12 when every member is causal",
            );
            r.result("members_causal", members_causal);
            r.result("extracted", ex.indices.len());
            r.result("tail_spread", ex.tail_spread);
            let path = out.join("extraction.json");
            write_json(&path, &gamma_map(&ex.limit)?.report())?;
            r.artifact(out, &path);
        }
    }
    Ok(())
}
