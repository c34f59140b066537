use conical_core::io::{read_snapshot, write_energy_csv, write_snapshot};
use conical_core::regularization::{dyadic_eps, Mollifier, RegularizedField};
use conical_core::wave::{
    epsilon_study, mode_solution, time_grid, Grid2D, InitialData, SpatialOperator, WaveState,
    DEFAULT_CFL,
};
use conical_core::ConicalParams;
use proptest::prelude::*;

fn flat(grid: &Grid2D) -> SpatialOperator {
    let field = RegularizedField::new(ConicalParams::minkowski(), Mollifier::gaussian());
    SpatialOperator::assemble(&field, 0.1, grid).unwrap()
}

#[test]
fn flat_mode_energy_drift() {
    let grid = Grid2D::new(64, 1.0).unwrap();
    let op = flat(&grid);
    let mut st = WaveState::from_data(&grid, &InitialData::Mode { mx: 2, my: 1 }).unwrap();
    let dt = op.max_dt(DEFAULT_CFL);
    st.run(&op, dt, 100, None, 1).unwrap();
    let e0 = st.trace()[0].leapfrog_energy;
    for s in st.trace() {
        assert!(((s.leapfrog_energy - e0) / e0).abs() < 1e-6);
    }
    let exact = mode_solution(&grid, 2, 1, st.t());
    assert!(grid.l2_distance(st.u(), &exact) < 1e-2);
}

#[test]
fn hat_and_indicator_data_stay_finite_and_conservative() {
    let field = RegularizedField::new(ConicalParams::new(0.5).unwrap(), Mollifier::bump());
    let grid = Grid2D::new(128, 2.0).unwrap();
    let op = SpatialOperator::assemble(&field, 0.1, &grid).unwrap();
    for data in [
        InitialData::Hat {
            center: [0.0, 0.0],
            radius: 0.5,
        },
        InitialData::Indicator {
            center: [0.3, 0.0],
            radius: 0.4,
        },
    ] {
        let (steps, dt) = time_grid(0.4, op.max_dt(DEFAULT_CFL));
        let mut st = WaveState::from_data(&grid, &data).unwrap();
        st.run(&op, dt, steps, None, 5).unwrap();
        let e0 = st.trace()[0].leapfrog_energy;
        assert!(st
            .trace()
            .iter()
            .all(|s| s.energy >= 0.0 && ((s.leapfrog_energy - e0) / e0).abs() < 1e-10));
    }
}

#[test]
fn axis_centered_study_runs() {
    // recorded rather than asserted: data on the axis
    let field = RegularizedField::new(ConicalParams::new(0.5).unwrap(), Mollifier::gaussian());
    let grid = Grid2D::new(128, 2.0).unwrap();
    let data = InitialData::Bump {
        center: [0.0, 0.0],
        radius: 0.5,
        amplitude: 1.0,
    };
    let s = epsilon_study(&field, &dyadic_eps(4), &grid, &data, 0.3).unwrap();
    assert_eq!(s.distances.len(), 4);
    assert!(s.distances.iter().all(|d| d.is_finite() && *d > 0.0));
    println!("axis-centered distances {:?}", s.distances);
}

#[test]
fn run_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid2D::new(32, 1.0).unwrap();
    let op = flat(&grid);
    let mut st = WaveState::from_data(&grid, &InitialData::Mode { mx: 1, my: 1 }).unwrap();
    st.run(&op, op.max_dt(DEFAULT_CFL), 10, None, 2).unwrap();
    let stem = dir.path().join("u_final");
    write_snapshot(&stem, &grid, st.t(), st.u()).unwrap();
    let (h, u) = read_snapshot(&stem).unwrap();
    assert_eq!(h.t, st.t());
    assert_eq!(u, st.u());
    let csv_path = dir.path().join("energy.csv");
    write_energy_csv(&csv_path, st.trace()).unwrap();
    let text = std::fs::read_to_string(csv_path).unwrap();
    assert_eq!(text.lines().count(), 1 + st.trace().len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discrete_energy_is_nonnegative(alpha in 0.2f64..=1.0, eps in 0.05f64..1.0,
                                      seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let field = RegularizedField::new(ConicalParams::new(alpha).unwrap(), Mollifier::gaussian());
        let grid = Grid2D::new(12, 1.0).unwrap();
        let op = SpatialOperator::assemble(&field, eps, &grid).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let form = op.bilinear(&u);
        prop_assert!(form >= alpha * alpha * op.gradient_norm_sq(&u) * (1.0 - 1e-12));
        let st = WaveState::new(&grid, u.clone(), u).unwrap();
        prop_assert!(st.energy(&op) >= 0.0);
    }
}
