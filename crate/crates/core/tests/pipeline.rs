use fotune::pipeline::{
    collect_closed_loop_data, compare_report, data_driven_objective, evaluate_controller,
    simulated_objective, tune_fr, tune_sim, ParamBounds, Plant, PlantModel, TuningConfig,
};
use fotune::{ContinuousTf, Error, FoPidParams};

fn toy() -> PlantModel {
    PlantModel::continuous("toy", ContinuousTf::new(vec![1.0], vec![1.0, 1.0]).unwrap())
}

fn toy_cfg(seed: u64) -> TuningConfig {
    let mut cfg = TuningConfig {
        sample_time: 0.05,
        horizon_seconds: 5.0,
        ..TuningConfig::default()
    };
    cfg.pso.population = 30;
    cfg.pso.max_evaluations = 1500;
    cfg.pso.seed = seed;
    cfg.pso.parallel = false;
    cfg
}

#[test]
fn fr_tuning_improves_and_predicts_the_realized_index() {
    let cfg = toy_cfg(0);
    let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
    let out = tune_fr(&data, &cfg).unwrap();
    assert!(out.objective_value <= out.objective_at_phi0);
    let ev = evaluate_controller(&toy(), &out.phi_star, &cfg).unwrap();
    assert!((ev.metrics.itae - out.objective_value).abs() <= 1e-6 * ev.metrics.itae);
    // Reproducible from (data, phi*).
    assert_eq!(
        data_driven_objective(&data, &out.phi_star, &cfg),
        out.objective_value
    );
}

#[test]
fn fr_and_simulation_tuning_agree_on_the_toy_plant() {
    for seed in 0..5 {
        let cfg = toy_cfg(seed);
        let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
        let fr = tune_fr(&data, &cfg).unwrap();
        let sim = tune_sim(&toy(), &cfg).unwrap();
        let gap = (fr.objective_value - sim.objective_value).abs() / sim.objective_value;
        assert!(
            gap <= 0.05,
            "seed {seed}: FR {} vs SIM {}",
            fr.objective_value,
            sim.objective_value
        );
        let p = toy()
            .impulse_response(cfg.sample_time, cfg.horizon_steps().unwrap())
            .unwrap();
        assert_eq!(
            simulated_objective(&p, &sim.phi_star, &cfg),
            sim.objective_value
        );
    }
}

#[test]
fn degenerate_box_returns_that_point() {
    let mut cfg = toy_cfg(0);
    let phi = FoPidParams::new(2.0, 1.0, 0.5, 0.8, 0.6);
    let a = phi.to_array();
    cfg.bounds = ParamBounds([
        (a[0], a[0]),
        (a[1], a[1]),
        (a[2], a[2]),
        (a[3], a[3]),
        (a[4], a[4]),
    ]);
    let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
    let out = tune_fr(&data, &cfg).unwrap();
    assert_eq!(out.phi_star, phi);
    assert_eq!(out.trace.evaluations(), 1);
    let ev = evaluate_controller(&toy(), &phi, &cfg).unwrap();
    let report = compare_report(&[out], &toy(), &cfg).unwrap();
    assert_eq!(report.rows[0].metrics, ev.metrics);
}

#[test]
fn fixed_order_is_respected() {
    let mut cfg = toy_cfg(3);
    cfg.fixed[3] = Some(0.5);
    let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
    let out = tune_fr(&data, &cfg).unwrap();
    assert_eq!(out.phi_star.lambda, 0.5);
}

#[test]
fn zero_gain_collection_controller_is_rejected() {
    let mut cfg = toy_cfg(0);
    cfg.phi0 = FoPidParams::new(0.0, 0.0, 0.0, 0.0, 0.0);
    let err = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap_err();
    assert!(matches!(err, Error::DataInvalid(_)), "{err}");
}

#[test]
fn mismatched_sample_time_is_rejected() {
    let cfg = toy_cfg(0);
    let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
    let other = TuningConfig {
        sample_time: 0.1,
        horizon_seconds: 10.0,
        ..cfg
    };
    assert!(matches!(tune_fr(&data, &other), Err(Error::Config(_))));
}

#[test]
fn prefiltered_tuning_still_runs() {
    let mut cfg = toy_cfg(1);
    cfg.prefilter_window = Some(5);
    let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
    let out = tune_fr(&data, &cfg).unwrap();
    assert!(out.objective_value <= out.objective_at_phi0);
}

#[test]
fn report_rows_do_not_depend_on_order() {
    let cfg = toy_cfg(0);
    let data = collect_closed_loop_data(&toy(), &cfg.phi0, &cfg).unwrap();
    let fr = tune_fr(&data, &cfg).unwrap();
    let mut mb = tune_sim(
        &PlantModel::continuous(
            "lag2",
            ContinuousTf::new(vec![1.0], vec![2.0, 1.0]).unwrap(),
        ),
        &cfg,
    )
    .unwrap();
    mb.strategy = "MB".into();
    let ab = compare_report(&[fr.clone(), mb.clone()], &toy(), &cfg).unwrap();
    let ba = compare_report(&[mb, fr], &toy(), &cfg).unwrap();
    assert_eq!(ab.rows[0], ba.rows[1]);
    assert_eq!(ab.rows[1], ba.rows[0]);
    let fr_row = &ab.rows[0];
    assert!(fr_row.relative_gap() <= 1e-6);
    assert!(ab.rows[1].relative_gap() > 1e-6);
    assert!(ab.to_table().lines().count() == 4);
}
