//! Browser bindings for the interactive demo page in `www/`.
//!
//! Each exported function returns a flat `Float64Array` so the page can plot
//! it without any serialization layer. The plain-Rust functions underneath
//! are what the native tests exercise.

use fotune::frac::oustaloup_ct;
use fotune::pipeline::{collect_closed_loop_data, evaluate_controller, tune_fr, ControllerMetrics};
use fotune::{FoPidParams, OustaloupConfig, PlantModel, TuningConfig};
use wasm_bindgen::prelude::*;

fn plant(name: &str) -> Result<PlantModel, String> {
    match name {
        "full" => Ok(PlantModel::full()),
        "reduced" => Ok(PlantModel::reduced()),
        other => Err(format!(
            "unknown plant {other:?} (expected full or reduced)"
        )),
    }
}

fn config(sample_time: f64, horizon_seconds: f64) -> Result<TuningConfig, String> {
    let mut cfg = TuningConfig {
        sample_time,
        horizon_seconds,
        ..TuningConfig::default()
    };
    // The browser runs on one thread.
    cfg.pso.parallel = false;
    cfg.horizon_steps().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn params(phi: &[f64]) -> Result<FoPidParams, String> {
    let p = FoPidParams::from_slice(phi).map_err(|e| e.to_string())?;
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn metrics_header(m: &ControllerMetrics) -> [f64; 6] {
    [
        m.itae,
        m.iae,
        m.overshoot_pct,
        m.settling_time.unwrap_or(f64::NAN),
        m.steady_state_error,
        if m.stable { 1.0 } else { 0.0 },
    ]
}

/// `[omega, magnitude_db, phase_deg]` triples over the approximation band.
pub fn bode_points(
    gamma: f64,
    order: usize,
    omega_low: f64,
    omega_high: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let cfg = OustaloupConfig {
        order,
        omega_low,
        omega_high,
    };
    let filter = oustaloup_ct(gamma, &cfg).map_err(|e| e.to_string())?;
    let points = points.max(2);
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let w = omega_low * (omega_high / omega_low).powf(i as f64 / (points - 1) as f64);
        let h = filter.freq_response(w);
        out.extend([w, 20.0 * h.norm().log10(), h.arg().to_degrees()]);
    }
    Ok(out)
}

/// Six metrics (ITAE, IAE, overshoot %, settling time or NaN, steady-state
/// error, stable flag) followed by the closed-loop step response.
pub fn step_points(
    plant_name: &str,
    phi: &[f64],
    sample_time: f64,
    horizon_seconds: f64,
) -> Result<Vec<f64>, String> {
    let cfg = config(sample_time, horizon_seconds)?;
    let ev =
        evaluate_controller(&plant(plant_name)?, &params(phi)?, &cfg).map_err(|e| e.to_string())?;
    let mut out = metrics_header(&ev.metrics).to_vec();
    out.extend_from_slice(ev.step.values());
    Ok(out)
}

/// Records one closed-loop experiment under `[1 0 1 0 1]`, tunes from it, and
/// returns `phi*` (5 values), `J(phi*)`, `J(phi0)`, the evaluation count,
/// then the recorded output `y` and the predicted step response under `phi*`
/// (each `N + 1` samples).
pub fn tune_points(
    plant_name: &str,
    evaluations: usize,
    seed: u64,
    sample_time: f64,
    horizon_seconds: f64,
) -> Result<Vec<f64>, String> {
    let mut cfg = config(sample_time, horizon_seconds)?;
    cfg.pso.population = cfg.pso.population.min(evaluations.max(2));
    cfg.pso.max_evaluations = evaluations.max(cfg.pso.population);
    cfg.pso.seed = seed;
    let data = collect_closed_loop_data(&plant(plant_name)?, &cfg.phi0, &cfg)
        .map_err(|e| e.to_string())?;
    let out = tune_fr(&data, &cfg).map_err(|e| e.to_string())?;
    let mut v = out.phi_star.to_array().to_vec();
    v.extend([
        out.objective_value,
        out.objective_at_phi0,
        out.trace.evaluations() as f64,
    ]);
    v.extend_from_slice(data.y().values());
    let step = fotune::lti::step_response_from_t(&out.t_est, cfg.setpoint);
    v.extend_from_slice(step.values());
    Ok(v)
}

#[wasm_bindgen]
pub fn bode(
    gamma: f64,
    order: usize,
    omega_low: f64,
    omega_high: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    bode_points(gamma, order, omega_low, omega_high, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn step(
    plant: &str,
    phi: &[f64],
    sample_time: f64,
    horizon_seconds: f64,
) -> Result<Vec<f64>, JsValue> {
    step_points(plant, phi, sample_time, horizon_seconds).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn tune(
    plant: &str,
    evaluations: usize,
    seed: u64,
    sample_time: f64,
    horizon_seconds: f64,
) -> Result<Vec<f64>, JsValue> {
    tune_points(plant, evaluations, seed, sample_time, horizon_seconds)
        .map_err(|e| JsValue::from_str(&e))
}
