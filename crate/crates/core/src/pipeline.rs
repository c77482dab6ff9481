//! End-to-end tuning strategies and controller evaluation.
//!
//! * `tune_fr`: minimizes the data-driven index over one recorded data set.
//!   It never touches a plant model.
//! * `tune_sim`: minimizes the model-side index by simulating the closed loop
//!   for every candidate. Run against the true plant this stands in for
//!   repeated experiments; run against a reduced model it is model-based tuning.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fictref::{DataRecord, FictitiousData, DEFAULT_SINGULARITY_EPS};
use crate::frac::{fopid_discrete, FoPidParams, OustaloupConfig};
use crate::lti::{
    cascade_impulse_response, closed_loop_impulse, conv_trunc, deconvolve, factor_sections,
    step_response_from_t, tustin, ContinuousTf, DiscreteTf, Sequence,
};
use crate::objective::{
    iae_from_t, itae_data_driven, itae_from_t, prefilter_moving_average, WeightKind, WeightScheme,
};
use crate::optimize::{pso_minimize, Bounds, OptimizationTrace, PsoConfig};

/// Anything that can produce a truncated impulse response at a sample time.
///
/// Strategies that must stay model-free simply do not take a `Plant`.
pub trait Plant {
    fn label(&self) -> &str;
    fn impulse_response(&self, sample_time: f64, n: usize) -> Result<Sequence>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlantRepr {
    /// Series connection of low-order continuous-time sections.
    Continuous(Vec<ContinuousTf>),
    Discrete(DiscreteTf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantModel {
    pub label: String,
    pub repr: PlantRepr,
}

impl PlantModel {
    /// Continuous-time plant; `tf` is factored into first- and second-order
    /// sections so that its discretization stays well conditioned.
    pub fn continuous(label: impl Into<String>, tf: ContinuousTf) -> Self {
        Self::from_sections(label, factor_sections(&tf))
    }

    /// Continuous-time plant given directly as a series of sections.
    pub fn from_sections(label: impl Into<String>, sections: Vec<ContinuousTf>) -> Self {
        Self {
            label: label.into(),
            repr: PlantRepr::Continuous(sections),
        }
    }

    pub fn discrete(label: impl Into<String>, tf: DiscreteTf) -> Self {
        Self {
            label: label.into(),
            repr: PlantRepr::Discrete(tf),
        }
    }

    /// Lightly damped fifth-order process
    /// `9 / ((s^2 + 0.4 s + 9) (s + 1)^3)`, unit DC gain.
    pub fn full() -> Self {
        let lag = ContinuousTf::new(vec![1.0], vec![1.0, 1.0]).unwrap();
        Self::from_sections(
            "full",
            vec![
                ContinuousTf::new(vec![9.0], vec![1.0, 0.4, 9.0]).unwrap(),
                lag.clone(),
                lag.clone(),
                lag,
            ],
        )
    }

    /// Third-order reduction of [`PlantModel::full`]: the lag triple is
    /// replaced by a single lag with the same mean delay,
    /// `9 / ((s^2 + 0.4 s + 9) (3 s + 1))`.
    pub fn reduced() -> Self {
        Self::from_sections(
            "reduced",
            vec![
                ContinuousTf::new(vec![9.0], vec![1.0, 0.4, 9.0]).unwrap(),
                ContinuousTf::new(vec![1.0], vec![3.0, 1.0]).unwrap(),
            ],
        )
    }

    /// Overall continuous-time transfer function, if the plant has one.
    pub fn transfer_function(&self) -> Option<ContinuousTf> {
        match &self.repr {
            PlantRepr::Continuous(sections) => Some(
                sections
                    .iter()
                    .fold(ContinuousTf::constant(1.0), |acc, s| acc.series(s)),
            ),
            PlantRepr::Discrete(_) => None,
        }
    }

    /// Discrete sections whose series connection is the plant at `sample_time`.
    pub fn discretize(&self, sample_time: f64) -> Result<Vec<DiscreteTf>> {
        match &self.repr {
            PlantRepr::Continuous(sections) => {
                sections.iter().map(|g| tustin(g, sample_time)).collect()
            }
            PlantRepr::Discrete(d) => {
                if (d.sample_time() - sample_time).abs() > 1e-9 * sample_time {
                    return Err(Error::SampleTimeMismatch {
                        left: d.sample_time(),
                        right: sample_time,
                    });
                }
                Ok(vec![d.clone()])
            }
        }
    }
}

impl Plant for PlantModel {
    fn label(&self) -> &str {
        &self.label
    }

    fn impulse_response(&self, sample_time: f64, n: usize) -> Result<Sequence> {
        let sections = self.discretize(sample_time)?;
        let p = cascade_impulse_response(&sections, n, sample_time);
        if let Some(k) = p.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Itae,
    Iae,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "itae" => Ok(Self::Itae),
            "iae" => Ok(Self::Iae),
            other => Err(Error::Config(format!("unknown criterion {other:?}"))),
        }
    }
}

/// Per-parameter search box in `FoPidParams` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds(pub [(f64, f64); 5]);

impl Default for ParamBounds {
    fn default() -> Self {
        Self([
            (0.0, 10.0),
            (0.0, 10.0),
            (0.0, 10.0),
            (0.0, 2.0),
            (0.0, 2.0),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningConfig {
    pub sample_time: f64,
    pub horizon_seconds: f64,
    pub setpoint: f64,
    pub weight: WeightKind,
    pub criterion: Criterion,
    pub bounds: ParamBounds,
    /// Parameters pinned to a value and excluded from the search.
    pub fixed: [Option<f64>; 5],
    pub oustaloup: OustaloupConfig,
    pub pso: PsoConfig,
    pub singularity_eps: f64,
    pub prefilter_window: Option<usize>,
    /// Data-collection controller, also seeded into the initial swarm.
    pub phi0: FoPidParams,
}

impl Default for TuningConfig {
    fn default() -> Self {
        Self {
            sample_time: 0.01,
            horizon_seconds: 25.0,
            setpoint: 1.0,
            weight: WeightKind::Linear,
            criterion: Criterion::Itae,
            bounds: ParamBounds::default(),
            fixed: [None; 5],
            oustaloup: OustaloupConfig::default(),
            pso: PsoConfig::default(),
            singularity_eps: DEFAULT_SINGULARITY_EPS,
            prefilter_window: None,
            phi0: FoPidParams::incumbent(),
        }
    }
}

impl TuningConfig {
    /// Horizon index `N = horizon / sample_time`, required to be integral.
    pub fn horizon_steps(&self) -> Result<usize> {
        if !(self.sample_time > 0.0 && self.sample_time.is_finite()) {
            return Err(Error::Config("sample_time must be positive".into()));
        }
        if !(self.horizon_seconds > 0.0 && self.horizon_seconds.is_finite()) {
            return Err(Error::Config("horizon_seconds must be positive".into()));
        }
        let ratio = self.horizon_seconds / self.sample_time;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "horizon {} s is not an integer number of {} s samples",
                self.horizon_seconds, self.sample_time
            )));
        }
        Ok(n as usize)
    }

    pub fn weight_scheme(&self) -> WeightScheme {
        let kind = match self.criterion {
            Criterion::Itae => self.weight,
            Criterion::Iae => WeightKind::Flat,
        };
        WeightScheme {
            kind,
            sample_time: self.sample_time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.horizon_steps()?;
        self.oustaloup.validate()?;
        self.pso.validate()?;
        self.weight_scheme().validate()?;
        self.param_space()?;
        if !self.setpoint.is_finite() {
            return Err(Error::Config("setpoint must be finite".into()));
        }
        if self.singularity_eps.is_nan() || self.singularity_eps < 0.0 {
            return Err(Error::Config("singularity_eps must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn param_space(&self) -> Result<ParamSpace> {
        ParamSpace::new(&self.bounds, self.fixed)
    }
}

/// Mapping between the free search coordinates and full `FoPidParams`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    free: Vec<usize>,
    fixed: [Option<f64>; 5],
    bounds: Bounds,
}

impl ParamSpace {
    pub fn new(bounds: &ParamBounds, fixed: [Option<f64>; 5]) -> Result<Self> {
        let free: Vec<usize> = (0..5).filter(|i| fixed[*i].is_none()).collect();
        if free.is_empty() {
            return Err(Error::Config("all controller parameters are fixed".into()));
        }
        let b = Bounds::new(
            free.iter().map(|i| bounds.0[*i].0).collect(),
            free.iter().map(|i| bounds.0[*i].1).collect(),
        )?;
        Ok(Self {
            free,
            fixed,
            bounds: b,
        })
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn to_params(&self, x: &[f64]) -> FoPidParams {
        let mut full = self.fixed.map(|v| v.unwrap_or(0.0));
        for (slot, v) in self.free.iter().zip(x) {
            full[*slot] = *v;
        }
        FoPidParams::from_slice(&full).expect("five entries")
    }

    pub fn project(&self, phi: &FoPidParams) -> Vec<f64> {
        let a = phi.to_array();
        let mut x: Vec<f64> = self.free.iter().map(|i| a[*i]).collect();
        self.bounds.clamp(&mut x);
        x
    }
}

/// Controller performance on a plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerMetrics {
    pub itae: f64,
    pub iae: f64,
    pub overshoot_pct: f64,
    /// `None` when the response is not inside the 2 % band at the horizon.
    pub settling_time: Option<f64>,
    pub steady_state_error: f64,
    pub stable: bool,
}

impl ControllerMetrics {
    fn unstable() -> Self {
        Self {
            itae: f64::INFINITY,
            iae: f64::INFINITY,
            overshoot_pct: f64::INFINITY,
            settling_time: None,
            steady_state_error: f64::INFINITY,
            stable: false,
        }
    }
}

/// Settling band relative to the setpoint.
pub const SETTLING_BAND: f64 = 0.02;

/// Metrics of the step response of a closed loop with impulse response `t`.
///
/// Stability is judged over the horizon: the impulse response must be finite
/// and its last fifth must carry less energy than the fifth before it, or be
/// negligible relative to the peak.
pub fn metrics_from_t(t: &Sequence, r0: f64, w: &WeightScheme) -> ControllerMetrics {
    let tv = t.values();
    if tv.iter().any(|v| !v.is_finite()) {
        return ControllerMetrics::unstable();
    }
    let y = step_response_from_t(t, r0);
    let yv = y.values();
    if yv.iter().any(|v| !v.is_finite()) {
        return ControllerMetrics::unstable();
    }
    let ts = t.sample_time();
    let n = yv.len();
    let overshoot_pct = if r0 != 0.0 {
        let peak = yv.iter().map(|v| v / r0).fold(f64::NEG_INFINITY, f64::max);
        ((peak - 1.0) * 100.0).max(0.0)
    } else {
        0.0
    };
    let band = SETTLING_BAND * r0.abs();
    let settling_time = match yv.iter().rposition(|v| (v - r0).abs() > band) {
        None => Some(0.0),
        Some(k) if k + 1 < n => Some((k + 1) as f64 * ts),
        Some(_) => None,
    };
    let peak = tv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let win = (n / 5).max(1);
    let energy = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>();
    let tail = energy(&tv[n - win..]);
    let prev = energy(&tv[n.saturating_sub(2 * win)..n - win]);
    let tail_max = tv[n - win..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let stable = tail_max <= 1e-6 * peak || tail < prev;
    ControllerMetrics {
        itae: itae_from_t(t, r0, w),
        iae: iae_from_t(t, r0),
        overshoot_pct,
        settling_time,
        steady_state_error: (r0 - yv[n - 1]).abs(),
        stable,
    }
}

/// Step response of a controller on a plant, with its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub metrics: ControllerMetrics,
    pub t: Sequence,
    pub step: Sequence,
}

pub fn evaluate_controller<P: Plant + ?Sized>(
    plant: &P,
    phi: &FoPidParams,
    cfg: &TuningConfig,
) -> Result<Evaluation> {
    let n = cfg.horizon_steps()?;
    let p = plant.impulse_response(cfg.sample_time, n)?;
    let c = fopid_discrete(phi, &cfg.oustaloup, cfg.sample_time, n)?;
    let w = WeightScheme {
        kind: cfg.weight,
        sample_time: cfg.sample_time,
    };
    match closed_loop_impulse(&p, &c.impulse) {
        Ok(t) => Ok(Evaluation {
            metrics: metrics_from_t(&t, cfg.setpoint, &w),
            step: step_response_from_t(&t, cfg.setpoint),
            t,
        }),
        Err(Error::NonFinite(_)) => {
            let zeros = Sequence::zeros(n, cfg.sample_time)?;
            Ok(Evaluation {
                metrics: ControllerMetrics::unstable(),
                t: zeros.clone(),
                step: zeros,
            })
        }
        Err(e) => Err(e),
    }
}

/// Closed-loop step experiment with controller `phi0`; records `(u, y)`.
pub fn collect_closed_loop_data<P: Plant + ?Sized>(
    plant: &P,
    phi0: &FoPidParams,
    cfg: &TuningConfig,
) -> Result<DataRecord> {
    let n = cfg.horizon_steps()?;
    let ts = cfg.sample_time;
    let p = plant.impulse_response(ts, n)?;
    let c = fopid_discrete(phi0, &cfg.oustaloup, ts, n).map_err(|e| match e {
        Error::ControllerNotBiproper(_) => Error::DataInvalid(
            "data-collection controller has zero gain, so u_0 = 0 (data must start with u_0 != 0)"
                .into(),
        ),
        other => other,
    })?;
    let r = Sequence::constant(cfg.setpoint, n, ts)?;
    let g = conv_trunc(&c.impulse, &p)?;
    let lead = 1.0 + g.values()[0];
    if lead == 0.0 {
        return Err(Error::AlgebraicLoop(lead));
    }
    let sens = g.add(&Sequence::impulse(n, ts)?)?;
    let u = deconvolve(&sens, &conv_trunc(&c.impulse, &r)?)?;
    let y = conv_trunc(&p, &u)?;
    DataRecord::new(
        u,
        y,
        format!(
            "closed-loop step on '{}' with phi0 = {}",
            plant.label(),
            phi0
        ),
    )
}

/// Result of one tuning strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningOutcome {
    pub strategy: String,
    pub criterion: Criterion,
    pub weight: WeightScheme,
    pub phi_star: FoPidParams,
    /// Index the strategy minimized, at `phi_star`.
    pub objective_value: f64,
    /// Same index at the seeded incumbent.
    pub objective_at_phi0: f64,
    /// Closed-loop impulse response as seen by the strategy's surrogate.
    pub t_est: Sequence,
    pub trace: OptimizationTrace,
    /// Filled in once the outcome is evaluated on a plant.
    pub metrics: Option<ControllerMetrics>,
}

/// Data-driven objective at one parameter vector, barrier on failure.
pub fn data_driven_objective(data: &DataRecord, phi: &FoPidParams, cfg: &TuningConfig) -> f64 {
    let w = cfg.weight_scheme();
    match fopid_discrete(phi, &cfg.oustaloup, data.sample_time(), data.horizon()) {
        Ok(c) => itae_data_driven(data, &c.impulse, cfg.setpoint, &w, cfg.singularity_eps).value,
        Err(_) => crate::objective::barrier_value(data),
    }
}

fn sim_barrier(cfg: &TuningConfig, n: usize) -> f64 {
    1e12 * (1.0 + cfg.setpoint.abs() * (n + 1) as f64)
}

/// Model-side objective against a fixed plant impulse response.
pub fn simulated_objective(p_imp: &Sequence, phi: &FoPidParams, cfg: &TuningConfig) -> f64 {
    let n = p_imp.horizon();
    let barrier = sim_barrier(cfg, n);
    let w = cfg.weight_scheme();
    fopid_discrete(phi, &cfg.oustaloup, p_imp.sample_time(), n)
        .and_then(|c| crate::objective::itae_simulated(p_imp, &c.impulse, cfg.setpoint, &w))
        .map(|j| j.min(barrier))
        .unwrap_or(barrier)
}

/// Fictitious-reference tuning from a single data record.
pub fn tune_fr(data: &DataRecord, cfg: &TuningConfig) -> Result<TuningOutcome> {
    cfg.validate()?;
    if (data.sample_time() - cfg.sample_time).abs() > 1e-9 * cfg.sample_time {
        return Err(Error::Config(format!(
            "data sample time {} differs from configured {}",
            data.sample_time(),
            cfg.sample_time
        )));
    }
    let data = match cfg.prefilter_window {
        Some(w) if w > 1 => data.with_output(prefilter_moving_average(data.y(), w)?)?,
        _ => data.clone(),
    };
    let space = cfg.param_space()?;
    let objective = |x: &[f64]| data_driven_objective(&data, &space.to_params(x), cfg);
    let incumbent = space.project(&cfg.phi0);
    let res = pso_minimize(
        objective,
        space.bounds(),
        &cfg.pso,
        std::slice::from_ref(&incumbent),
    )?;
    let barrier = crate::objective::barrier_value(&data);
    if res.best_f.is_nan() || res.best_f >= barrier {
        return Err(Error::NoFeasible {
            trace: Box::new(res.trace),
        });
    }
    let phi_star = space.to_params(&res.best_x);
    let c = fopid_discrete(
        &phi_star,
        &cfg.oustaloup,
        data.sample_time(),
        data.horizon(),
    )?;
    let fict = FictitiousData::compute(&data, &c.impulse, cfg.singularity_eps)?;
    Ok(TuningOutcome {
        strategy: "FR".into(),
        criterion: cfg.criterion,
        weight: cfg.weight_scheme(),
        phi_star,
        objective_value: res.best_f,
        objective_at_phi0: data_driven_objective(&data, &space.to_params(&incumbent), cfg),
        t_est: fict.t_est,
        trace: res.trace,
        metrics: None,
    })
}

/// Simulation-based tuning against `plant` (experiment-based when `plant` is
/// the true process, model-based when it is a reduced model).
pub fn tune_sim<P: Plant + ?Sized>(plant: &P, cfg: &TuningConfig) -> Result<TuningOutcome> {
    cfg.validate()?;
    let n = cfg.horizon_steps()?;
    let p = plant.impulse_response(cfg.sample_time, n)?;
    let space = cfg.param_space()?;
    let objective = |x: &[f64]| simulated_objective(&p, &space.to_params(x), cfg);
    let incumbent = space.project(&cfg.phi0);
    let res = pso_minimize(
        objective,
        space.bounds(),
        &cfg.pso,
        std::slice::from_ref(&incumbent),
    )?;
    if res.best_f.is_nan() || res.best_f >= sim_barrier(cfg, n) {
        return Err(Error::NoFeasible {
            trace: Box::new(res.trace),
        });
    }
    let phi_star = space.to_params(&res.best_x);
    let c = fopid_discrete(&phi_star, &cfg.oustaloup, cfg.sample_time, n)?;
    let t = closed_loop_impulse(&p, &c.impulse)?;
    Ok(TuningOutcome {
        strategy: format!("SIM:{}", plant.label()),
        criterion: cfg.criterion,
        weight: cfg.weight_scheme(),
        phi_star,
        objective_value: res.best_f,
        objective_at_phi0: simulated_objective(&p, &space.to_params(&incumbent), cfg),
        t_est: t,
        trace: res.trace,
        metrics: None,
    })
}

/// One row of the strategy comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub strategy: String,
    pub phi: FoPidParams,
    /// Index the strategy believed it achieved.
    pub surrogate_objective: f64,
    /// Same index, measured on the evaluation plant.
    pub realized_objective: f64,
    pub metrics: ControllerMetrics,
}

impl ReportRow {
    /// `|surrogate - realized| / realized`.
    pub fn relative_gap(&self) -> f64 {
        (self.surrogate_objective - self.realized_objective).abs() / self.realized_objective.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub plant: String,
    pub rows: Vec<ReportRow>,
    pub time: Vec<f64>,
    pub setpoint: f64,
    /// Step response of each strategy's controller on the evaluation plant.
    pub responses: Vec<(String, Vec<f64>)>,
}

impl ComparisonReport {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "evaluation plant: {}", self.plant);
        let _ =
            writeln!(
            s,
            "{:<14} {:>9} {:>9} {:>9} {:>9} {:>9} {:>13} {:>13} {:>10} {:>10} {:>9} {:>10} {:>7}",
            "strategy", "kfp", "kfi", "kfd", "lambda", "mu", "surrogate J", "realized J",
            "ITAE", "IAE", "OS %", "Ts [s]", "stable"
        );
        for r in &self.rows {
            let p = r.phi;
            let ts = r
                .metrics
                .settling_time
                .map_or_else(|| "n/a".to_string(), |t| format!("{t:.2}"));
            let _ = writeln!(
                s,
                "{:<14} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>13.6e} {:>13.6e} {:>10.4} {:>10.4} {:>9.3} {:>10} {:>7}",
                r.strategy,
                p.k_fp,
                p.k_fi,
                p.k_fd,
                p.lambda,
                p.mu,
                r.surrogate_objective,
                r.realized_objective,
                r.metrics.itae,
                r.metrics.iae,
                r.metrics.overshoot_pct,
                ts,
                r.metrics.stable
            );
        }
        s
    }

    /// `t,reference,<strategy>...` step-response table.
    pub fn responses_csv(&self) -> String {
        let mut s = String::from("t,reference");
        for (name, _) in &self.responses {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for (k, t) in self.time.iter().enumerate() {
            let _ = write!(s, "{t:.6},{}", self.setpoint);
            for (_, y) in &self.responses {
                let _ = write!(s, ",{:.17e}", y[k]);
            }
            s.push('\n');
        }
        s
    }
}

/// Evaluates every outcome on `plant` and tabulates surrogate vs. realized
/// performance.
pub fn compare_report<P: Plant + ?Sized>(
    outcomes: &[TuningOutcome],
    plant: &P,
    cfg: &TuningConfig,
) -> Result<ComparisonReport> {
    if outcomes.is_empty() {
        return Err(Error::Config(
            "comparison needs at least one outcome".into(),
        ));
    }
    let n = cfg.horizon_steps()?;
    let p = plant.impulse_response(cfg.sample_time, n)?;
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut responses = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let c = fopid_discrete(&o.phi_star, &cfg.oustaloup, cfg.sample_time, n)?;
        let t = closed_loop_impulse(&p, &c.impulse)?;
        let metrics = metrics_from_t(
            &t,
            cfg.setpoint,
            &WeightScheme {
                kind: cfg.weight,
                sample_time: cfg.sample_time,
            },
        );
        let realized = itae_from_t(&t, cfg.setpoint, &o.weight);
        rows.push(ReportRow {
            strategy: o.strategy.clone(),
            phi: o.phi_star,
            surrogate_objective: o.objective_value,
            realized_objective: realized,
            metrics,
        });
        responses.push((
            o.strategy.clone(),
            step_response_from_t(&t, cfg.setpoint).into_values(),
        ));
    }
    Ok(ComparisonReport {
        plant: plant.label().to_string(),
        rows,
        time: p.times(),
        setpoint: cfg.setpoint,
        responses,
    })
}
