//! Flat-file formats: run configuration, data CSV, plant description and the
//! per-run report files.
//!
//! Data CSV:
//!
//! ```text
//! # sample_time=0.01
//! # meta=closed-loop step ...
//! k,t,u,y
//! 0,0.0000000000000000e0,1.0000000000000000e0,...
//! ```
//!
//! Numbers are written with 17 significant digits so a write/read cycle is
//! bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fictref::DataRecord;
use crate::frac::{FoPidParams, OustaloupFilter};
use crate::lti::{ContinuousTf, DiscreteTf, Sequence};
use crate::objective::WeightKind;
use crate::optimize::OptimizationTrace;
use crate::pipeline::{PlantModel, TuningConfig, TuningOutcome};

/// Keys accepted in a run configuration file.
pub const CONFIG_KEYS: &[&str] = &[
    "sample_time",
    "horizon_seconds",
    "setpoint",
    "weight.kind",
    "weight.alpha",
    "oustaloup.order",
    "oustaloup.omega_low",
    "oustaloup.omega_high",
    "bounds.kfp",
    "bounds.kfi",
    "bounds.kfd",
    "bounds.lambda",
    "bounds.mu",
    "fixed.kfp",
    "fixed.kfi",
    "fixed.kfd",
    "fixed.lambda",
    "fixed.mu",
    "pso.population",
    "pso.max_evaluations",
    "pso.seed",
    "singularity_eps",
    "prefilter.window",
];

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{key}: expected a number, got {v:?}")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("{key}: expected a nonnegative integer, got {v:?}")))
}

/// Comma-separated list of numbers.
pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_f64(key, x)).collect()
}

/// Iterates `key = value` lines, skipping blanks and `#` comments.
fn key_values(text: &str) -> impl Iterator<Item = Result<(usize, &str, &str)>> {
    text.lines().enumerate().filter_map(|(i, line)| {
        // `#` starts a comment, on its own line or after a value.
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return None;
        }
        Some(match line.split_once('=') {
            Some((k, v)) => Ok((i + 1, k.trim(), v.trim())),
            None => Err(Error::Parse(format!(
                "line {}: expected key=value, got {line:?}",
                i + 1
            ))),
        })
    })
}

/// Parses a run configuration. Missing keys keep their defaults; unknown keys
/// are rejected.
pub fn parse_config(text: &str) -> Result<TuningConfig> {
    let mut cfg = TuningConfig::default();
    let mut weight_kind = "linear".to_string();
    let mut alpha = None;
    for kv in key_values(text) {
        let (line, key, v) = kv?;
        match key {
            "sample_time" => cfg.sample_time = parse_f64(key, v)?,
            "horizon_seconds" => cfg.horizon_seconds = parse_f64(key, v)?,
            "setpoint" => cfg.setpoint = parse_f64(key, v)?,
            "weight.kind" => weight_kind = v.to_ascii_lowercase(),
            "weight.alpha" => alpha = Some(parse_f64(key, v)?),
            "oustaloup.order" => cfg.oustaloup.order = parse_usize(key, v)?,
            "oustaloup.omega_low" => cfg.oustaloup.omega_low = parse_f64(key, v)?,
            "oustaloup.omega_high" => cfg.oustaloup.omega_high = parse_f64(key, v)?,
            "pso.population" => cfg.pso.population = parse_usize(key, v)?,
            "pso.max_evaluations" => cfg.pso.max_evaluations = parse_usize(key, v)?,
            "pso.seed" => {
                cfg.pso.seed = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("{key}: expected an integer, got {v:?}")))?
            }
            "singularity_eps" => cfg.singularity_eps = parse_f64(key, v)?,
            "prefilter.window" => cfg.prefilter_window = Some(parse_usize(key, v)?),
            _ => {
                if let Some(name) = key.strip_prefix("bounds.") {
                    let i = param_index(name).ok_or_else(|| unknown(line, key))?;
                    match parse_list(key, v)?.as_slice() {
                        [lo, hi] => cfg.bounds.0[i] = (*lo, *hi),
                        _ => return Err(Error::Parse(format!("{key}: expected \"lo,hi\""))),
                    }
                } else if let Some(name) = key.strip_prefix("fixed.") {
                    let i = param_index(name).ok_or_else(|| unknown(line, key))?;
                    cfg.fixed[i] = Some(parse_f64(key, v)?);
                } else {
                    return Err(unknown(line, key));
                }
            }
        }
    }
    cfg.weight = match (weight_kind.as_str(), alpha) {
        ("linear", _) => WeightKind::Linear,
        ("saturated", Some(alpha)) => WeightKind::Saturated { alpha },
        ("saturated", None) => {
            return Err(Error::Config(
                "weight.kind=saturated needs weight.alpha".into(),
            ))
        }
        (other, _) => return Err(Error::Config(format!("unknown weight.kind {other:?}"))),
    };
    cfg.pso.parallel = cfg!(feature = "parallel");
    cfg.validate()?;
    Ok(cfg)
}

fn param_index(name: &str) -> Option<usize> {
    FoPidParams::NAMES.iter().position(|n| *n == name)
}

fn unknown(line: usize, key: &str) -> Error {
    Error::Config(format!("line {line}: unknown key {key:?}"))
}

pub fn load_config(path: &Path) -> Result<TuningConfig> {
    parse_config(&fs::read_to_string(path)?)
}

/// Parses `kfp,kfi,kfd,lambda,mu`.
pub fn parse_phi(text: &str) -> Result<FoPidParams> {
    let phi = FoPidParams::from_slice(&parse_list("phi", text)?)?;
    phi.validate()?;
    Ok(phi)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn data_to_csv(data: &DataRecord) -> String {
    let ts = data.sample_time();
    let mut s = format!("# sample_time={}\n", num(ts));
    if !data.meta.is_empty() {
        let _ = writeln!(s, "# meta={}", data.meta.replace('\n', " "));
    }
    s.push_str("k,t,u,y\n");
    for (k, (u, y)) in data.u().values().iter().zip(data.y().values()).enumerate() {
        let _ = writeln!(s, "{k},{},{},{}", num(k as f64 * ts), num(*u), num(*y));
    }
    s
}

/// Reads a data CSV. `u_0 != 0` is enforced by [`DataRecord::new`].
pub fn data_from_csv(text: &str) -> Result<DataRecord> {
    let mut sample_time = None;
    let mut meta = String::new();
    let mut header_seen = false;
    let (mut u, mut y) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("sample_time=") {
                sample_time = Some(parse_f64("sample_time", v)?);
            } else if let Some(v) = c.strip_prefix("meta=") {
                meta = v.to_string();
            }
            continue;
        }
        if !header_seen {
            if line.replace(' ', "") != "k,t,u,y" {
                return Err(Error::Parse(format!(
                    "line {}: expected header k,t,u,y, got {line:?}",
                    i + 1
                )));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", i + 1)));
        }
        let k = parse_usize("k", f[0])?;
        if k != u.len() {
            return Err(Error::Parse(format!(
                "line {}: expected k = {}, got {k}",
                i + 1,
                u.len()
            )));
        }
        u.push(parse_f64("u", f[2])?);
        y.push(parse_f64("y", f[3])?);
    }
    let ts = sample_time.ok_or_else(|| Error::Parse("missing '# sample_time=<v>' line".into()))?;
    if u.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    DataRecord::new(Sequence::new(u, ts)?, Sequence::new(y, ts)?, meta)
}

pub fn read_data(path: &Path) -> Result<DataRecord> {
    data_from_csv(&fs::read_to_string(path)?)
}

pub fn write_data(path: &Path, data: &DataRecord) -> Result<()> {
    Ok(fs::write(path, data_to_csv(data))?)
}

/// Plant description file:
///
/// ```text
/// label = my plant
/// domain = s        # or z
/// num = 1
/// den = 1, 2, 1
/// sample_time = 0.01   # z-domain only
/// ```
///
/// `s`-domain coefficients are in descending powers of `s`; `z`-domain ones are
/// difference-equation coefficients in powers of `z^{-1}`.
pub fn parse_plant(text: &str) -> Result<PlantModel> {
    let (mut label, mut domain) = ("file".to_string(), "s".to_string());
    let (mut numc, mut denc, mut ts) = (None, None, None);
    for kv in key_values(text) {
        let (line, key, v) = kv?;
        match key {
            "label" => label = v.to_string(),
            "domain" => domain = v.to_ascii_lowercase(),
            "num" => numc = Some(parse_list(key, v)?),
            "den" => denc = Some(parse_list(key, v)?),
            "sample_time" => ts = Some(parse_f64(key, v)?),
            _ => return Err(unknown(line, key)),
        }
    }
    let numc = numc.ok_or_else(|| Error::Parse("plant file: missing num".into()))?;
    let denc = denc.ok_or_else(|| Error::Parse("plant file: missing den".into()))?;
    match domain.as_str() {
        "s" => Ok(PlantModel::continuous(
            label,
            ContinuousTf::new(numc, denc)?,
        )),
        "z" => {
            let ts = ts.ok_or_else(|| {
                Error::Parse("plant file: z-domain plant needs sample_time".into())
            })?;
            Ok(PlantModel::discrete(
                label,
                DiscreteTf::new(numc, denc, ts)?,
            ))
        }
        other => Err(Error::Parse(format!(
            "plant file: unknown domain {other:?}"
        ))),
    }
}

/// `full`, `reduced`, or a path to a plant file.
pub fn resolve_plant(spec: &str) -> Result<PlantModel> {
    match spec {
        "full" => Ok(PlantModel::full()),
        "reduced" => Ok(PlantModel::reduced()),
        path => parse_plant(&fs::read_to_string(path)?),
    }
}

pub fn step_csv(times: &[f64], setpoint: f64, y: &[f64]) -> String {
    let mut s = String::from("t,reference,y\n");
    for (t, v) in times.iter().zip(y) {
        let _ = writeln!(s, "{},{},{}", num(*t), num(setpoint), num(*v));
    }
    s
}

pub fn trace_csv(trace: &OptimizationTrace) -> String {
    let mut s = String::from("iteration,evaluations,best_f,best_x\n");
    for e in &trace.entries {
        let x: Vec<String> = e.best_x.iter().map(|v| num(*v)).collect();
        let _ = writeln!(
            s,
            "{},{},{},\"{}\"",
            e.iteration,
            e.evaluations,
            num(e.best_f),
            x.join(" ")
        );
    }
    s
}

/// Log-spaced `(omega, magnitude dB, phase deg)` sweep.
pub fn freq_response_csv(
    filter: &OustaloupFilter,
    omega_lo: f64,
    omega_hi: f64,
    points: usize,
) -> String {
    let mut s = String::from("omega,magnitude_db,phase_deg\n");
    let points = points.max(2);
    for i in 0..points {
        let w = omega_lo * (omega_hi / omega_lo).powf(i as f64 / (points - 1) as f64);
        let h = filter.freq_response(w);
        let _ = writeln!(
            s,
            "{},{},{}",
            num(w),
            num(20.0 * h.norm().log10()),
            num(h.arg().to_degrees())
        );
    }
    s
}

pub fn outcome_to_json(outcome: &TuningOutcome) -> Result<String> {
    serde_json::to_string_pretty(outcome).map_err(|e| Error::Parse(e.to_string()))
}

pub fn outcome_from_json(text: &str) -> Result<TuningOutcome> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Name of the outcome file inside a report directory.
pub const OUTCOME_FILE: &str = "outcome.json";
