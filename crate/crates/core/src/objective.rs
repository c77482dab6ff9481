//! ITAE / IAE performance indices.
//!
//! Every index is a weighted 1-norm `sum_k w_k |r0 - y_k|` of the step-response
//! error, where `y` is the cumulative sum of a closed-loop impulse response
//! scaled by the setpoint. The impulse response comes either from the data
//! (via the fictitious reference) or from a plant model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fictref::{DataRecord, FictitiousData};
use crate::lti::{closed_loop_impulse, step_response_from_t, Sequence};

/// Time-weight shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// `w_k = k * T`
    Linear,
    /// `w_k = Sat(k * T)`, bounded by `alpha`
    Saturated { alpha: f64 },
    /// `w_k = 1` (IAE)
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub kind: WeightKind,
    pub sample_time: f64,
}

impl WeightScheme {
    pub fn linear(sample_time: f64) -> Self {
        Self {
            kind: WeightKind::Linear,
            sample_time,
        }
    }

    pub fn saturated(sample_time: f64, alpha: f64) -> Self {
        Self {
            kind: WeightKind::Saturated { alpha },
            sample_time,
        }
    }

    pub fn flat(sample_time: f64) -> Self {
        Self {
            kind: WeightKind::Flat,
            sample_time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_time > 0.0 && self.sample_time.is_finite()) {
            return Err(Error::Config("weight sample time must be positive".into()));
        }
        if let WeightKind::Saturated { alpha } = self.kind {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::Config(format!(
                    "saturation level alpha must be positive, got {alpha}"
                )));
            }
        }
        Ok(())
    }

    pub fn weight(&self, k: usize) -> f64 {
        let tau = k as f64 * self.sample_time;
        match self.kind {
            WeightKind::Linear => tau,
            WeightKind::Saturated { alpha } => saturated_weight(tau, alpha),
            WeightKind::Flat => 1.0,
        }
    }

    /// Weights `w_0..w_n`.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.weight(k)).collect()
    }
}

/// Bounded time weight `Sat(tau) = tau / sqrt(1 + (tau/alpha)^2)`.
///
/// Strictly increasing, `Sat(tau) < alpha` for all `tau >= 0`, and
/// `Sat(tau) / tau -> 1` as `tau -> 0`.
pub fn saturated_weight(tau: f64, alpha: f64) -> f64 {
    let x = tau / alpha;
    tau / (1.0 + x * x).sqrt()
}

/// Signed weighted error vector `w_k (r0 - y_k)` of the step response of `t`.
pub fn weighted_error(t: &Sequence, r0: f64, w: &WeightScheme) -> Vec<f64> {
    step_response_from_t(t, r0)
        .values()
        .iter()
        .enumerate()
        .map(|(k, y)| w.weight(k) * (r0 - y))
        .collect()
}

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `J = sum_k w_k |r0 - y_k|` for the closed loop with impulse response `t`.
pub fn itae_from_t(t: &Sequence, r0: f64, w: &WeightScheme) -> f64 {
    norm1(&weighted_error(t, r0, w))
}

/// Unweighted counterpart of [`itae_from_t`].
pub fn iae_from_t(t: &Sequence, r0: f64) -> f64 {
    itae_from_t(t, r0, &WeightScheme::flat(t.sample_time()))
}

/// Why a candidate controller could not be scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Infeasibility {
    /// `|r~_0|` fell under the singularity guard.
    Singular { leading: f64 },
    /// An intermediate sequence overflowed.
    NonFinite,
    /// The controller itself could not be built or inverted.
    Controller(String),
}

/// Objective value with a flag telling whether the barrier was substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    pub infeasible: Option<Infeasibility>,
}

impl ObjectiveValue {
    pub fn feasible(value: f64) -> Self {
        Self {
            value,
            infeasible: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.infeasible.is_none()
    }
}

/// Finite penalty that dominates every feasible index: `1e12 (1 + ||y||_1)`.
pub fn barrier_value(data: &DataRecord) -> f64 {
    1e12 * (1.0 + data.y().norm1())
}

pub(crate) fn classify(err: &Error) -> Infeasibility {
    match err {
        Error::Singular { leading, .. } => Infeasibility::Singular { leading: *leading },
        Error::NonFinite(_) => Infeasibility::NonFinite,
        other => Infeasibility::Controller(other.to_string()),
    }
}

/// Data-driven index: fictitious reference, then estimated `t`, then the
/// weighted error norm. Guard failures and overflow yield the barrier value.
pub fn itae_data_driven(
    data: &DataRecord,
    c_imp: &Sequence,
    r0: f64,
    w: &WeightScheme,
    eps: f64,
) -> ObjectiveValue {
    let barrier = barrier_value(data);
    match FictitiousData::compute(data, c_imp, eps) {
        Ok(f) => {
            let j = itae_from_t(&f.t_est, r0, w);
            if j.is_finite() {
                ObjectiveValue::feasible(j)
            } else {
                ObjectiveValue {
                    value: barrier,
                    infeasible: Some(Infeasibility::NonFinite),
                }
            }
        }
        Err(e) => ObjectiveValue {
            value: barrier,
            infeasible: Some(classify(&e)),
        },
    }
}

pub fn iae_data_driven(data: &DataRecord, c_imp: &Sequence, r0: f64, eps: f64) -> ObjectiveValue {
    itae_data_driven(
        data,
        c_imp,
        r0,
        &WeightScheme::flat(data.sample_time()),
        eps,
    )
}

/// Model-side index: closed loop from the plant impulse response.
pub fn itae_simulated(
    p_imp: &Sequence,
    c_imp: &Sequence,
    r0: f64,
    w: &WeightScheme,
) -> Result<f64> {
    let t = closed_loop_impulse(p_imp, c_imp)?;
    let j = itae_from_t(&t, r0, w);
    if j.is_finite() {
        Ok(j)
    } else {
        Err(Error::NonFinite(t.horizon()))
    }
}

pub fn iae_simulated(p_imp: &Sequence, c_imp: &Sequence, r0: f64) -> Result<f64> {
    itae_simulated(p_imp, c_imp, r0, &WeightScheme::flat(p_imp.sample_time()))
}

/// Split of the noisy index into the clean weighted error `ell` and the bias `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDecomposition {
    pub ell: Sequence,
    pub d: Sequence,
    pub j_noisy: f64,
    /// Estimated impulse responses from clean and noisy data.
    pub t_clean: Sequence,
    pub t_noisy: Sequence,
}

impl NoiseDecomposition {
    pub fn j_clean(&self) -> f64 {
        self.ell.norm1()
    }
}

/// Noise-induced bias on the data-driven index, for synthetic studies where
/// the additive output noise is known.
pub fn noise_bias(
    data_noisy: &DataRecord,
    noise: &Sequence,
    c_imp: &Sequence,
    r0: f64,
    w: &WeightScheme,
    eps: f64,
) -> Result<NoiseDecomposition> {
    let clean_y = data_noisy.y().sub(noise)?;
    let clean = data_noisy.with_output(clean_y)?;
    let fc = FictitiousData::compute(&clean, c_imp, eps).map_err(|e| Error::Dataset {
        dataset: "clean",
        source: Box::new(e),
    })?;
    let fnz = FictitiousData::compute(data_noisy, c_imp, eps).map_err(|e| Error::Dataset {
        dataset: "noisy",
        source: Box::new(e),
    })?;
    let ell = weighted_error(&fc.t_est, r0, w);
    let noisy = weighted_error(&fnz.t_est, r0, w);
    let d: Vec<f64> = noisy.iter().zip(&ell).map(|(a, b)| a - b).collect();
    let ts = data_noisy.sample_time();
    Ok(NoiseDecomposition {
        j_noisy: norm1(&noisy),
        ell: Sequence::new(ell, ts)?,
        d: Sequence::new(d, ts)?,
        t_clean: fc.t_est,
        t_noisy: fnz.t_est,
    })
}

/// Centered moving average; near the edges the window is clipped to the
/// available samples.
pub fn prefilter_moving_average(y: &Sequence, window: usize) -> Result<Sequence> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "moving-average window must be odd, got {window}"
        )));
    }
    if window > y.len() {
        return Err(Error::Config(format!(
            "moving-average window {window} exceeds signal length {}",
            y.len()
        )));
    }
    let half = window / 2;
    let v = y.values();
    let n = v.len();
    let out = (0..n)
        .map(|k| {
            let slice = &v[k.saturating_sub(half)..=(k + half).min(n - 1)];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect();
    Sequence::new(out, y.sample_time())
}
