//! Fictitious reference signal built from one-shot plant data.
//!
//! For a candidate controller `C`, the fictitious reference
//! `r~ = C^{-1} * u + y` is the reference that would have reproduced the
//! recorded output under the closed loop with `C`. Deconvolving the recorded
//! output by `r~` then yields the closed-loop impulse response without a plant
//! model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{deconvolve, deconvolve_guarded, Sequence};

/// Default relative threshold for the singularity guard on `r~_0`.
pub const DEFAULT_SINGULARITY_EPS: f64 = 1e-6;

/// One recorded input/output pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRecord {
    u: Sequence,
    y: Sequence,
    pub meta: String,
}

impl DataRecord {
    /// Validates lengths, sample times and `u_0 != 0`.
    pub fn new(u: Sequence, y: Sequence, meta: impl Into<String>) -> Result<Self> {
        if u.len() != y.len() {
            return Err(Error::DataInvalid(format!(
                "u has {} samples but y has {}",
                u.len(),
                y.len()
            )));
        }
        let (a, b) = (u.sample_time(), y.sample_time());
        if (a - b).abs() > 1e-9 * a.max(b) {
            return Err(Error::DataInvalid(format!(
                "u and y sample times differ ({a} vs {b})"
            )));
        }
        if u.values()[0] == 0.0 {
            return Err(Error::DataInvalid(
                "first input sample u_0 is zero; data must start with a nonzero input (u_0 != 0)"
                    .into(),
            ));
        }
        Ok(Self {
            u,
            y,
            meta: meta.into(),
        })
    }

    pub fn u(&self) -> &Sequence {
        &self.u
    }

    pub fn y(&self) -> &Sequence {
        &self.y
    }

    pub fn sample_time(&self) -> f64 {
        self.u.sample_time()
    }

    pub fn horizon(&self) -> usize {
        self.u.horizon()
    }

    /// Same input, different output (e.g. after denoising).
    pub fn with_output(&self, y: Sequence) -> Result<Self> {
        Self::new(self.u.clone(), y, self.meta.clone())
    }

    /// Scale used by the singularity guard: `max(1, max|u|, max|y|)`.
    pub fn guard_scale(&self) -> f64 {
        1f64.max(self.u.max_abs()).max(self.y.max_abs())
    }
}

/// `r~ = deconvolve(c, u) + y`.
pub fn fictitious_reference(data: &DataRecord, c_imp: &Sequence) -> Result<Sequence> {
    if c_imp.len() != data.u.len() {
        return Err(Error::DataInvalid(format!(
            "controller impulse response has {} samples, data has {}",
            c_imp.len(),
            data.u.len()
        )));
    }
    let cinv_u = deconvolve(c_imp, &data.u)?;
    cinv_u.add(&data.y)
}

/// `t = deconvolve(r~, y)`, i.e. the solution of the lower-triangular Toeplitz
/// system built from `r~`. Rejects `|r~_0| <= threshold`.
pub fn estimated_t(r_tilde: &Sequence, y: &Sequence, threshold: f64) -> Result<Sequence> {
    deconvolve_guarded(r_tilde, y, threshold)
}

/// Fictitious reference together with the estimated closed-loop impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousData {
    pub r_tilde: Sequence,
    pub t_est: Sequence,
    pub leading_value: f64,
}

impl FictitiousData {
    /// Runs both steps with the guard `|r~_0| >= eps * data.guard_scale()`.
    pub fn compute(data: &DataRecord, c_imp: &Sequence, eps: f64) -> Result<Self> {
        let r_tilde = fictitious_reference(data, c_imp)?;
        let threshold = eps * data.guard_scale();
        let t_est = estimated_t(&r_tilde, &data.y, threshold)?;
        Ok(Self {
            leading_value: r_tilde.values()[0],
            r_tilde,
            t_est,
        })
    }
}
