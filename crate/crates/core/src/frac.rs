//! Oustaloup recursive approximation of `s^gamma` and the discretized FO-PID
//! controller `K_fp + K_fi s^{-lambda} + K_fd s^{mu}`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{cascade_impulse_response, tustin, ContinuousTf, DiscreteTf, Sequence};

/// Upper end of the admissible fractional-order range.
pub const MAX_ORDER: f64 = 2.0;

/// The five tunable FO-PID values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoPidParams {
    pub k_fp: f64,
    pub k_fi: f64,
    pub k_fd: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl FoPidParams {
    pub const DIM: usize = 5;
    pub const NAMES: [&'static str; 5] = ["kfp", "kfi", "kfd", "lambda", "mu"];

    pub fn new(k_fp: f64, k_fi: f64, k_fd: f64, lambda: f64, mu: f64) -> Self {
        Self {
            k_fp,
            k_fi,
            k_fd,
            lambda,
            mu,
        }
    }

    /// Data-collection controller `1 + s`.
    pub fn incumbent() -> Self {
        Self::new(1.0, 0.0, 1.0, 0.0, 1.0)
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.k_fp, self.k_fi, self.k_fd, self.lambda, self.mu]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match x {
            [a, b, c, d, e] => Ok(Self::new(*a, *b, *c, *d, *e)),
            _ => Err(Error::InvalidParams(format!(
                "expected 5 values, got {}",
                x.len()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.to_array();
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if a[..3].iter().any(|k| *k < 0.0) {
            return Err(Error::InvalidParams(format!(
                "gains must be nonnegative: {self}"
            )));
        }
        if a[3..].iter().any(|o| !(0.0..=MAX_ORDER).contains(o)) {
            return Err(Error::InvalidParams(format!(
                "orders must lie in [0, {MAX_ORDER}]: {self}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for FoPidParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.6}, {:.6}, {:.6}, {:.6}, {:.6}]",
            self.k_fp, self.k_fi, self.k_fd, self.lambda, self.mu
        )
    }
}

/// Settings of the Oustaloup filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OustaloupConfig {
    pub order: usize,
    pub omega_low: f64,
    pub omega_high: f64,
}

impl Default for OustaloupConfig {
    fn default() -> Self {
        Self {
            order: 5,
            omega_low: 1e-6,
            omega_high: 1e3,
        }
    }
}

impl OustaloupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::Config("oustaloup order must be positive".into()));
        }
        if !(self.omega_low > 0.0
            && self.omega_low < self.omega_high
            && self.omega_high.is_finite())
        {
            return Err(Error::Config(format!(
                "oustaloup band must satisfy 0 < low < high, got ({}, {})",
                self.omega_low, self.omega_high
            )));
        }
        Ok(())
    }

    /// Geometric centre of the band, where the gain is matched.
    pub fn center(&self) -> f64 {
        (self.omega_low * self.omega_high).sqrt()
    }
}

/// Zero/pole/gain form of the approximation `gain * prod (s + z_k) / (s + p_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OustaloupFilter {
    pub gamma: f64,
    /// Zero corner frequencies (rad/s); the zeros sit at `-z_k`.
    pub zeros: Vec<f64>,
    /// Pole corner frequencies (rad/s); the poles sit at `-p_k`.
    pub poles: Vec<f64>,
    pub gain: f64,
}

impl OustaloupFilter {
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(0.0, omega);
        self.zeros
            .iter()
            .zip(&self.poles)
            .fold(Complex64::new(self.gain, 0.0), |acc, (z, p)| {
                acc * (s + z) / (s + p)
            })
    }

    /// First-order sections `(s + z_k) / (s + p_k)`; the gain is not included.
    pub fn sections(&self) -> Vec<ContinuousTf> {
        self.zeros
            .iter()
            .zip(&self.poles)
            .map(|(z, p)| ContinuousTf::new(vec![1.0, *z], vec![1.0, *p]).unwrap())
            .collect()
    }

    /// Expanded polynomial form. Coefficients span many decades, so prefer
    /// [`OustaloupFilter::sections`] for numerical work.
    pub fn to_tf(&self) -> ContinuousTf {
        self.sections()
            .iter()
            .fold(ContinuousTf::constant(self.gain), |acc, s| acc.series(s))
    }

    /// Tustin image of each section, gain folded into the first one.
    pub fn discretize(&self, sample_time: f64) -> Result<Vec<DiscreteTf>> {
        let mut out = Vec::with_capacity(self.zeros.len());
        for (i, s) in self.sections().iter().enumerate() {
            let d = tustin(s, sample_time)?;
            if i == 0 {
                let b = d.b().iter().map(|c| c * self.gain).collect();
                out.push(DiscreteTf::new(b, d.a().to_vec(), sample_time)?);
            } else {
                out.push(d);
            }
        }
        Ok(out)
    }
}

/// Order-`N` Oustaloup approximation of `s^gamma` over the configured band,
/// with `2N + 1` zero/pole pairs and the magnitude matched to `|(j w_c)^gamma|`
/// at the band centre `w_c`.
pub fn oustaloup_ct(gamma: f64, cfg: &OustaloupConfig) -> Result<OustaloupFilter> {
    if !(gamma.is_finite() && gamma.abs() < 1.0) {
        return Err(Error::ExponentOutOfRange(gamma));
    }
    cfg.validate()?;
    let n = cfg.order as i64;
    let pairs = (2 * n + 1) as f64;
    let ratio = cfg.omega_high / cfg.omega_low;
    let corner =
        |offset: f64, k: i64| cfg.omega_low * ratio.powf(((k + n) as f64 + offset) / pairs);
    let zeros: Vec<f64> = (-n..=n).map(|k| corner(0.5 * (1.0 - gamma), k)).collect();
    let poles: Vec<f64> = (-n..=n).map(|k| corner(0.5 * (1.0 + gamma), k)).collect();
    let mut filter = OustaloupFilter {
        gamma,
        zeros,
        poles,
        gain: 1.0,
    };
    let wc = cfg.center();
    filter.gain = wc.powf(gamma) / filter.freq_response(wc).norm();
    Ok(filter)
}

/// Which parallel branch of the FO-PID a piece of the controller belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchKind {
    Proportional,
    Integral,
    Derivative,
}

/// One discretized parallel branch, `gain * prod sections`.
#[derive(Debug, Clone)]
pub struct ControllerBranch {
    pub kind: BranchKind,
    pub gain: f64,
    pub exponent: f64,
    pub sections: Vec<DiscreteTf>,
}

impl ControllerBranch {
    pub fn impulse_response(&self, n: usize, sample_time: f64) -> Sequence {
        let unit = cascade_impulse_response(&self.sections, n, sample_time);
        unit.scaled(self.gain).unwrap_or(unit)
    }
}

/// Discretized FO-PID: the parallel branch set and the summed impulse response.
#[derive(Debug, Clone)]
pub struct FoPidController {
    pub params: FoPidParams,
    pub branches: Vec<ControllerBranch>,
    pub impulse: Sequence,
}

/// Discrete sections realizing `s^exponent`.
///
/// The integer part of the exponent is realized exactly by Tustin images of
/// `s^{+-m}`; the fractional remainder (if nonzero) goes through the
/// Oustaloup filter.
pub fn fractional_power_sections(
    exponent: f64,
    cfg: &OustaloupConfig,
    sample_time: f64,
) -> Result<Vec<DiscreteTf>> {
    let sign = exponent.signum();
    let mag = exponent.abs();
    let whole = mag.floor();
    let frac = mag - whole;
    let mut sections = Vec::new();
    if whole > 0.0 {
        let power = (sign * whole) as i32;
        sections.push(tustin(&ContinuousTf::integer_power(power), sample_time)?);
    }
    if frac > 0.0 {
        sections.extend(oustaloup_ct(sign * frac, cfg)?.discretize(sample_time)?);
    }
    Ok(sections)
}

/// Builds `C(z; phi)` and its impulse response of length `n + 1`.
pub fn fopid_discrete(
    phi: &FoPidParams,
    cfg: &OustaloupConfig,
    sample_time: f64,
    n: usize,
) -> Result<FoPidController> {
    phi.validate()?;
    let mut branches = vec![ControllerBranch {
        kind: BranchKind::Proportional,
        gain: phi.k_fp,
        exponent: 0.0,
        sections: Vec::new(),
    }];
    if phi.k_fi != 0.0 {
        branches.push(ControllerBranch {
            kind: BranchKind::Integral,
            gain: phi.k_fi,
            exponent: -phi.lambda,
            sections: fractional_power_sections(-phi.lambda, cfg, sample_time)?,
        });
    }
    if phi.k_fd != 0.0 {
        branches.push(ControllerBranch {
            kind: BranchKind::Derivative,
            gain: phi.k_fd,
            exponent: phi.mu,
            sections: fractional_power_sections(phi.mu, cfg, sample_time)?,
        });
    }
    let mut total = vec![0.0; n + 1];
    for b in &branches {
        for (t, v) in total
            .iter_mut()
            .zip(b.impulse_response(n, sample_time).values())
        {
            *t += v;
        }
    }
    if total[0] == 0.0 || !total[0].is_finite() {
        return Err(Error::ControllerNotBiproper(total[0]));
    }
    let impulse = Sequence::new(total, sample_time)?;
    Ok(FoPidController {
        params: *phi,
        branches,
        impulse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::impulse_response;
    use approx::assert_abs_diff_eq;

    fn log_sweep(lo: f64, hi: f64, points: usize) -> Vec<f64> {
        (0..points)
            .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
            .collect()
    }

    #[test]
    fn zero_exponent_is_unity() {
        let f = oustaloup_ct(0.0, &OustaloupConfig::default()).unwrap();
        assert_eq!(f.zeros, f.poles);
        assert_abs_diff_eq!(f.gain, 1.0, epsilon = 1e-15);
        for w in [1e-4, 1.0, 1e2] {
            assert_abs_diff_eq!(f.freq_response(w).re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn half_order_phase_in_band() {
        let f = oustaloup_ct(0.5, &OustaloupConfig::default()).unwrap();
        for w in log_sweep(1e-3, 1.0, 31) {
            let phase = f.freq_response(w).arg().to_degrees();
            assert!((phase - 45.0).abs() <= 5.0, "phase {phase} at {w}");
        }
    }

    #[test]
    fn reciprocal_exponents_multiply_to_one() {
        let cfg = OustaloupConfig::default();
        let pos = oustaloup_ct(0.5, &cfg).unwrap();
        let neg = oustaloup_ct(-0.5, &cfg).unwrap();
        for w in log_sweep(1e-3, 1.0, 31) {
            let prod = pos.freq_response(w).norm() * neg.freq_response(w).norm();
            assert_abs_diff_eq!(prod, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn gain_matched_at_center() {
        let cfg = OustaloupConfig::default();
        let f = oustaloup_ct(0.3, &cfg).unwrap();
        let wc = cfg.center();
        assert_abs_diff_eq!(
            f.freq_response(wc).norm(),
            wc.powf(0.3),
            epsilon = 1e-12 * wc.powf(0.3)
        );
    }

    #[test]
    fn exponent_out_of_range() {
        let cfg = OustaloupConfig::default();
        assert_eq!(oustaloup_ct(1.0, &cfg), Err(Error::ExponentOutOfRange(1.0)));
        assert!(oustaloup_ct(-1.5, &cfg).is_err());
        assert!(oustaloup_ct(f64::NAN, &cfg).is_err());
    }

    #[test]
    fn bad_band_is_rejected() {
        let cfg = OustaloupConfig {
            order: 5,
            omega_low: 10.0,
            omega_high: 1.0,
        };
        assert!(oustaloup_ct(0.5, &cfg).is_err());
    }

    #[test]
    fn pure_proportional() {
        let c = fopid_discrete(
            &FoPidParams::new(1.0, 0.0, 0.0, 0.7, 1.3),
            &OustaloupConfig::default(),
            0.01,
            5,
        )
        .unwrap();
        assert_eq!(c.impulse.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn integer_orders_skip_oustaloup() {
        // 1 + s
        let ts = 0.01;
        let c = fopid_discrete(
            &FoPidParams::incumbent(),
            &OustaloupConfig::default(),
            ts,
            20,
        )
        .unwrap();
        let d = &c.branches[1];
        assert_eq!(d.kind, BranchKind::Derivative);
        assert_eq!(d.sections.len(), 1);
        let reference = tustin(&ContinuousTf::new(vec![1.0, 1.0], vec![1.0]).unwrap(), ts).unwrap();
        let expected = impulse_response(&reference, 20);
        for (a, e) in c.impulse.values().iter().zip(expected.values()) {
            assert_abs_diff_eq!(a, e, epsilon = 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn classical_pi() {
        let ts = 0.01;
        let n = 200;
        let phi = FoPidParams::new(2.0, 3.0, 0.5, 1.0, 0.0);
        let c = fopid_discrete(&phi, &OustaloupConfig::default(), ts, n).unwrap();
        // (K_fp + K_fd) + K_fi / s
        let pi = ContinuousTf::new(vec![2.5, 3.0], vec![1.0, 0.0]).unwrap();
        let expected = impulse_response(&tustin(&pi, ts).unwrap(), n);
        for (a, e) in c.impulse.values().iter().zip(expected.values()) {
            assert_abs_diff_eq!(a, e, epsilon = 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn linear_in_gains() {
        let cfg = OustaloupConfig::default();
        let (ts, n) = (0.01, 300);
        let unit = |i: usize| {
            let mut a = [0.0, 0.0, 0.0, 0.6, 1.4];
            a[i] = 1.0;
            fopid_discrete(&FoPidParams::from_slice(&a).unwrap(), &cfg, ts, n).unwrap()
        };
        let (p, i, d) = (unit(0), unit(1), unit(2));
        let c = fopid_discrete(&FoPidParams::new(1.5, 2.5, 0.3, 0.6, 1.4), &cfg, ts, n).unwrap();
        for k in 0..=n {
            let e = 1.5 * p.impulse.values()[k]
                + 2.5 * i.impulse.values()[k]
                + 0.3 * d.impulse.values()[k];
            let a = c.impulse.values()[k];
            assert_abs_diff_eq!(a, e, epsilon = 1e-12 * e.abs().max(1.0));
        }
    }

    #[test]
    fn all_zero_gains_not_biproper() {
        let r = fopid_discrete(
            &FoPidParams::new(0.0, 0.0, 0.0, 1.0, 1.0),
            &OustaloupConfig::default(),
            0.01,
            10,
        );
        assert!(matches!(r, Err(Error::ControllerNotBiproper(_))));
    }

    #[test]
    fn params_validation() {
        assert!(FoPidParams::new(-1.0, 0.0, 0.0, 0.0, 0.0)
            .validate()
            .is_err());
        assert!(FoPidParams::new(1.0, 0.0, 0.0, 2.5, 0.0)
            .validate()
            .is_err());
        assert!(FoPidParams::new(1.0, 0.0, 0.0, 2.0, 2.0).validate().is_ok());
        assert!(FoPidParams::from_slice(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn order_two_exponent_uses_double_integrator() {
        let s = fractional_power_sections(-2.0, &OustaloupConfig::default(), 0.1).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].a().len(), 3);
        let s = fractional_power_sections(1.5, &OustaloupConfig::default(), 0.1).unwrap();
        assert_eq!(s.len(), 1 + 11);
    }
}
