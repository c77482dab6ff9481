//! Finite-horizon discrete LTI algebra.
//!
//! Every loop identity (series, feedback, inversion) is carried out on
//! impulse-response sequences truncated at a common horizon `N`. Truncated
//! convolution is a lower-triangular Toeplitz product, so it is closed under
//! composition and inversion, and every identity holds exactly at the horizon.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when comparing sample times of two sequences.
const SAMPLE_TIME_RTOL: f64 = 1e-9;

/// A finite real time series `x_0..x_N` at a fixed sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    values: Vec<f64>,
    sample_time: f64,
}

impl Sequence {
    pub fn new(values: Vec<f64>, sample_time: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("sequence must be nonempty".into()));
        }
        if !(sample_time.is_finite() && sample_time > 0.0) {
            return Err(Error::InvalidSequence(format!(
                "sample time must be positive, got {sample_time}"
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self {
            values,
            sample_time,
        })
    }

    /// Unit impulse `[1, 0, ..., 0]` of length `n + 1`.
    pub fn impulse(n: usize, sample_time: f64) -> Result<Self> {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        Self::new(v, sample_time)
    }

    pub fn constant(value: f64, n: usize, sample_time: f64) -> Result<Self> {
        Self::new(vec![value; n + 1], sample_time)
    }

    pub fn zeros(n: usize, sample_time: f64) -> Result<Self> {
        Self::constant(0.0, n, sample_time)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time
    }

    /// Number of samples, `N + 1`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Horizon index `N`.
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// Sample times `k * sample_time`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| k as f64 * self.sample_time)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.sample_time,
        )
    }

    /// Elementwise sum. Shorter operand is zero-padded.
    pub fn add(&self, other: &Sequence) -> Result<Self> {
        check_sample_time(self, other)?;
        let n = self.len().max(other.len());
        let v = (0..n)
            .map(|k| {
                self.values.get(k).copied().unwrap_or(0.0)
                    + other.values.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Self::new(v, self.sample_time)
    }

    pub fn sub(&self, other: &Sequence) -> Result<Self> {
        self.add(&other.scaled(-1.0)?)
    }

    /// Truncates or zero-pads to `n + 1` samples.
    pub fn resized(&self, n: usize) -> Self {
        let mut v = self.values.clone();
        v.resize(n + 1, 0.0);
        Self {
            values: v,
            sample_time: self.sample_time,
        }
    }
}

fn check_sample_time(a: &Sequence, b: &Sequence) -> Result<()> {
    let (l, r) = (a.sample_time, b.sample_time);
    if (l - r).abs() > SAMPLE_TIME_RTOL * l.max(r) {
        return Err(Error::SampleTimeMismatch { left: l, right: r });
    }
    Ok(())
}

fn padded(a: &Sequence, b: &Sequence) -> (Vec<f64>, Vec<f64>) {
    let n = a.len().max(b.len());
    let mut x = a.values.clone();
    let mut y = b.values.clone();
    x.resize(n, 0.0);
    y.resize(n, 0.0);
    (x, y)
}

/// Polynomial product, ascending or descending order alike.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_pow(base: &[f64], n: usize) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| poly_mul(&acc, base))
}

fn strip_leading_zeros(c: &[f64]) -> Vec<f64> {
    match c.iter().position(|v| *v != 0.0) {
        Some(i) => c[i..].to_vec(),
        None => vec![0.0],
    }
}

/// Continuous-time rational transfer function, coefficients in descending
/// powers of `s`.
///
/// Improper transfer functions (e.g. a pure differentiator `s`) are accepted:
/// the bilinear map turns them into proper discrete systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousTf {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl ContinuousTf {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidTransferFunction(
                "coefficient lists must be nonempty".into(),
            ));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidTransferFunction(
                "coefficients must be finite".into(),
            ));
        }
        let num = strip_leading_zeros(&num);
        let den = strip_leading_zeros(&den);
        if den[0] == 0.0 {
            return Err(Error::InvalidTransferFunction(
                "denominator is identically zero".into(),
            ));
        }
        Ok(Self { num, den })
    }

    pub fn constant(k: f64) -> Self {
        Self {
            num: vec![k],
            den: vec![1.0],
        }
    }

    /// `s^power` for integer `power` (negative means repeated integrators).
    pub fn integer_power(power: i32) -> Self {
        let mono = |m: u32| {
            let mut c = vec![0.0; m as usize + 1];
            c[0] = 1.0;
            c
        };
        if power >= 0 {
            Self {
                num: mono(power as u32),
                den: vec![1.0],
            }
        } else {
            Self {
                num: vec![1.0],
                den: mono(power.unsigned_abs()),
            }
        }
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.len() <= self.den.len()
    }

    pub fn series(&self, other: &ContinuousTf) -> ContinuousTf {
        ContinuousTf {
            num: poly_mul(&self.num, &other.num),
            den: poly_mul(&self.den, &other.den),
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        horner(&self.num, s) / horner(&self.den, s)
    }

    pub fn freq_response(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    /// Value at `s = 0`, or `None` for a pole at the origin.
    pub fn dc_gain(&self) -> Option<f64> {
        let n = *self.num.last().unwrap();
        let d = *self.den.last().unwrap();
        (d != 0.0).then(|| n / d)
    }
}

fn horner<T>(coeffs: &[f64], x: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<f64, Output = T> + From<f64>,
{
    coeffs.iter().fold(T::from(0.0), |acc, &c| acc * x + c)
}

/// Discrete-time transfer function in difference-equation form
/// `y_k = sum b_i u_{k-i} - sum_{i>=1} a_i y_{k-i}`, with `a_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTf {
    b: Vec<f64>,
    a: Vec<f64>,
    sample_time: f64,
}

impl DiscreteTf {
    /// Builds the transfer function and normalizes `a_0` to one.
    pub fn new(b: Vec<f64>, a: Vec<f64>, sample_time: f64) -> Result<Self> {
        if b.is_empty() || a.is_empty() {
            return Err(Error::InvalidTransferFunction(
                "coefficient lists must be nonempty".into(),
            ));
        }
        if b.iter().chain(&a).any(|c| !c.is_finite()) {
            return Err(Error::InvalidTransferFunction(
                "coefficients must be finite".into(),
            ));
        }
        if !(sample_time.is_finite() && sample_time > 0.0) {
            return Err(Error::InvalidTransferFunction(format!(
                "sample time must be positive, got {sample_time}"
            )));
        }
        let a0 = a[0];
        if a0 == 0.0 {
            return Err(Error::InvalidTransferFunction(
                "leading denominator coefficient is zero (non-causal)".into(),
            ));
        }
        Ok(Self {
            b: b.iter().map(|c| c / a0).collect(),
            a: a.iter().map(|c| c / a0).collect(),
            sample_time,
        })
    }

    pub fn constant(k: f64, sample_time: f64) -> Result<Self> {
        Self::new(vec![k], vec![1.0], sample_time)
    }

    /// Pure `d`-step delay `z^{-d}`.
    pub fn delay(d: usize, sample_time: f64) -> Result<Self> {
        let mut b = vec![0.0; d + 1];
        b[d] = 1.0;
        Self::new(b, vec![1.0], sample_time)
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time
    }

    /// Runs the difference equation from rest over `input`.
    pub fn filter(&self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; input.len()];
        for k in 0..input.len() {
            let mut acc = 0.0;
            for (i, bi) in self.b.iter().enumerate().take(k + 1) {
                acc += bi * input[k - i];
            }
            for (i, ai) in self.a.iter().enumerate().skip(1).take(k) {
                acc -= ai * out[k - i];
            }
            out[k] = acc;
        }
        out
    }

    /// Value at `z`, with polynomials in `z^{-1}`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let q = z.inv();
        let poly = |c: &[f64]| {
            c.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * q + v)
        };
        poly(&self.b) / poly(&self.a)
    }
}

/// Bilinear (Tustin) image of `g` at the given sample time:
/// `s -> (2/T) (1 - z^{-1}) / (1 + z^{-1})`.
pub fn tustin(g: &ContinuousTf, sample_time: f64) -> Result<DiscreteTf> {
    if !(sample_time.is_finite() && sample_time > 0.0) {
        return Err(Error::Discretization(format!(
            "sample time must be positive, got {sample_time}"
        )));
    }
    let order = g.num.len().max(g.den.len()) - 1;
    let c = 2.0 / sample_time;
    // sum_i coef_i * c^i (1 - q)^i (1 + q)^{order - i}, polynomials in q = z^{-1}
    let map = |desc: &[f64]| -> Vec<f64> {
        let mut acc = vec![0.0; order + 1];
        for (i, coef) in desc.iter().rev().enumerate() {
            if *coef == 0.0 {
                continue;
            }
            let term = poly_mul(
                &poly_pow(&[1.0, -1.0], i),
                &poly_pow(&[1.0, 1.0], order - i),
            );
            let scale = coef * c.powi(i as i32);
            for (a, t) in acc.iter_mut().zip(term) {
                *a += scale * t;
            }
        }
        acc
    };
    let b = map(&g.num);
    let a = map(&g.den);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if a[0].abs() <= f64::EPSILON * scale || !a[0].is_finite() {
        return Err(Error::Discretization(format!(
            "denominator vanishes at s = 2/T = {c}"
        )));
    }
    DiscreteTf::new(b, a, sample_time).map_err(|e| Error::Discretization(e.to_string()))
}

/// Roots of a polynomial given in descending powers (Aberth iteration).
pub fn poly_roots(desc: &[f64]) -> Vec<Complex64> {
    let c = strip_leading_zeros(desc);
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    // Zeros at the origin are exact; peel them off first.
    let zeros_at_origin = c.iter().rev().take_while(|v| **v == 0.0).count();
    let c = &c[..c.len() - zeros_at_origin];
    let deg_nz = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if deg_nz == 0 {
        return roots;
    }
    let monic: Vec<f64> = c.iter().map(|v| v / c[0]).collect();
    let dmonic: Vec<f64> = monic[..deg_nz]
        .iter()
        .enumerate()
        .map(|(i, v)| v * (deg_nz - i) as f64)
        .collect();
    // Cauchy bound for the initial circle; the angle offset breaks symmetry.
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..deg_nz)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / deg_nz as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, th)
        })
        .collect();
    let eval = |coef: &[f64], x: Complex64| {
        coef.iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * x + v)
    };
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..deg_nz {
            let p = eval(&monic, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / eval(&dmonic, z[i]);
            let repulsion: Complex64 = (0..deg_nz)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    // A multiple root comes out as a small cluster of size ~eps^(1/m); the
    // cluster mean is well conditioned, so snap members onto it.
    let mut visited = vec![false; deg_nz];
    for i in 0..deg_nz {
        if visited[i] {
            continue;
        }
        let mut members = vec![i];
        let mut k = 0;
        while k < members.len() {
            let a = z[members[k]];
            for j in 0..deg_nz {
                if !visited[j]
                    && !members.contains(&j)
                    && (z[j] - a).norm() <= 1e-4 * a.norm().max(1.0)
                {
                    members.push(j);
                }
            }
            k += 1;
        }
        let m = members.len();
        let mut mean = members.iter().map(|&j| z[j]).sum::<Complex64>() / m as f64;
        if m > 1 {
            // A root of multiplicity m is a simple root of the (m-1)th derivative.
            let mut d = monic.clone();
            for _ in 1..m {
                let len = d.len() - 1;
                d = d[..len]
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (len - i) as f64)
                    .collect();
            }
            let len = d.len() - 1;
            let dd: Vec<f64> = d[..len]
                .iter()
                .enumerate()
                .map(|(i, v)| v * (len - i) as f64)
                .collect();
            for _ in 0..50 {
                let step = eval(&d, mean) / eval(&dd, mean);
                if !step.is_finite() {
                    break;
                }
                mean -= step;
                if step.norm() <= 1e-16 * mean.norm().max(1.0) {
                    break;
                }
            }
        }
        for &j in &members {
            visited[j] = true;
            z[j] = mean;
        }
    }
    roots.extend(z);
    roots
}

/// Real first- and second-order factors (monic, descending powers) whose
/// product is the monic version of `desc`.
fn real_factors(desc: &[f64]) -> Vec<Vec<f64>> {
    let mut roots = poly_roots(desc);
    let mut out = Vec::new();
    while let Some(i) = (0..roots.len()).max_by(|&a, &b| roots[a].im.total_cmp(&roots[b].im)) {
        let r = roots.swap_remove(i);
        let tol = 1e-7 * r.norm().max(1.0);
        if r.im > tol && !roots.is_empty() {
            let j = (0..roots.len())
                .min_by(|&a, &b| {
                    (roots[a] - r.conj())
                        .norm()
                        .total_cmp(&(roots[b] - r.conj()).norm())
                })
                .unwrap();
            let q = roots.swap_remove(j);
            let re = 0.5 * (r.re + q.re);
            let im = 0.5 * (r.im - q.im);
            out.push(vec![1.0, -2.0 * re, re * re + im * im]);
        } else {
            out.push(vec![1.0, -r.re]);
        }
    }
    out
}

/// Splits `g` into a series of sections of order at most two.
///
/// Each denominator factor takes numerator factors up to its own degree;
/// leftover numerator factors form their own (improper) sections. The overall
/// gain sits in the first section.
pub fn factor_sections(g: &ContinuousTf) -> Vec<ContinuousTf> {
    let gain = g.num[0] / g.den[0];
    let mut nums = real_factors(&g.num);
    let dens = real_factors(&g.den);
    let mut sections = Vec::with_capacity(dens.len().max(1));
    for d in dens {
        let mut n = vec![1.0];
        while let Some(pos) = nums.iter().position(|f| n.len() + f.len() - 2 < d.len()) {
            n = poly_mul(&n, &nums.swap_remove(pos));
        }
        sections.push(ContinuousTf { num: n, den: d });
    }
    for n in nums {
        sections.push(ContinuousTf {
            num: n,
            den: vec![1.0],
        });
    }
    match sections.first_mut() {
        Some(first) => first.num.iter_mut().for_each(|v| *v *= gain),
        None => sections.push(ContinuousTf::constant(gain)),
    }
    sections
}

/// Tustin image of `g` as a cascade of low-order sections.
///
/// Mathematically the same system as [`tustin`], but a single high-order
/// polynomial in `z^{-1}` with poles clustered near `z = 1` loses most of its
/// significant digits (e.g. the DC gain), while the factored form does not.
pub fn tustin_factored(g: &ContinuousTf, sample_time: f64) -> Result<Vec<DiscreteTf>> {
    factor_sections(g)
        .iter()
        .map(|s| tustin(s, sample_time))
        .collect()
}

/// Impulse response `g_0..g_n` obtained by running the recursion on a unit impulse.
pub fn impulse_response(g: &DiscreteTf, n: usize) -> Sequence {
    let mut delta = vec![0.0; n + 1];
    delta[0] = 1.0;
    Sequence {
        values: g.filter(&delta),
        sample_time: g.sample_time,
    }
}

/// Impulse response of a series connection, computed by passing the impulse
/// through each section in turn.
pub fn cascade_impulse_response(sections: &[DiscreteTf], n: usize, sample_time: f64) -> Sequence {
    let mut v = vec![0.0; n + 1];
    v[0] = 1.0;
    for s in sections {
        v = s.filter(&v);
    }
    Sequence {
        values: v,
        sample_time,
    }
}

/// Truncated convolution `r_k = sum_{i=0..k} a_i b_{k-i}`.
pub fn conv_trunc(a: &Sequence, b: &Sequence) -> Result<Sequence> {
    check_sample_time(a, b)?;
    let (x, y) = padded(a, b);
    let n = x.len();
    let mut out = vec![0.0; n];
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0.0 {
            continue;
        }
        for (o, yj) in out[i..].iter_mut().zip(&y) {
            *o += xi * yj;
        }
    }
    finite(out, a.sample_time)
}

/// Solves `conv_trunc(a, x) = b` by forward substitution on the
/// lower-triangular Toeplitz system. Fails when `a_0 == 0`.
pub fn deconvolve(a: &Sequence, b: &Sequence) -> Result<Sequence> {
    deconvolve_guarded(a, b, 0.0)
}

/// As [`deconvolve`], but rejects `|a_0| <= threshold`.
///
/// Exactly-solvable systems whose inverse is unstable are solved anyway; the
/// result may grow over the horizon and is rejected only if it overflows.
pub fn deconvolve_guarded(a: &Sequence, b: &Sequence, threshold: f64) -> Result<Sequence> {
    check_sample_time(a, b)?;
    let sample_time = a.sample_time;
    let (a, b) = padded(a, b);
    let a0 = a[0];
    if a0 == 0.0 || a0.abs() <= threshold || !a0.is_finite() {
        return Err(Error::Singular {
            leading: a0,
            threshold,
        });
    }
    let n = a.len();
    let mut x = vec![0.0; n];
    for k in 0..n {
        let mut acc = b[k];
        for (ai, xj) in a[1..=k].iter().zip(x[..k].iter().rev()) {
            acc -= ai * xj;
        }
        let v = acc / a0;
        if !v.is_finite() {
            return Err(Error::NonFinite(k));
        }
        x[k] = v;
    }
    Ok(Sequence {
        values: x,
        sample_time,
    })
}

/// Truncated impulse response of `T = PC / (1 + PC)` from the impulse
/// responses of plant and controller: solves `(delta + g) * t = g` with
/// `g = p * c`.
pub fn closed_loop_impulse(p_imp: &Sequence, c_imp: &Sequence) -> Result<Sequence> {
    let g = conv_trunc(p_imp, c_imp)?;
    let g0 = g.values[0];
    let lead = 1.0 + g0;
    if lead.abs() <= 16.0 * f64::EPSILON * g0.abs().max(1.0) {
        return Err(Error::AlgebraicLoop(lead));
    }
    let mut sens = g.values.clone();
    sens[0] = lead;
    let sens = Sequence {
        values: sens,
        sample_time: g.sample_time,
    };
    deconvolve(&sens, &g)
}

/// Step response `y_k = r0 * sum_{i<=k} t_i` of a system with impulse response `t`.
pub fn step_response_from_t(t: &Sequence, r0: f64) -> Sequence {
    let mut acc = 0.0;
    let values = t
        .values
        .iter()
        .map(|v| {
            acc += v;
            r0 * acc
        })
        .collect();
    Sequence {
        values,
        sample_time: t.sample_time,
    }
}

fn finite(values: Vec<f64>, sample_time: f64) -> Result<Sequence> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    Ok(Sequence {
        values,
        sample_time,
    })
}
