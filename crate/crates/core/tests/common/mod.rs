//! Independent oracles shared by the integration tests: a sample-by-sample
//! closed-loop simulator built on difference equations, and a dense linear
//! solver. Neither goes through the library's Toeplitz algebra.

#![allow(dead_code)]

use fotune::frac::{fopid_discrete, FoPidController};
use fotune::lti::{tustin_factored, ContinuousTf, DiscreteTf};
use fotune::{DataRecord, FoPidParams, OustaloupConfig, Sequence};
use rand::Rng;

/// Transposed direct-form II filter with explicit state.
#[derive(Clone)]
pub struct Df2t {
    b: Vec<f64>,
    a: Vec<f64>,
    state: Vec<f64>,
}

impl Df2t {
    pub fn new(tf: &DiscreteTf) -> Self {
        let order = tf.b().len().max(tf.a().len());
        let mut b = tf.b().to_vec();
        let mut a = tf.a().to_vec();
        b.resize(order, 0.0);
        a.resize(order, 0.0);
        Self {
            b,
            a,
            state: vec![0.0; order.saturating_sub(1)],
        }
    }

    /// Output is `b0 * x + offset()` for the next input `x`.
    fn offset(&self) -> f64 {
        self.state.first().copied().unwrap_or(0.0)
    }

    fn step(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.offset();
        let m = self.state.len();
        for i in 0..m {
            let next = if i + 1 < m { self.state[i + 1] } else { 0.0 };
            self.state[i] = next + self.b[i + 1] * x - self.a[i + 1] * y;
        }
        y
    }
}

/// Cascade of sections scaled by a gain.
#[derive(Clone)]
pub struct Chain {
    gain: f64,
    sections: Vec<Df2t>,
}

impl Chain {
    pub fn new(gain: f64, sections: &[DiscreteTf]) -> Self {
        Self {
            gain,
            sections: sections.iter().map(Df2t::new).collect(),
        }
    }

    /// `(slope, offset)` of the output as an affine function of the next input.
    fn affine(&self) -> (f64, f64) {
        let (mut g, mut h) = (1.0, 0.0);
        for s in &self.sections {
            g *= s.b[0];
            h = s.b[0] * h + s.offset();
        }
        (self.gain * g, self.gain * h)
    }

    fn step(&mut self, x: f64) -> f64 {
        let mut v = x;
        for s in &mut self.sections {
            v = s.step(v);
        }
        self.gain * v
    }
}

/// Unity-feedback loop `u = C (r - y)`, `y = P u`, simulated sample by sample.
/// The algebraic loop from direct feedthrough is solved exactly at each step.
pub fn simulate_loop(
    plant: &[DiscreteTf],
    controller: &FoPidController,
    r: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut p = Chain::new(1.0, plant);
    let mut c: Vec<Chain> = controller
        .branches
        .iter()
        .map(|b| Chain::new(b.gain, &b.sections))
        .collect();
    let mut u = Vec::with_capacity(r.len());
    let mut y = Vec::with_capacity(r.len());
    for &rk in r {
        let (gp, hp) = p.affine();
        let (gc, hc) = c
            .iter()
            .map(Chain::affine)
            .fold((0.0, 0.0), |(a, b), (g, h)| (a + g, b + h));
        let uk = (gc * (rk - hp) + hc) / (1.0 + gc * gp);
        let yk = p.step(uk);
        let ek = rk - yk;
        let check: f64 = c.iter_mut().map(|ch| ch.step(ek)).sum();
        debug_assert!((check - uk).abs() <= 1e-6 * (1.0 + uk.abs()));
        u.push(uk);
        y.push(yk);
    }
    (u, y)
}

/// Third-order test plant `6 / ((s+1)(s+2)(s+3))`.
pub fn third_order() -> ContinuousTf {
    ContinuousTf::new(
        vec![6.0],
        fotune::lti::poly_mul(
            &fotune::lti::poly_mul(&[1.0, 1.0], &[1.0, 2.0]),
            &[1.0, 3.0],
        ),
    )
    .unwrap()
}

pub fn discretize(g: &ContinuousTf, ts: f64) -> Vec<DiscreteTf> {
    tustin_factored(g, ts).unwrap()
}

pub fn controller(phi: &FoPidParams, ts: f64, n: usize) -> FoPidController {
    fopid_discrete(phi, &OustaloupConfig::default(), ts, n).unwrap()
}

/// Closed-loop step experiment under `phi0`, recorded by the independent simulator.
pub fn record(plant: &[DiscreteTf], phi0: &FoPidParams, r0: f64, n: usize) -> DataRecord {
    let ts = plant[0].sample_time();
    let (u, y) = simulate_loop(plant, &controller(phi0, ts, n), &vec![r0; n + 1]);
    DataRecord::new(
        Sequence::new(u, ts).unwrap(),
        Sequence::new(y, ts).unwrap(),
        "oracle simulation",
    )
    .unwrap()
}

/// Uniform draw from the default search box.
pub fn random_phi<R: Rng>(rng: &mut R) -> FoPidParams {
    FoPidParams::new(
        rng.random_range(0.0..10.0),
        rng.random_range(0.0..10.0),
        rng.random_range(0.0..10.0),
        rng.random_range(0.0..2.0),
        rng.random_range(0.0..2.0),
    )
}

/// Gaussian elimination with partial pivoting on the full matrix.
pub fn dense_solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                let (top, bottom) = m.split_at_mut(row);
                for (a, b) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *a -= f * b;
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    x
}

/// Dense lower-triangular Toeplitz matrix with first column `a`.
pub fn toeplitz(a: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if j <= i { a[i - j] } else { 0.0 })
                .collect()
        })
        .collect()
}

pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}
