//! Box-constrained particle swarm optimization (global-best topology).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidBounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::InvalidBounds("zero-dimensional box".into()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite()) || l > u {
                return Err(Error::InvalidBounds(format!(
                    "dimension {i}: need finite lower <= upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| (*l..=*u).contains(v))
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub population: usize,
    pub max_evaluations: usize,
    pub seed: u64,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Evaluate particles concurrently. Results are identical either way since
    /// every evaluation is independent and the reduction is done in index order.
    pub parallel: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            population: 150,
            max_evaluations: 45_000,
            seed: 0,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Config("pso population must be at least 2".into()));
        }
        if self.max_evaluations < self.population {
            return Err(Error::Config(format!(
                "pso max_evaluations ({}) must be at least the population ({})",
                self.max_evaluations, self.population
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub evaluations: usize,
    pub best_f: f64,
    pub best_x: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub entries: Vec<TraceEntry>,
}

impl OptimizationTrace {
    pub fn evaluations(&self) -> usize {
        self.entries.last().map_or(0, |e| e.evaluations)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub trace: OptimizationTrace,
}

/// NaN never wins a comparison.
fn better(a: f64, b: f64) -> bool {
    !a.is_nan() && (b.is_nan() || a < b)
}

fn evaluate<F>(f: &F, xs: &[Vec<f64>], parallel: bool) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return xs.par_iter().map(|x| f(x)).collect();
    }
    let _ = parallel;
    xs.iter().map(|x| f(x)).collect()
}

/// Minimizes `objective` over `bounds`.
///
/// `initial` points (clamped into the box) replace the first particles of the
/// random initial swarm, so the result is never worse than any of them.
pub fn pso_minimize<F>(
    objective: F,
    bounds: &Bounds,
    cfg: &PsoConfig,
    initial: &[Vec<f64>],
) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let dim = bounds.dim();
    if let Some(p) = initial.iter().find(|p| p.len() != dim) {
        return Err(Error::InvalidBounds(format!(
            "initial point has dimension {}, bounds have {dim}",
            p.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let range: Vec<f64> = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(l, u)| u - l)
        .collect();

    if bounds.is_degenerate() {
        let x = bounds.lower.clone();
        let f = objective(&x);
        return Ok(PsoResult {
            best_x: x.clone(),
            best_f: f,
            trace: OptimizationTrace {
                entries: vec![TraceEntry {
                    iteration: 0,
                    evaluations: 1,
                    best_f: f,
                    best_x: x,
                }],
            },
        });
    }

    let pop = cfg.population;
    let mut pos: Vec<Vec<f64>> = (0..pop)
        .map(|i| match initial.get(i) {
            Some(p) => {
                let mut p = p.clone();
                bounds.clamp(&mut p);
                p
            }
            None => (0..dim)
                .map(|d| bounds.lower[d] + rng.random::<f64>() * range[d])
                .collect(),
        })
        .collect();
    let mut vel: Vec<Vec<f64>> = (0..pop)
        .map(|_| {
            (0..dim)
                .map(|d| 0.2 * range[d] * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        })
        .collect();

    let mut fit = evaluate(&objective, &pos, cfg.parallel);
    let mut evaluations = pop;
    let mut pbest = pos.clone();
    let mut pbest_f = fit.clone();
    let mut gbest = 0;
    for i in 1..pop {
        if better(pbest_f[i], pbest_f[gbest]) {
            gbest = i;
        }
    }
    let mut best_x = pbest[gbest].clone();
    let mut best_f = pbest_f[gbest];
    let mut trace = OptimizationTrace {
        entries: vec![TraceEntry {
            iteration: 0,
            evaluations,
            best_f,
            best_x: best_x.clone(),
        }],
    };

    let mut iteration = 0;
    while evaluations + pop <= cfg.max_evaluations {
        iteration += 1;
        for i in 0..pop {
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let mut v = cfg.inertia * vel[i][d]
                    + cfg.cognitive * r1 * (pbest[i][d] - pos[i][d])
                    + cfg.social * r2 * (best_x[d] - pos[i][d]);
                v = v.clamp(-range[d], range[d]);
                let mut x = pos[i][d] + v;
                if x < bounds.lower[d] || x > bounds.upper[d] {
                    x = x.clamp(bounds.lower[d], bounds.upper[d]);
                    v = 0.0;
                }
                pos[i][d] = x;
                vel[i][d] = v;
            }
        }
        fit = evaluate(&objective, &pos, cfg.parallel);
        evaluations += pop;
        for i in 0..pop {
            if better(fit[i], pbest_f[i]) {
                pbest_f[i] = fit[i];
                pbest[i].clone_from(&pos[i]);
                if better(fit[i], best_f) {
                    best_f = fit[i];
                    best_x.clone_from(&pos[i]);
                }
            }
        }
        trace.entries.push(TraceEntry {
            iteration,
            evaluations,
            best_f,
            best_x: best_x.clone(),
        });
    }

    Ok(PsoResult {
        best_x,
        best_f,
        trace,
    })
}
