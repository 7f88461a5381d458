//! Derivative-free minimization used by the sampling oracles.
//!
//! These are deliberately independent of the eigenvalue reductions in
//! [`crate::ellipticity`]; the two routes are compared against each other in tests.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Objective<'a, F: Fn(&[f64]) -> f64>(&'a F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, ArgminError> {
        let v = (self.0)(x);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// Nelder–Mead from an axis-aligned simplex of edge `step` around `x0`.
pub fn nelder_mead<F>(f: &F, x0: &[f64], step: f64, tol: f64, max_iters: u64) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(tol)
        .expect("tolerance is non-negative");
    let res = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run();
    match res {
        Ok(r) => {
            let st = r.state();
            Minimum {
                x: st.get_best_param().cloned().unwrap_or_else(|| x0.to_vec()),
                value: st.get_best_cost(),
                iterations: st.get_iter(),
                converged: st.get_iter() < max_iters,
            }
        }
        Err(_) => Minimum { x: x0.to_vec(), value: f(x0), iterations: 0, converged: false },
    }
}

/// Repeated Nelder–Mead with shrinking simplex; each restart begins at the
/// previous best point. Restarting recovers from premature simplex collapse.
pub fn nelder_mead_restarts<F>(f: &F, x0: &[f64], step: f64, tol: f64, restarts: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = nelder_mead(f, x0, step, tol, 4000);
    let mut s = step;
    for _ in 0..restarts {
        s *= 0.3;
        let next = nelder_mead(f, &best.x, s.max(1e-6), tol, 4000);
        if next.value <= best.value {
            best = next;
        }
    }
    best
}

/// Seed points on the unit sphere of `R^dim`.
///
/// For `dim = 2` the points are equally spaced on the circle, for `dim = 3`
/// they form a Fibonacci lattice, and in higher dimension they are normalized
/// Gaussian draws from a seeded generator.
pub fn sphere_seeds(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let y = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - y * y).sqrt();
                    let th = golden * k as f64;
                    vec![r * th.cos(), y, r * th.sin()]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    normalize(&v)
                })
                .collect()
        }
    }
}

pub fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        let mut e = vec![0.0; v.len()];
        if let Some(first) = e.first_mut() {
            *first = 1.0;
        }
        return e;
    }
    v.iter().map(|x| x / n).collect()
}

/// Minimum of `f` over the unit sphere of `R^dim`: evaluate on seeds, then
/// refine the `refine` best seeds with Nelder–Mead on the radial projection.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    pub seeds: usize,
    pub refine: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SphereSampler {
    fn default() -> Self {
        Self { seeds: 400, refine: 6, tol: 1e-8, seed: 0x5eed }
    }
}

impl SphereSampler {
    pub fn minimize<F>(&self, dim: usize, f: F) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let projected = |x: &[f64]| f(&normalize(x));
        let mut scored: Vec<(f64, Vec<f64>)> =
            sphere_seeds(dim, self.seeds, self.seed).into_iter().map(|s| (f(&s), s)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = Minimum { x: scored[0].1.clone(), value: scored[0].0, iterations: 0, converged: false };
        for (_, s) in scored.iter().take(self.refine) {
            let m = nelder_mead_restarts(&projected, s, 0.2, self.tol * 1e-4, 3);
            if m.value < best.value {
                best = Minimum { x: normalize(&m.x), ..m };
            }
        }
        best
    }
}
