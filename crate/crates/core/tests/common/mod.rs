//! Shared generators and independent oracles for the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pellip_core::bellman::{bellman_value, BellmanParams};
use pellip_core::realform::{CMatrix, CVector, RMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Positive Hermitian part plus a skew-Hermitian part of random size, so that
/// `Delta_p` takes both signs across a sample.
pub fn random_accretive(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n);
    let herm = &g * g.adjoint() / c(n as f64, 0.0) + CMatrix::identity(n, n) * c(0.2, 0.0);
    let k = gaussian_matrix(rng, n);
    let skew = (&k - k.adjoint()) * c(0.5 * rng.gen_range(0.0..2.0), 0.0);
    herm + skew
}

/// Real matrix with positive definite symmetric part.
pub fn random_real_pd(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let k = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let s = &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * 0.2;
    let m = s + (&k - k.transpose()) * 0.5;
    m.map(|x| c(x, 0.0))
}

/// Central second differences of a scalar function of four real variables.
pub fn fd_hessian<F: Fn(&[f64; 4]) -> f64>(f: F, x: [f64; 4], h: f64) -> RMatrix {
    let mut out = RMatrix::zeros(4, 4);
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut y = x;
        y[di] += si * h;
        y[dj] += sj * h;
        f(&y)
    };
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0)) / (4.0 * h * h);
        }
    }
    out
}

/// Hessian of `Q` from values alone.
pub fn bellman_fd_hessian(params: &BellmanParams, zeta: Complex64, eta: Complex64, h: f64) -> RMatrix {
    fd_hessian(|y| bellman_value(params, c(y[0], y[1]), c(y[2], y[3])), [zeta.re, zeta.im, eta.re, eta.im], h)
}

/// Pass/fail record for one checked property.
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}
