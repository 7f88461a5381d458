//! The `L^p` operator norm of the heat semigroup at complex time `t e^{i phi}`:
//! closed form, a Gaussian-optimization oracle and tensorization to `R^n`.

use num_complex::Complex64;

use crate::error::{check_exponent_gt1, Error, Result};
use crate::optim::nelder_mead;
use std::f64::consts::FRAC_PI_2;

/// Optimal angle `arccos |1 - 2/p|`.
pub fn phi_p(p: f64) -> Result<f64> {
    check_exponent_gt1(p)?;
    Ok((1.0 - 2.0 / p).abs().acos())
}

fn check_angle(phi: f64) -> Result<()> {
    if !(phi.is_finite() && phi.abs() < FRAC_PI_2) {
        return Err(Error::OutOfRange(format!("angle must satisfy |phi| < pi/2, got {phi}")));
    }
    Ok(())
}

/// The one-dimensional norm `C(phi, p)`, for `p` in `[1, inf]`.
pub fn heat_norm_constant(phi: f64, p: f64) -> Result<f64> {
    check_angle(phi)?;
    if p == 1.0 || p == f64::INFINITY {
        return Ok(phi.cos().powf(-0.5));
    }
    check_exponent_gt1(p)?;
    let sigma = (1.0 - 2.0 / p).abs();
    if phi.abs() <= sigma.acos() {
        return Ok(1.0);
    }
    let gamma = ((sigma * sigma - phi.cos().powi(2)).max(0.0)).sqrt() / phi.sin().abs();
    let c4 = (1.0 - gamma) / (1.0 + gamma) * ((sigma + gamma) / (sigma - gamma)).powf(sigma);
    Ok(c4.powf(0.25))
}

/// `||P_z g_a||_p / ||g_a||_p` for `g_a = exp(-a x^2)` and `z = t e^{i phi}`.
/// The image is `(1 + 4za)^{-1/2} exp(-b x^2)` with `b = a / (1 + 4za)`.
pub fn gaussian_ratio(phi: f64, p: f64, t: f64, a: Complex64) -> f64 {
    let z = Complex64::from_polar(t, phi);
    let d = 1.0 + 4.0 * z * a;
    let b = a / d;
    d.norm().powf(-0.5) * (a.re / b.re).powf(1.0 / (2.0 * p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// Maximizing Gaussian parameter.
    pub a: Complex64,
    pub converged: bool,
}

const SLOPES: [f64; 13] = [0.0, 1.0, -1.0, 3.0, -3.0, 10.0, -10.0, 30.0, -30.0, 100.0, -100.0, 300.0, -300.0];

/// Maximizes [`gaussian_ratio`] over `a = e^s (1 + i tau)`. A coarse scan picks
/// starting points for Nelder-Mead; the limit `a -> 0` (ratio 1) is a candidate.
pub fn gaussian_oracle(phi: f64, p: f64, t: f64) -> Result<OracleValue> {
    check_angle(phi)?;
    check_exponent_gt1(p)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("time must be positive, got {t}")));
    }
    let shift = -t.ln();
    let to_a = |x: &[f64]| Complex64::new(1.0, x[1]) * (x[0] + shift).exp();
    let objective = |x: &[f64]| {
        let r = gaussian_ratio(phi, p, t, to_a(x));
        if r.is_finite() {
            -r
        } else {
            f64::INFINITY
        }
    };

    let mut starts: Vec<(f64, [f64; 2])> = Vec::new();
    for s in -10..=4 {
        for tau in SLOPES {
            let x = [s as f64, tau];
            starts.push((objective(&x), x));
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let tiny = [-40.0, 0.0];
    let mut best = OracleValue { value: -objective(&tiny), a: to_a(&tiny), converged: true };
    for (_, x0) in starts.iter().take(4) {
        let m = nelder_mead(&objective, x0, 0.5, 1e-13, 5_000);
        if -m.value > best.value {
            best = OracleValue { value: -m.value, a: to_a(&m.x), converged: m.converged };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatNormResult {
    pub phi: f64,
    pub p: f64,
    pub c: f64,
    pub oracle: f64,
    pub n: u32,
    /// `C^n`, the norm on `R^n`.
    pub c_pow_n: f64,
    /// `C^n / 2`, a lower bound for the bilinear embedding constant of the pair
    /// `(e^{i phi} I_n, e^{-i phi} I_n)`.
    pub n_p_lower: f64,
    pub diverges: bool,
}

/// Norm in dimension `n` and the induced lower bound for the embedding constant.
pub fn tensorized_demo(phi: f64, p: f64, n: u32) -> Result<HeatNormResult> {
    if n == 0 {
        return Err(Error::OutOfRange("dimension must be at least 1".into()));
    }
    let c = heat_norm_constant(phi, p)?;
    let oracle = gaussian_oracle(phi, p, 1.0)?.value;
    let c_pow_n = c.powi(n as i32);
    Ok(HeatNormResult { phi, p, c, oracle, n, c_pow_n, n_p_lower: 0.5 * c_pow_n, diverges: c > 1.0 })
}

/// Smallest `n <= n_max` with `C^n / 2 > threshold`.
pub fn first_dimension_exceeding(phi: f64, p: f64, threshold: f64, n_max: u32) -> Result<Option<u32>> {
    let c = heat_norm_constant(phi, p)?;
    Ok((1..=n_max).find(|&n| 0.5 * c.powi(n as i32) > threshold))
}
