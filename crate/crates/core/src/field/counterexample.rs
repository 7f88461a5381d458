//! The piecewise constant skew field on the cone `|x1| >= |x2|` that is
//! elliptic for every `p` yet fails `L^p`-dissipativity for large `p`.

use rayon::prelude::*;

use super::dissipativity::dissipativity_functional;
use super::grid::{Grid, GridFunction, MatrixField};
use crate::error::{Error, Result};
use crate::realform::c;
use std::f64::consts::PI;

/// Cell-integrated pieces of the polar decomposition of the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarTerms {
    /// `(p-1) int r^(p-2) |grad r|^2`.
    pub radial: f64,
    /// `int r^p |grad phi|^2`.
    pub angular: f64,
    /// `int w J(r^p, phi)` with `w = -gamma` on the cone and 0 off it.
    pub jacobian: f64,
}

impl PolarTerms {
    pub fn sum(&self) -> f64 {
        self.radial + self.angular + self.jacobian
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleReport {
    pub p: f64,
    pub gamma: f64,
    /// Functional with exact gradients, integrated with [`SUBCELLS`] midpoints per
    /// axis in each cell and the coefficient taken at each point.
    pub value: f64,
    /// Functional with grid differences of the sampled function, coefficient
    /// assigned per cell by its centre.
    pub fd_value: f64,
    pub terms: PolarTerms,
    /// `|value - terms.sum()| / max(|value|, tiny)`.
    pub relative_gap: f64,
}

/// `f = exp(-pi |x|^2 - i p x1 x2)`.
pub fn section7_function(grid: &Grid, p: f64) -> GridFunction {
    GridFunction::sample(grid, |x| (c(-PI * (x[0] * x[0] + x[1] * x[1]), -p * x[0] * x[1])).exp())
}

fn validate(p: f64, gamma: f64, grid: &Grid) -> Result<()> {
    if !(p.is_finite() && p > 2.0) {
        return Err(Error::InvalidExponent { p, reason: "the counterexample needs p > 2" });
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::OutOfRange(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    if grid.dim() != 2 {
        return Err(Error::Dimension("the counterexample needs a 2-D grid".into()));
    }
    if grid.extent() < 4.0 {
        return Err(Error::OutOfRange(format!("extent must be at least 4, got {}", grid.extent())));
    }
    Ok(())
}

/// Sub-points per axis in each cell for the exact-gradient quadrature. The
/// integrand for large `p` spans a few cells and has a kink on the cone edge,
/// so centre sampling alone is too coarse there.
pub const SUBCELLS: usize = 16;

/// Integrals that are independent of `gamma`; the functional is affine in it.
#[derive(Default, Clone, Copy)]
struct Moments {
    /// `Re int <grad f, grad g>` for `A = I`.
    direct_identity: f64,
    /// `Re int chi_E <-i R grad f, grad g>`.
    direct_skew: f64,
    radial: f64,
    angular: f64,
    /// `int chi_E J(r^p, phi)`.
    jacobian_cone: f64,
}

impl std::ops::Add for Moments {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            direct_identity: self.direct_identity + o.direct_identity,
            direct_skew: self.direct_skew + o.direct_skew,
            radial: self.radial + o.radial,
            angular: self.angular + o.angular,
            jacobian_cone: self.jacobian_cone + o.jacobian_cone,
        }
    }
}

fn point_moments(p: f64, x1: f64, x2: f64) -> Moments {
    let rho2 = x1 * x1 + x2 * x2;
    let f = c(-PI * rho2, -p * x1 * x2).exp();
    let df = [f * c(-2.0 * PI * x1, -p * x2), f * c(-2.0 * PI * x2, -p * x1)];
    // |f|^(p-2) f = exp(-(p-1) pi |x|^2 - i p x1 x2)
    let g = c(-(p - 1.0) * PI * rho2, -p * x1 * x2).exp();
    let dg = [g * c(-2.0 * (p - 1.0) * PI * x1, -p * x2), g * c(-2.0 * (p - 1.0) * PI * x2, -p * x1)];
    let cone = x1.abs() >= x2.abs();
    let direct_identity = (df[0] * dg[0].conj() + df[1] * dg[1].conj()).re;
    // -i R with R = [[0, -1], [1, 0]]
    let rdf = [c(0.0, 1.0) * df[1], c(0.0, -1.0) * df[0]];
    let direct_skew = if cone { (rdf[0] * dg[0].conj() + rdf[1] * dg[1].conj()).re } else { 0.0 };

    let r = (-PI * rho2).exp();
    let rp = r.powf(p);
    let grad_r2 = (2.0 * PI * r).powi(2) * rho2;
    let grad_phi = [-p * x2, -p * x1];
    let grad_rp = [-2.0 * PI * p * x1 * rp, -2.0 * PI * p * x2 * rp];
    let jac = grad_rp[0] * grad_phi[1] - grad_rp[1] * grad_phi[0];
    Moments {
        direct_identity,
        direct_skew,
        radial: (p - 1.0) * r.powf(p - 2.0) * grad_r2,
        angular: rp * (grad_phi[0].powi(2) + grad_phi[1].powi(2)),
        jacobian_cone: if cone { jac } else { 0.0 },
    }
}

fn moments(p: f64, grid: &Grid) -> Moments {
    let n = grid.cells_per_axis();
    let h = grid.spacing();
    let sub = h / SUBCELLS as f64;
    // Row sums first, then a fixed-order total, so results do not depend on scheduling.
    let rows: Vec<Moments> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = Moments::default();
            for i in 0..n {
                let centre = grid.center(j * n + i);
                for b in 0..SUBCELLS {
                    let x2 = centre[1] - 0.5 * h + (b as f64 + 0.5) * sub;
                    for a in 0..SUBCELLS {
                        let x1 = centre[0] - 0.5 * h + (a as f64 + 0.5) * sub;
                        acc = acc + point_moments(p, x1, x2);
                    }
                }
            }
            acc
        })
        .collect();
    let total = rows.into_iter().fold(Moments::default(), |a, b| a + b);
    let w = sub * sub;
    Moments {
        direct_identity: total.direct_identity * w,
        direct_skew: total.direct_skew * w,
        radial: total.radial * w,
        angular: total.angular * w,
        jacobian_cone: total.jacobian_cone * w,
    }
}

fn report(p: f64, gamma: f64, grid: &Grid, m: &Moments) -> Result<CounterexampleReport> {
    let field = MatrixField::section7(grid, gamma)?;
    let terms = PolarTerms { radial: m.radial, angular: m.angular, jacobian: -gamma * m.jacobian_cone };
    let value = m.direct_identity + gamma * m.direct_skew;
    let fd_value = dissipativity_functional(&field, &section7_function(grid, p), p)?.value;
    let relative_gap = (value - terms.sum()).abs() / value.abs().max(f64::MIN_POSITIVE);
    Ok(CounterexampleReport { p, gamma, value, fd_value, terms, relative_gap })
}

/// Evaluates the functional for `A = I - i gamma chi_E R` and the section's test
/// function, together with its polar decomposition.
pub fn counterexample_section7(p: f64, gamma: f64, grid: &Grid) -> Result<CounterexampleReport> {
    validate(p, gamma, grid)?;
    report(p, gamma, grid, &moments(p, grid))
}

/// Runs [`counterexample_section7`] for each `gamma`, in input order.
pub fn gamma_scan(p: f64, gammas: &[f64], grid: &Grid) -> Result<Vec<CounterexampleReport>> {
    for &g in gammas {
        validate(p, g, grid)?;
    }
    let m = moments(p, grid);
    gammas.iter().map(|&g| report(p, g, grid, &m)).collect()
}

/// Inclusive arithmetic range `start, start + step, ...` up to `stop` (with a
/// small tolerance so decimal steps land on the endpoint).
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(Error::OutOfRange(format!("bad range {start}:{stop}:{step}")));
    }
    let intervals = ((stop - start) / step + 1e-9).floor();
    if !(intervals < 1_000_000.0) {
        return Err(Error::OutOfRange(format!("range {start}:{stop}:{step} has too many points")));
    }
    let count = intervals as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Polar integration over the plane: the radial moments are 1/(p^2 pi) and the
    // cone contributes twice the integral of cos(2 theta) over (-pi/4, pi/4).
    fn continuum(p: f64, gamma: f64) -> f64 {
        (4.0 * PI * PI * (p - 1.0) / (p * p) + 1.0 - 2.0 * gamma) / PI
    }

    fn grid(n: usize) -> Grid {
        Grid::periodic(2, n, 4.0).unwrap()
    }

    #[test]
    fn matches_continuum_value() {
        let g = grid(256);
        for (p, gamma) in [(40.0, 0.9), (40.0, 0.99), (4.0, 0.5), (10.0, 0.0)] {
            let r = counterexample_section7(p, gamma, &g).unwrap();
            assert!((r.value - continuum(p, gamma)).abs() < 1e-4 * gamma.max(0.1), "{p} {gamma}: {} vs {}", r.value, continuum(p, gamma));
            assert!(r.relative_gap < 1e-10);
        }
    }

    #[test]
    fn sign_change_near_one() {
        let g = grid(256);
        let gammas = linspace_step(0.5, 0.99, 0.01).unwrap();
        assert_eq!(gammas.len(), 50);
        let scan = gamma_scan(40.0, &gammas, &g).unwrap();
        assert!(scan[0].value > 0.0);
        assert!(scan.last().unwrap().value < 0.0);
        assert!(scan.windows(2).all(|w| w[1].value < w[0].value));
    }

    #[test]
    fn real_coefficients_give_positive_value() {
        let r = counterexample_section7(3.0, 0.0, &grid(128)).unwrap();
        assert_eq!(r.terms.jacobian, 0.0);
        assert!(r.value > 0.0 && r.fd_value > 0.0);
    }

    #[test]
    fn fd_value_tracks_exact_value_for_moderate_p() {
        let r = counterexample_section7(4.0, 0.5, &grid(256)).unwrap();
        assert!((r.fd_value - r.value).abs() < 1e-2 * r.value, "{} vs {}", r.fd_value, r.value);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(counterexample_section7(2.0, 0.5, &grid(64)).is_err());
        assert!(counterexample_section7(4.0, 1.0, &grid(64)).is_err());
        assert!(counterexample_section7(4.0, 0.5, &Grid::periodic(2, 64, 3.0).unwrap()).is_err());
        assert!(counterexample_section7(4.0, 0.5, &Grid::periodic(1, 64, 4.0).unwrap()).is_err());
        assert!(linspace_step(1.0, 0.0, 0.1).is_err());
    }
}
