//! The `L^p`-dissipativity functional and discrete residuals of the integration
//! by parts and chain-rule identities behind it.

use num_complex::Complex64;

use super::grid::{Boundary, Grid, GridFunction, MatrixField, VectorGridFunction};
use crate::bellman::{bellman_gradient, bellman_hessian, pair_hessian, BellmanParams};
use crate::bellman::hess_form_power;
use crate::error::{Error, Result};
use crate::realform::{c, rotation_generator, CMatrix, CVector};

/// `|f|^(p-2) f`, continuous extension 0 at zero cells.
pub fn duality_power(f: &GridFunction, p: f64) -> GridFunction {
    f.map(|z| if z.norm() == 0.0 { z } else { z * z.norm().powf(p - 2.0) })
}

/// Cell-wise `<A x, y> = sum_k (A x)_k conj(y_k)` integrated over the grid.
pub fn integrate_form(field: &MatrixField, x: &VectorGridFunction, y: &VectorGridFunction) -> Complex64 {
    let grid = field.grid();
    let d = grid.dim();
    let mut acc = c(0.0, 0.0);
    for i in 0..grid.len() {
        let a = field.cell(i);
        let (xv, yv) = (x.at(i), y.at(i));
        for k in 0..d {
            let ax: Complex64 = (0..d).map(|l| a[(k, l)] * xv[l]).sum();
            acc += ax * yv[k].conj();
        }
    }
    acc * grid.cell_volume()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipativityValue {
    /// `Re int <A grad f, grad(|f|^(p-2) f)>` with differences of the sampled power.
    pub value: f64,
    /// `(1/p) int H[F_p](f; grad f)` over nonzero cells.
    pub companion: f64,
}

fn check_same_grid(field: &MatrixField, f: &GridFunction) -> Result<()> {
    if field.grid() != &f.grid {
        return Err(Error::Dimension("coefficient field and function live on different grids".into()));
    }
    Ok(())
}

/// Dissipativity functional for `p >= 2`. For `p < 2` evaluate the adjoint
/// field at the conjugate exponent instead.
pub fn dissipativity_functional(field: &MatrixField, f: &GridFunction, p: f64) -> Result<DissipativityValue> {
    if !(p.is_finite() && p >= 2.0) {
        return Err(Error::InvalidExponent {
            p,
            reason: "needs p >= 2; for p < 2 use the adjoint field with the conjugate exponent",
        });
    }
    check_same_grid(field, f)?;
    let grad_f = f.gradient();
    let grad_g = duality_power(f, p).gradient();
    let value = integrate_form(field, &grad_f, &grad_g).re;
    let d = f.grid.dim();
    let mut companion = 0.0;
    for i in 0..f.grid.len() {
        let z = f.values[i];
        if z.norm() == 0.0 {
            continue;
        }
        let xi = CVector::from_iterator(d, grad_f.at(i).into_iter().take(d));
        companion += hess_form_power(field.cell(i), p, z, &xi)?;
    }
    companion *= f.grid.cell_volume() / p;
    Ok(DissipativityValue { value, companion })
}

/// Residuals of the three discrete identities on one grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `|p * value - int H[F_p](f; grad f)|`.
    pub power_chain: f64,
    /// `|int <W grad f, grad g>|` for the constant antisymmetric `W = R`.
    pub antisymmetric: f64,
    /// Chain rule for `Q`: first-order route against the Hessian form.
    pub bellman_chain: f64,
}

/// Evaluates the residuals on a periodic 2-D grid. `f` and `g` should keep
/// `(f, g)` off the singular set of `Q`.
pub fn identity_checks(
    a: &MatrixField,
    b: &MatrixField,
    f: &GridFunction,
    g: &GridFunction,
    params: &BellmanParams,
) -> Result<IdentityResiduals> {
    let grid = a.grid();
    if grid.dim() != 2 || grid.boundary() != Boundary::Periodic {
        return Err(Error::Dimension("identity checks need a periodic 2-D grid".into()));
    }
    check_same_grid(a, f)?;
    check_same_grid(b, g)?;
    check_same_grid(a, g)?;
    let p = params.p;
    let dv = dissipativity_functional(a, f, p)?;
    let power_chain = (p * dv.value - p * dv.companion).abs();

    // W = R is not accretive, so the form is evaluated directly.
    let r = rotation_generator();
    let (gf, gg) = (f.gradient(), g.gradient());
    let mut acc = c(0.0, 0.0);
    for i in 0..grid.len() {
        let (x, y) = (gf.at(i), gg.at(i));
        for k in 0..2 {
            acc += (x[0] * r[(k, 0)] + x[1] * r[(k, 1)]) * y[k].conj();
        }
    }
    let antisymmetric = (acc * grid.cell_volume()).norm();

    let mut dz = Vec::with_capacity(grid.len());
    let mut de = Vec::with_capacity(grid.len());
    let mut hess_sum = 0.0;
    for i in 0..grid.len() {
        let (z, e) = (f.values[i], g.values[i]);
        let (gz, ge) = bellman_gradient(params, z, e);
        dz.push(gz);
        de.push(ge);
        let h = bellman_hessian(params, z, e)?;
        let w1 = CVector::from_row_slice(&gf.at(i));
        let w2 = CVector::from_row_slice(&gg.at(i));
        hess_sum += pair_hessian(&h, a.cell(i), b.cell(i), &w1, &w2)?;
    }
    hess_sum *= grid.cell_volume();
    let grad_dz = GridFunction { grid: *grid, values: dz }.gradient();
    let grad_de = GridFunction { grid: *grid, values: de }.gradient();
    let first = 2.0 * integrate_form(a, &gf, &grad_dz).re + 2.0 * integrate_form(b, &gg, &grad_de).re;
    let bellman_chain = (first - hess_sum).abs();
    Ok(IdentityResiduals { power_chain, antisymmetric, bellman_chain })
}

type ScalarFn = Box<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
type MatrixFn = Box<dyn Fn(&[f64]) -> CMatrix + Send + Sync>;

/// Inputs for a refinement study, given as closed-form expressions so they can
/// be resampled on each grid.
pub struct SmoothInputs {
    pub extent: f64,
    pub a: MatrixFn,
    pub b: MatrixFn,
    pub f: ScalarFn,
    pub g: ScalarFn,
    pub params: BellmanParams,
}

impl SmoothInputs {
    /// Smooth periodic data on `[-pi, pi]^2` with variable accretive `A`, `B`,
    /// `|f| <= 0.4` and `|g|` in `[1.6, 2.4]`. For `p <= 4` the pair `(f, g)`
    /// stays in the region `|f|^p < |g|^q` and never meets the singular set.
    pub fn canonical(params: BellmanParams) -> Self {
        let a = |x: &[f64]| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(1.5 + 0.3 * x[0].cos(), 0.2 * x[1].sin()),
                    c(0.2, 0.3 + 0.1 * (x[0] + x[1]).cos()),
                    c(-0.1 * x[1].cos(), -0.2),
                    c(1.4 + 0.2 * (x[0] - x[1]).sin(), 0.1),
                ],
            )
        };
        let b = |x: &[f64]| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(1.3, -0.2 + 0.1 * x[0].sin()),
                    c(0.1 * x[1].cos(), 0.2),
                    c(0.0, -0.25),
                    c(1.6 + 0.3 * x[1].sin(), 0.1 * x[0].cos()),
                ],
            )
        };
        let f = |x: &[f64]| Complex64::from_polar(0.2, x[0]) + c(0.0, 0.2 * x[1].cos());
        let g = |x: &[f64]| c(2.0, 0.0) + Complex64::from_polar(0.4 * x[0].sin().powi(2), x[0] + 2.0 * x[1]);
        Self {
            extent: std::f64::consts::PI,
            a: Box::new(a),
            b: Box::new(b),
            f: Box::new(f),
            g: Box::new(g),
            params,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub cells: Vec<usize>,
    pub residuals: Vec<IdentityResiduals>,
    /// Observed orders between consecutive grids, `log2(r_k / r_{k+1})`, one
    /// triple per doubling.
    pub orders: Vec<[f64; 3]>,
    /// Per identity: the order reached `min_order` on every doubling, or the
    /// residual sat below the floor on every grid.
    pub converged: [bool; 3],
}

/// Residuals below this multiple of the integrand scale count as exact.
pub const RESIDUAL_FLOOR: f64 = 1e-11;

pub fn refinement_study(inputs: &SmoothInputs, cells: &[usize], min_order: f64) -> Result<RefinementStudy> {
    let mut residuals = Vec::new();
    let mut scales = Vec::new();
    for &n in cells {
        let grid = Grid::periodic(2, n, inputs.extent)?;
        let a = MatrixField::from_fn(&grid, &inputs.a)?;
        let b = MatrixField::from_fn(&grid, &inputs.b)?;
        let f = GridFunction::sample(&grid, &inputs.f);
        let g = GridFunction::sample(&grid, &inputs.g);
        residuals.push(identity_checks(&a, &b, &f, &g, &inputs.params)?);
        let gf = f.gradient();
        let gg = g.gradient();
        let s: f64 = (0..grid.len())
            .map(|i| {
                let (x, y) = (gf.at(i), gg.at(i));
                (x[0].norm_sqr() + x[1].norm_sqr() + y[0].norm_sqr() + y[1].norm_sqr()) * grid.cell_volume()
            })
            .sum();
        scales.push(s.max(1.0));
    }
    let get = |r: &IdentityResiduals, k: usize| [r.power_chain, r.antisymmetric, r.bellman_chain][k];
    let orders: Vec<[f64; 3]> = residuals
        .windows(2)
        .map(|w| {
            let mut o = [0.0; 3];
            for (k, ok) in o.iter_mut().enumerate() {
                *ok = (get(&w[0], k) / get(&w[1], k)).log2();
            }
            o
        })
        .collect();
    let mut converged = [true; 3];
    for (k, conv) in converged.iter_mut().enumerate() {
        let below_floor = residuals.iter().zip(&scales).all(|(r, s)| get(r, k) <= RESIDUAL_FLOOR * s);
        let rate = orders.iter().all(|o| o[k] >= min_order);
        *conv = below_floor || rate;
    }
    Ok(RefinementStudy { cells: cells.to_vec(), residuals, orders, converged })
}
