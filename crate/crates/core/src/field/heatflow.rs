//! Monotonicity of the Bellman energy along the pair of heat flows and the
//! resulting bilinear embedding bound, on a periodic grid.

use num_complex::Complex64;

use super::grid::{Boundary, GridFunction, MatrixField};
use super::operator::{bilinear_gradient_product, discretize_operator};
use crate::bellman::{bellman_value, delta_choice, BellmanParams};
use crate::ellipticity::{conjugate, delta_p};
use crate::error::{Error, Result};
use crate::realform::{CMatrix, CVector};

/// Geometric time sampling: `steps_per_segment` steps of `dt0 * 2^k` in
/// segment `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSchedule {
    pub dt0: f64,
    pub steps_per_segment: usize,
    pub segments: usize,
}

impl Default for TimeSchedule {
    fn default() -> Self {
        Self { dt0: 1e-4, steps_per_segment: 8, segments: 14 }
    }
}

impl TimeSchedule {
    pub fn final_time(&self) -> f64 {
        self.dt0 * self.steps_per_segment as f64 * ((1u64 << self.segments) - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) || self.steps_per_segment == 0 || self.segments == 0 || self.segments > 40 {
            return Err(Error::OutOfRange(format!("invalid time schedule {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatFlowReport {
    pub p: f64,
    /// Bellman parameter in use; for `p < 2` the roles of the two flows are swapped.
    pub params: BellmanParams,
    pub delta_p: f64,
    pub lambda: f64,
    pub big_lambda: f64,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub bilinear: Vec<f64>,
    /// Trapezoidal time integral of `bilinear`.
    pub integral: f64,
    pub monotone: bool,
    /// `Delta_p / 5 * lambda / Lambda`.
    pub a0: f64,
    /// `a0 * integral <= energies[0]`.
    pub energy_bound_holds: bool,
    /// `integral / ((20 / Delta_p) (Lambda / lambda) ||f||_p ||g||_q)`.
    pub ratio: f64,
}

impl HeatFlowReport {
    pub fn pass(&self) -> bool {
        self.monotone && self.energy_bound_holds && self.ratio <= 1.0
    }
}

fn field_delta(field: &MatrixField, p: f64) -> Result<f64> {
    field.cells().iter().try_fold(f64::INFINITY, |m, a| Ok(m.min(delta_p(a, p)?)))
}

fn to_vec(f: &GridFunction) -> CVector {
    CVector::from_column_slice(&f.values)
}

fn to_fn(f: &GridFunction, v: &CVector) -> GridFunction {
    GridFunction { grid: f.grid, values: v.iter().copied().collect() }
}

/// Runs `P_t^A f` and `P_t^B g` on the schedule and records the energy
/// `int Q(P_t^A f, P_t^B g)` and `int |grad P_t^A f| |grad P_t^B g|`.
/// `f` and `g` are normalized to unit `L^p` and `L^q` norms first; the ratio is
/// invariant under that scaling.
pub fn heat_flow_experiment(
    a: &MatrixField,
    b: &MatrixField,
    f: &GridFunction,
    g: &GridFunction,
    p: f64,
    schedule: &TimeSchedule,
) -> Result<HeatFlowReport> {
    crate::error::check_exponent_gt1(p)?;
    schedule.validate()?;
    let grid = *a.grid();
    if grid.boundary() != Boundary::Periodic {
        return Err(Error::Dimension("the heat-flow experiment needs a periodic grid".into()));
    }
    if b.grid() != &grid || f.grid != grid || g.grid != grid {
        return Err(Error::Dimension("fields and functions must share one grid".into()));
    }
    let q = conjugate(p);
    let dp = field_delta(a, p)?.min(field_delta(b, p)?);
    if dp <= 0.0 {
        return Err(Error::HypothesisUnmet(format!("Delta_p(A, B) = {dp:e} is not positive")));
    }
    let (nf, ng) = (f.lp_norm(p), g.lp_norm(q));
    if !(nf > 0.0 && ng > 0.0) {
        return Err(Error::OutOfRange("f and g must be nonzero".into()));
    }
    let lambda = a.lambda().min(b.lambda());
    let big_lambda = a.big_lambda().max(b.big_lambda());

    // Q needs an exponent >= 2; below 2 the flows trade places.
    let (fa, fb, u0, v0, r) = if p >= 2.0 {
        (a, b, f.map(|z| z / nf), g.map(|z| z / ng), p)
    } else {
        (b, a, g.map(|z| z / ng), f.map(|z| z / nf), q)
    };
    let delta = delta_choice(lambda, big_lambda, field_delta(fb, conjugate(r))?)?;
    let params = BellmanParams::new(r, delta)?;
    let la = discretize_operator(fa)?;
    let lb = discretize_operator(fb)?;

    let vol = grid.cell_volume();
    let energy = |u: &GridFunction, v: &GridFunction| -> f64 {
        u.values.iter().zip(&v.values).map(|(&z, &e): (&Complex64, &Complex64)| bellman_value(&params, z, e)).sum::<f64>() * vol
    };

    let (mut u, mut v) = (to_vec(&u0), to_vec(&v0));
    let mut times = vec![0.0];
    let mut energies = vec![energy(&u0, &v0)];
    let mut bilinear = vec![bilinear_gradient_product(&u0, &v0)];
    let mut t = 0.0;
    let mut dt = schedule.dt0;
    let (mut pa, mut pb): (CMatrix, CMatrix) = (la.propagator(dt)?, lb.propagator(dt)?);
    for seg in 0..schedule.segments {
        if seg > 0 {
            dt *= 2.0;
            pa = &pa * &pa;
            pb = &pb * &pb;
        }
        for _ in 0..schedule.steps_per_segment {
            u = &pa * &u;
            v = &pb * &v;
            t += dt;
            let (uf, vf) = (to_fn(&u0, &u), to_fn(&v0, &v));
            times.push(t);
            energies.push(energy(&uf, &vf));
            bilinear.push(bilinear_gradient_product(&uf, &vf));
        }
    }

    let integral: f64 = times.windows(2).zip(bilinear.windows(2)).map(|(t, b)| 0.5 * (t[1] - t[0]) * (b[0] + b[1])).sum();
    let tol = 1e-12 * energies[0].abs().max(1.0);
    let monotone = energies.windows(2).all(|e| e[1] <= e[0] + tol);
    let a0 = dp / 5.0 * lambda / big_lambda;
    let energy_bound_holds = a0 * integral <= energies[0] + tol;
    // f and g were normalized, so the norms in the bound are 1.
    let ratio = integral / (20.0 / dp * big_lambda / lambda);
    Ok(HeatFlowReport {
        p,
        params,
        delta_p: dp,
        lambda,
        big_lambda,
        times,
        energies,
        bilinear,
        integral,
        monotone,
        a0,
        energy_bound_holds,
        ratio,
    })
}
