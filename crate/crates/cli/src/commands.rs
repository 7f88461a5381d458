//! Subcommand dispatch. Each command turns library results into report rows
//! and decides whether its verification passed.

use std::path::Path;

use pellip_core::bellman::{convexity_verify, violation_search, BellmanParams, SearchBudget};
use pellip_core::ellipticity::{conjugate, delta_p, sector_test_symmetric, MatrixSpec};
use pellip_core::field::{
    dissipativity_functional, gamma_scan, heat_flow_experiment, identity_checks, Boundary, Grid, GridFunction,
    MatrixField, SmoothInputs, TimeSchedule,
};
use pellip_core::heatnorm::{phi_p, tensorized_demo};
use pellip_core::realform::{c, CMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::{Cli, Command};
use crate::error::{CliError, Result};
use crate::range::parse_range;
use crate::report::{row, Meta, Report, Row, Value};
use crate::spec::load_spec;

/// Perturbation used when the convexity theorem does not apply and only a
/// violation search is run.
pub const SEARCH_DELTA: f64 = 0.1;
/// Tolerance on the gap between the polar decomposition and the functional.
pub const DECOMPOSITION_TOL: f64 = 1e-6;
/// Tolerance between the Gaussian oracle and the closed-form heat constant.
pub const ORACLE_TOL: f64 = 1e-6;
/// Slack for the sign of the dissipativity functional.
pub const SIGN_TOL: f64 = 1e-9;

/// Rows produced by a run and whether its checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
}

/// Runs the selected command inside a worker pool of the requested size.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.workers)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let (rows, pass) = pool.install(|| dispatch(&cli.command, cli.common.seed))?;
    let meta = Meta { seed: cli.common.seed, version: env!("CARGO_PKG_VERSION").into(), command: cli.command.name().into() };
    Ok(Outcome { report: Report { meta, rows }, pass })
}

fn dispatch(command: &Command, seed: u64) -> Result<(Vec<Row>, bool)> {
    match command {
        Command::Ellipticity { spec, p } => ellipticity(spec, p),
        Command::Bellman { spec, spec_b, p, budget } => bellman(spec, spec_b.as_deref(), p, *budget, seed),
        Command::Dissipativity { spec, p, grid_cells, extent } => dissipativity(spec, *p, *grid_cells, *extent),
        Command::Counterexample { p, gamma_scan, grid_cells, extent } => counterexample(*p, gamma_scan, *grid_cells, *extent),
        Command::Heatflow { spec, spec_b, p, grid_cells, extent } => {
            heatflow(spec, spec_b.as_deref(), p, *grid_cells, *extent, seed)
        }
        Command::Heatnorm { p, phi, n } => heatnorm(p, phi, *n),
    }
}

/// Ascending, deduplicated parameter list.
fn sorted_values(text: &str) -> Result<Vec<f64>> {
    let mut v = parse_range(text)?;
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

fn ellipticity(spec: &Path, p: &str) -> Result<(Vec<Row>, bool)> {
    let spec = load_spec(spec)?;
    let ps = sorted_values(p)?;
    let rows = ps
        .par_iter()
        .map(|&p| {
            let r = spec.report(p)?;
            Ok(row([
                ("p", p.into()),
                ("lambda", r.lambda.into()),
                ("big_lambda", r.big_lambda.into()),
                ("nu", r.nu.into()),
                ("mu", r.mu.into()),
                ("delta_p", r.delta_p.into()),
                ("w_p_norm", r.w_p_norm.into()),
                ("p_range_lo", r.p_range.0.into()),
                ("p_range_hi", r.p_range.1.into()),
                ("p_elliptic", (r.delta_p > 0.0).into()),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, true))
}

/// The single matrix of a non-field spec.
fn constant_matrix(spec: &MatrixSpec, what: &str) -> Result<CMatrix> {
    match (spec, spec.matrices().as_slice()) {
        (MatrixSpec::Field(_), _) | (_, []) | (_, [_, _, ..]) => {
            Err(CliError::Validation(format!("{what} needs a constant matrix spec")))
        }
        (_, [a]) => Ok(a.clone()),
    }
}

fn bellman(spec: &Path, spec_b: Option<&Path>, p: &str, budget: usize, seed: u64) -> Result<(Vec<Row>, bool)> {
    let a = constant_matrix(&load_spec(spec)?, "bellman")?;
    let b = match spec_b {
        Some(path) => constant_matrix(&load_spec(path)?, "bellman")?,
        None => a.clone(),
    };
    if budget == 0 {
        return Err(CliError::Validation("budget must be positive".into()));
    }
    let search = SearchBudget { seeds: budget, seed, ..SearchBudget::default() };
    let mut rows = Vec::new();
    let mut pass = true;
    for p in sorted_values(p)? {
        // Below 2 the pair is checked at the conjugate exponent with roles swapped.
        let (r, ra, rb, route) = if p >= 2.0 { (p, &a, &b, "direct") } else { (conjugate(p), &b, &a, "swapped") };
        let dp = delta_p(ra, r)?.min(delta_p(rb, r)?);
        let cells = if dp > 0.0 {
            let rep = convexity_verify(r, ra, rb, &search)?;
            pass &= rep.pass;
            [
                ("delta", rep.params.delta.into()),
                ("applies", true.into()),
                ("min_ratio", rep.min_ratio.into()),
                ("bound", rep.bound.into()),
                ("witness_value", rep.witness.value.into()),
                ("pass", rep.pass.into()),
            ]
        } else {
            let params = BellmanParams::new(r, SEARCH_DELTA)?;
            let witness = violation_search(&params, ra, rb, &search)?;
            [
                ("delta", SEARCH_DELTA.into()),
                ("applies", false.into()),
                ("min_ratio", Value::Null),
                ("bound", Value::Null),
                ("witness_value", witness.map(|w| w.value).into()),
                ("pass", Value::Null),
            ]
        };
        let mut r = row([("p", p.into()), ("route", route.into()), ("delta_p", dp.into())]);
        r.extend(cells.into_iter().map(|(k, v)| (k.to_string(), v)));
        rows.push(r);
    }
    Ok((rows, pass))
}

/// A field spec as is, or a matrix spec sampled on a periodic grid whose
/// dimension is the matrix size.
fn field_from(spec: &MatrixSpec, cells: usize, extent: f64) -> Result<MatrixField> {
    if let MatrixSpec::Field(f) = spec {
        return Ok(f.clone());
    }
    let a = constant_matrix(spec, "a grid experiment")?;
    let grid = Grid::periodic(a.nrows(), cells, extent)?;
    if grid.len() > crate::spec::MAX_GRID_CELLS {
        return Err(CliError::Validation(format!("grid exceeds {} cells", crate::spec::MAX_GRID_CELLS)));
    }
    Ok(MatrixField::constant(&grid, &a)?)
}

fn dissipativity(spec: &Path, p: f64, cells: usize, extent: f64) -> Result<(Vec<Row>, bool)> {
    let spec = load_spec(spec)?;
    let field = field_from(&spec, cells, extent)?;
    if !(p.is_finite() && p > 1.0) {
        return Err(pellip_core::Error::InvalidExponent { p, reason: "expected 1 < p < inf" }.into());
    }
    // For p < 2 the functional is evaluated for the adjoint at the conjugate exponent.
    let (work, r) = if p >= 2.0 { (field.clone(), p) } else { (field.adjoint(), conjugate(p)) };
    let grid = *work.grid();
    let taus: Vec<f64> = (-16..=16).map(|k| 0.5 * k as f64).collect();
    let probes = taus
        .par_iter()
        .map(|&tau| {
            let f = GridFunction::sample(&grid, |x| {
                let r2: f64 = x.iter().take(grid.dim()).map(|v| v * v).sum();
                (c(-1.0, -tau) * r2).exp()
            });
            Ok((tau, dissipativity_functional(&work, &f, r)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<Row> = probes
        .iter()
        .map(|(tau, v)| {
            row([("item", "probe".into()), ("tau", (*tau).into()), ("value", v.value.into()), ("companion", v.companion.into())])
        })
        .collect();

    if grid.dim() == 2 && grid.boundary() == Boundary::Periodic {
        let params = BellmanParams::new(r, SEARCH_DELTA)?;
        let inputs = SmoothInputs::canonical(params);
        // The canonical data are 2 pi periodic; rescale them to the grid box.
        let s = inputs.extent / grid.extent();
        let f = GridFunction::sample(&grid, |x| (inputs.f)(&[x[0] * s, x[1] * s]));
        let g = GridFunction::sample(&grid, |x| (inputs.g)(&[x[0] * s, x[1] * s]));
        let res = identity_checks(&work, &work.adjoint(), &f, &g, &params)?;
        for (name, v) in [
            ("power_chain", res.power_chain),
            ("antisymmetric", res.antisymmetric),
            ("bellman_chain", res.bellman_chain),
        ] {
            rows.push(row([("item", name.into()), ("tau", Value::Null), ("value", v.into()), ("companion", Value::Null)]));
        }
    }

    // Constant dissipative coefficients must give a nonnegative functional.
    let min = probes.iter().map(|(_, v)| v.value).fold(f64::INFINITY, f64::min);
    let pass = if field.is_constant() && sector_test_symmetric(field.cell(0), p)? { min >= -SIGN_TOL } else { true };
    Ok((rows, pass))
}

fn counterexample(p: f64, gammas: &str, cells: usize, extent: f64) -> Result<(Vec<Row>, bool)> {
    let grid = Grid::periodic(2, cells, extent)?;
    if grid.len() > crate::spec::MAX_GRID_CELLS {
        return Err(CliError::Validation(format!("grid exceeds {} cells", crate::spec::MAX_GRID_CELLS)));
    }
    let reports = gamma_scan(p, &sorted_values(gammas)?, &grid)?;
    let mut previous: Option<f64> = None;
    let mut pass = true;
    let rows = reports
        .iter()
        .map(|r| {
            let sign_change = previous.is_some_and(|v| (v < 0.0) != (r.value < 0.0));
            previous = Some(r.value);
            pass &= r.relative_gap <= DECOMPOSITION_TOL;
            row([
                ("p", r.p.into()),
                ("gamma", r.gamma.into()),
                ("value", r.value.into()),
                ("fd_value", r.fd_value.into()),
                ("radial", r.terms.radial.into()),
                ("angular", r.terms.angular.into()),
                ("jacobian", r.terms.jacobian.into()),
                ("relative_gap", r.relative_gap.into()),
                ("sign_change", sign_change.into()),
            ])
        })
        .collect();
    Ok((rows, pass))
}

/// Random trigonometric polynomial, periodic on the grid box.
fn trig_polynomial(grid: &Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let d = grid.dim();
    let modes: Vec<[i32; 2]> =
        (-2..=2).flat_map(|i| (-2..=2).map(move |j| [i, j])).filter(|m| d == 2 || m[1] == 0).collect();
    let coeffs: Vec<_> = modes
        .iter()
        .map(|m| {
            let damp = 1.0 / (1.0 + (m[0] * m[0] + m[1] * m[1]) as f64);
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * damp
        })
        .collect();
    let k = std::f64::consts::PI / grid.extent();
    GridFunction::sample(grid, |x| {
        modes
            .iter()
            .zip(&coeffs)
            .map(|(m, a)| {
                let phase = k * (m[0] as f64 * x[0] + if d == 2 { m[1] as f64 * x[1] } else { 0.0 });
                a * c(0.0, phase).exp()
            })
            .sum()
    })
}

fn heatflow(
    spec: &Path,
    spec_b: Option<&Path>,
    p: &str,
    cells: Option<usize>,
    extent: f64,
    seed: u64,
) -> Result<(Vec<Row>, bool)> {
    let sa = load_spec(spec)?;
    let sb = match spec_b {
        Some(path) => load_spec(path)?,
        None => sa.clone(),
    };
    let dim = sa.matrices().first().map_or(1, |a| a.nrows());
    let cells = cells.unwrap_or(if dim == 1 { 128 } else { 16 });
    let a = field_from(&sa, cells, extent)?;
    let b = field_from(&sb, cells, extent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = trig_polynomial(a.grid(), &mut rng);
    let g = trig_polynomial(a.grid(), &mut rng);
    let schedule = TimeSchedule::default();
    let mut rows = Vec::new();
    let mut pass = true;
    for p in sorted_values(p)? {
        let rep = heat_flow_experiment(&a, &b, &f, &g, p, &schedule)?;
        pass &= rep.pass();
        // Unit-norm data, so the bound is (20 / Delta_p) (Lambda / lambda).
        let bound = 20.0 / rep.delta_p * rep.big_lambda / rep.lambda;
        let mut integral = 0.0;
        for k in 0..rep.times.len() {
            if k > 0 {
                integral += 0.5 * (rep.times[k] - rep.times[k - 1]) * (rep.bilinear[k] + rep.bilinear[k - 1]);
            }
            rows.push(row([
                ("p", p.into()),
                ("t", rep.times[k].into()),
                ("energy", rep.energies[k].into()),
                ("bilinear", rep.bilinear[k].into()),
                ("integral", integral.into()),
                ("ratio", (integral / bound).into()),
                ("pass", rep.pass().into()),
            ]));
        }
    }
    Ok((rows, pass))
}

fn heatnorm(p: &str, phi: &str, n: u32) -> Result<(Vec<Row>, bool)> {
    let ps = sorted_values(p)?;
    let phis = sorted_values(phi)?;
    let pairs: Vec<(f64, f64)> = ps.iter().flat_map(|&p| phis.iter().map(move |&phi| (p, phi))).collect();
    let results = pairs
        .par_iter()
        .map(|&(p, phi)| Ok((tensorized_demo(phi, p, n)?, phi_p(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let pass = results.iter().all(|(r, _)| (r.oracle - r.c).abs() <= ORACLE_TOL);
    let rows = results
        .iter()
        .map(|(r, edge)| {
            row([
                ("p", r.p.into()),
                ("phi", r.phi.into()),
                ("phi_p", (*edge).into()),
                ("c", r.c.into()),
                ("oracle", r.oracle.into()),
                ("n", i64::from(r.n).into()),
                ("c_pow_n", r.c_pow_n.into()),
                ("n_p_lower", r.n_p_lower.into()),
                ("diverges", r.diverges.into()),
            ])
        })
        .collect();
    Ok((rows, pass))
}
