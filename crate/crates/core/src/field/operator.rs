//! Dense discretization of `-div(A grad)` and its semigroup.
//!
//! The sesquilinear form is discretized as an average over the `2^d` corner
//! stencils of each anchor cell `c`:
//!
//! ```text
//! a_h(u, v) = h^d 2^-d sum_c sum_sigma <A_c D^sigma u(c), D^sigma v(c)>,
//! (D^sigma u)_k(c) = sigma_k (u(c + sigma_k e_k) - u(c)) / h,
//! ```
//!
//! and the operator is defined by `<L u, v>_h = a_h(u, v)`. Every term is a
//! nonnegative multiple of a value of the quadratic form of some `A_c`, so the
//! numerical range of `L` lies in the sector of the coefficients, and the
//! operator for the adjoint field is the conjugate transpose. On Dirichlet boxes
//! anchors extend one cell past the walls, values outside are zero and
//! coefficients are taken from the nearest interior cell; in 1-D this is the
//! standard three-point scheme with face-averaged coefficients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::grid::{Boundary, Grid, GridFunction, MatrixField};
use crate::error::{check_exponent_gt1, Error, Result};
use crate::realform::{c, CMatrix, CVector};

/// Largest number of unknowns accepted for dense assembly.
pub const MAX_UNKNOWNS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub matrix: CMatrix,
}

/// One corner stencil: the nonzero entries of each row of `D^sigma` together
/// with the coefficient of the anchor cell.
struct Stencil {
    rows: Vec<Vec<(usize, f64)>>,
    coeff: usize,
}

/// Cell index for a possibly out-of-range multi-index; `None` outside a
/// Dirichlet box.
fn locate(grid: &Grid, m: &[isize]) -> Option<usize> {
    let n = grid.cells_per_axis() as isize;
    let mut idx = [0usize; 2];
    for (k, &mk) in m.iter().enumerate() {
        idx[k] = match grid.boundary() {
            Boundary::Periodic => mk.rem_euclid(n) as usize,
            Boundary::Dirichlet if (0..n).contains(&mk) => mk as usize,
            Boundary::Dirichlet => return None,
        };
    }
    Some(grid.index(&idx[..grid.dim()]))
}

fn nearest(grid: &Grid, m: &[isize]) -> usize {
    let n = grid.cells_per_axis() as isize;
    let clamped: Vec<usize> = m.iter().map(|&x| x.clamp(0, n - 1) as usize).collect();
    grid.index(&clamped)
}

/// All corner stencils of the grid with the factor `2^-d` left to the caller.
fn stencils(grid: &Grid) -> Vec<Stencil> {
    let d = grid.dim();
    let n = grid.cells_per_axis() as isize;
    let h = grid.spacing();
    let (lo, hi) = match grid.boundary() {
        Boundary::Periodic => (0, n),
        Boundary::Dirichlet => (-1, n + 1),
    };
    let anchors: Vec<Vec<isize>> = if d == 1 {
        (lo..hi).map(|i| vec![i]).collect()
    } else {
        (lo..hi).flat_map(|j| (lo..hi).map(move |i| vec![i, j])).collect()
    };
    let mut out = Vec::new();
    for m in anchors {
        for signs in 0..(1usize << d) {
            let mut rows = Vec::with_capacity(d);
            let mut touches = false;
            for k in 0..d {
                let s = if signs >> k & 1 == 0 { 1isize } else { -1 };
                let mut nb = m.clone();
                nb[k] += s;
                let mut row = Vec::with_capacity(2);
                if let Some(j) = locate(grid, &nb) {
                    row.push((j, s as f64 / h));
                    touches = true;
                }
                if let Some(j) = locate(grid, &m) {
                    row.push((j, -(s as f64) / h));
                    touches = true;
                }
                rows.push(row);
            }
            if touches {
                out.push(Stencil { rows, coeff: nearest(grid, &m) });
            }
        }
    }
    out
}

/// Dense matrix of `-div(A grad)` for the cell-wise coefficient field.
pub fn discretize_operator(field: &MatrixField) -> Result<OperatorMatrix> {
    let grid = *field.grid();
    let n = grid.len();
    if n > MAX_UNKNOWNS {
        return Err(Error::Dimension(format!("{n} unknowns exceed the dense limit of {MAX_UNKNOWNS}")));
    }
    let w = 1.0 / (1usize << grid.dim()) as f64;
    let mut m = CMatrix::zeros(n, n);
    for st in stencils(&grid) {
        let a = field.cell(st.coeff);
        for (k, row_k) in st.rows.iter().enumerate() {
            for (l, row_l) in st.rows.iter().enumerate() {
                let akl = a[(k, l)] * w;
                for &(i, di) in row_k {
                    for &(j, dj) in row_l {
                        m[(i, j)] += akl * (di * dj);
                    }
                }
            }
        }
    }
    Ok(OperatorMatrix { grid, matrix: m })
}

/// Discrete pairing `h^d sum u conj(v)`.
pub fn l2_pairing(u: &GridFunction, v: &GridFunction) -> Complex64 {
    u.values.iter().zip(&v.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * u.grid.cell_volume()
}

/// The form `a_h(f, g)` evaluated stencil by stencil; equals `<L f, g>_h`.
pub fn form_pairing(field: &MatrixField, f: &GridFunction, g: &GridFunction) -> Complex64 {
    let grid = field.grid();
    let w = grid.cell_volume() / (1usize << grid.dim()) as f64;
    let apply = |row: &Vec<(usize, f64)>, u: &GridFunction| row.iter().map(|&(j, dj)| u.values[j] * dj).sum::<Complex64>();
    let mut acc = c(0.0, 0.0);
    for st in stencils(grid) {
        let a = field.cell(st.coeff);
        let df: Vec<Complex64> = st.rows.iter().map(|r| apply(r, f)).collect();
        let dg: Vec<Complex64> = st.rows.iter().map(|r| apply(r, g)).collect();
        for k in 0..df.len() {
            let adf: Complex64 = (0..df.len()).map(|l| a[(k, l)] * df[l]).sum();
            acc += adf * dg[k].conj() * w;
        }
    }
    acc
}

/// `2^-d h^d sum_c sum_sigma |D^sigma u(c)| |D^sigma v(c)|`.
pub fn bilinear_gradient_product(u: &GridFunction, v: &GridFunction) -> f64 {
    let grid = &u.grid;
    let w = grid.cell_volume() / (1usize << grid.dim()) as f64;
    let apply = |row: &Vec<(usize, f64)>, x: &GridFunction| row.iter().map(|&(j, dj)| x.values[j] * dj).sum::<Complex64>();
    stencils(grid)
        .iter()
        .map(|st| {
            let nu: f64 = st.rows.iter().map(|r| apply(r, u).norm_sqr()).sum::<f64>().sqrt();
            let nv: f64 = st.rows.iter().map(|r| apply(r, v).norm_sqr()).sum::<f64>().sqrt();
            nu * nv * w
        })
        .sum()
}

impl OperatorMatrix {
    /// `e^{-tL}` by scaling and squaring.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::OutOfRange(format!("time must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(CMatrix::identity(self.matrix.nrows(), self.matrix.ncols()));
        }
        Ok((&self.matrix * c(-t, 0.0)).exp())
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        let v = &self.matrix * CVector::from_column_slice(&f.values);
        GridFunction { grid: f.grid, values: v.iter().copied().collect() }
    }
}

/// `e^{-tL} f`.
pub fn semigroup_apply(l: &OperatorMatrix, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if f.grid != l.grid {
        return Err(Error::Dimension("function and operator live on different grids".into()));
    }
    let e = l.propagator(t)?;
    let v = e * CVector::from_column_slice(&f.values);
    Ok(GridFunction { grid: f.grid, values: v.iter().copied().collect() })
}

fn lp(v: &CVector, p: f64) -> f64 {
    v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `|z|^(r-2) z`, zero at zero.
fn duality_map(v: &CVector, r: f64) -> CVector {
    v.map(|z| if z.norm() == 0.0 { z } else { z * z.norm().powf(r - 2.0) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub max_ratio: f64,
    pub maximizer: GridFunction,
}

/// Largest observed `||e^{-tL} f||_p / ||f||_p` over random inputs and chirped
/// Gaussians, each refined by the nonlinear power iteration for the `p`-norm.
/// This is evidence, not a bound.
pub fn contractivity_probe(l: &OperatorMatrix, p: f64, t: f64, trials: usize, seed: u64) -> Result<ProbeResult> {
    check_exponent_gt1(p)?;
    let q = crate::ellipticity::conjugate(p);
    let e = l.propagator(t)?;
    let e_adj = e.adjoint();
    let grid = l.grid;
    let n = grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<CVector> = Vec::new();
    let scale = grid.extent();
    for &(re, im) in &[(1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (0.5, 2.0), (0.5, -2.0), (2.0, 4.0), (2.0, -4.0)] {
        let a = c(re, im) * (4.0 / (scale * scale));
        let f = GridFunction::sample(&grid, |x| (-a * x.iter().map(|v| v * v).sum::<f64>()).exp());
        starts.push(CVector::from_vec(f.values));
    }
    for _ in 0..trials {
        starts.push(CVector::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal))));
    }
    let mut best = (0.0f64, starts[0].clone());
    for mut x in starts {
        x /= c(lp(&x, p), 0.0);
        let mut ratio = lp(&(&e * &x), p);
        for _ in 0..60 {
            let y = &e * &x;
            let z = &e_adj * duality_map(&y, p);
            let mut xn = duality_map(&z, q);
            let nx = lp(&xn, p);
            if nx == 0.0 {
                break;
            }
            xn /= c(nx, 0.0);
            let r = lp(&(&e * &xn), p);
            if r <= ratio * (1.0 + 1e-13) {
                if r > ratio {
                    ratio = r;
                    x = xn;
                }
                break;
            }
            ratio = r;
            x = xn;
        }
        if ratio > best.0 {
            best = (ratio, x);
        }
    }
    Ok(ProbeResult { max_ratio: best.0, maximizer: GridFunction { grid, values: best.1.iter().copied().collect() } })
}
