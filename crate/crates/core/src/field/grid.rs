//! Uniform cell-centred grids on `[-L, L]^d`, scalar grid functions and
//! cell-wise coefficient fields.

use num_complex::Complex64;

use crate::ellipticity;
use crate::error::{Error, Result};
use crate::realform::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: usize,
    extent: f64,
    boundary: Boundary,
}

impl Grid {
    pub fn new(dim: usize, cells: usize, extent: f64, boundary: Boundary) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::OutOfRange(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if cells < 8 {
            return Err(Error::OutOfRange(format!("need at least 8 cells per axis, got {cells}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::OutOfRange(format!("extent must be positive, got {extent}")));
        }
        Ok(Self { dim, cells, extent, boundary })
    }

    pub fn periodic(dim: usize, cells: usize, extent: f64) -> Result<Self> {
        Self::new(dim, cells, extent, Boundary::Periodic)
    }

    pub fn dirichlet(dim: usize, cells: usize, extent: f64) -> Result<Self> {
        Self::new(dim, cells, extent, Boundary::Dirichlet)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.cells as f64
    }

    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Flat index of a multi-index; axis 0 varies fastest.
    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().rev().fold(0, |acc, &m| acc * self.cells + m)
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; 2] {
        let mut out = [0; 2];
        for o in out.iter_mut().take(self.dim) {
            *o = idx % self.cells;
            idx /= self.cells;
        }
        out
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.spacing()
    }

    /// Cell centre of the flat index, padded with zeros past `dim`.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let m = self.multi_index(idx);
        let mut x = [0.0; 2];
        for k in 0..self.dim {
            x[k] = self.coordinate(m[k]);
        }
        x
    }

    /// Neighbour of `idx` displaced by `step` along `axis`; `None` outside a
    /// Dirichlet box.
    pub fn neighbour(&self, idx: usize, axis: usize, step: isize) -> Option<usize> {
        let mut m = self.multi_index(idx);
        let n = self.cells as isize;
        let j = m[axis] as isize + step;
        let j = match self.boundary {
            Boundary::Periodic => j.rem_euclid(n),
            Boundary::Dirichlet if (0..n).contains(&j) => j,
            Boundary::Dirichlet => return None,
        };
        m[axis] = j as usize;
        Some(self.index(&m[..self.dim]))
    }

    /// Same geometry with `cells` per axis.
    pub fn refined(&self, cells: usize) -> Result<Self> {
        Self::new(self.dim, cells, self.extent, self.boundary)
    }
}

/// Complex scalar values at cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

/// Cell-wise gradient; `components[k]` holds the derivative along axis `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGridFunction {
    pub grid: Grid,
    pub components: Vec<Vec<Complex64>>,
}

impl VectorGridFunction {
    pub fn at(&self, idx: usize) -> [Complex64; 2] {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        for (k, comp) in self.components.iter().enumerate() {
            v[k] = comp[idx];
        }
        v
    }
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!("{} values for a grid of {} cells", values.len(), grid.len())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    /// Cell-centre evaluation of `f`.
    pub fn sample<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let values = (0..grid.len()).map(|i| f(&grid.center(i)[..grid.dim()])).collect();
        Self { grid: *grid, values }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    /// `h^d` times the sum over cells.
    pub fn integrate(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }

    /// Discrete `L^p` norm with cell-volume weights.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|z| z.norm().powf(p)).sum();
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }

    /// Second-order differences: centred in the interior, wrapped on periodic
    /// grids, one-sided at Dirichlet walls.
    pub fn gradient(&self) -> VectorGridFunction {
        let g = &self.grid;
        let h = g.spacing();
        let u = &self.values;
        let components = (0..g.dim())
            .map(|axis| {
                (0..g.len())
                    .map(|i| match (g.neighbour(i, axis, -1), g.neighbour(i, axis, 1)) {
                        (Some(l), Some(r)) => (u[r] - u[l]) / (2.0 * h),
                        (None, Some(r)) => {
                            let rr = g.neighbour(r, axis, 1).expect("at least 8 cells");
                            (-3.0 * u[i] + 4.0 * u[r] - u[rr]) / (2.0 * h)
                        }
                        (Some(l), None) => {
                            let ll = g.neighbour(l, axis, -1).expect("at least 8 cells");
                            (3.0 * u[i] - 4.0 * u[l] + u[ll]) / (2.0 * h)
                        }
                        (None, None) => unreachable!("grid has at least 8 cells"),
                    })
                    .collect()
            })
            .collect();
        VectorGridFunction { grid: *g, components }
    }
}

/// Piecewise-constant coefficient field: one `dim x dim` matrix per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: Grid,
    cells: Vec<CMatrix>,
    lambda: f64,
    big_lambda: f64,
}

impl MatrixField {
    /// Validates shape, finiteness and accretivity of every cell.
    pub fn new(grid: Grid, cells: Vec<CMatrix>) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::Dimension(format!("{} matrices for a grid of {} cells", cells.len(), grid.len())));
        }
        let mut lambda = f64::INFINITY;
        let mut big_lambda = 0.0f64;
        for a in &cells {
            if a.nrows() != grid.dim() || a.ncols() != grid.dim() {
                return Err(Error::Dimension(format!(
                    "cell matrix is {}x{}, grid dimension is {}",
                    a.nrows(),
                    a.ncols(),
                    grid.dim()
                )));
            }
            let (l, big_l) = ellipticity::checked_bounds(a)?;
            lambda = lambda.min(l);
            big_lambda = big_lambda.max(big_l);
        }
        Ok(Self { grid, cells, lambda, big_lambda })
    }

    pub fn constant(grid: &Grid, a: &CMatrix) -> Result<Self> {
        Self::new(*grid, vec![a.clone(); grid.len()])
    }

    pub fn from_fn<F: Fn(&[f64]) -> CMatrix>(grid: &Grid, f: F) -> Result<Self> {
        Self::new(*grid, (0..grid.len()).map(|i| f(&grid.center(i)[..grid.dim()])).collect())
    }

    /// `e^{i phi} I`.
    pub fn rotation(grid: &Grid, phi: f64) -> Result<Self> {
        Self::constant(grid, &ellipticity::rotation_matrix(phi, grid.dim())?)
    }

    /// `I + i w R` on a 2-D grid.
    pub fn skew(grid: &Grid, w: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::Dimension("the skew generator needs a 2-D grid".into()));
        }
        Self::constant(grid, &ellipticity::skew_matrix(w)?)
    }

    /// `I - i gamma chi_E R` with `E = {|x1| >= |x2|}`, cells assigned by centre.
    pub fn section7(grid: &Grid, gamma: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::Dimension("the counterexample field needs a 2-D grid".into()));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::OutOfRange(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        let inside = ellipticity::skew_matrix(-gamma)?;
        let outside = CMatrix::identity(2, 2);
        Self::from_fn(grid, |x| if x[0].abs() >= x[1].abs() { inside.clone() } else { outside.clone() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[CMatrix] {
        &self.cells
    }

    pub fn cell(&self, idx: usize) -> &CMatrix {
        &self.cells[idx]
    }

    /// Smallest `lambda_A` over cells.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Largest `Lambda_A` over cells.
    pub fn big_lambda(&self) -> f64 {
        self.big_lambda
    }

    /// Cell-wise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { cells: self.cells.iter().map(|a| a.adjoint()).collect(), ..self.clone() }
    }

    pub fn is_constant(&self) -> bool {
        self.cells.windows(2).all(|w| w[0] == w[1])
    }
}
