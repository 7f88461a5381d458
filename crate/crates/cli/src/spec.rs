//! Coefficient specification files: UTF-8 JSON, matrix entries as `[re, im]`.

use std::path::Path;

use pellip_core::ellipticity::MatrixSpec;
use pellip_core::field::{Boundary, Grid, MatrixField};
use pellip_core::realform::{c, CMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Largest accepted matrix size.
pub const MAX_MATRIX_SIZE: usize = 16;
/// Largest accepted number of grid cells.
pub const MAX_GRID_CELLS: usize = 1 << 16;

type Entries = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpecFile {
    /// `e^{i phi} I_n`.
    Rotation { phi: f64, n: usize },
    /// `I + i w R`.
    Skew { w: f64 },
    Constant { n: usize, entries: Entries },
    /// `e^{i phi} B` with `B` given by `entries`.
    Rotated { phi: f64, n: usize, entries: Entries },
    /// Piecewise-constant field; exactly one of `generator` and `entries`.
    Field {
        grid: GridSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<Generator>,
        /// One matrix per cell, axis 0 varying fastest.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        entries: Option<Vec<Entries>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub cells: usize,
    pub extent: f64,
    #[serde(default = "periodic")]
    pub boundary: String,
}

fn periodic() -> String {
    "periodic".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum Generator {
    Rotation { phi: f64 },
    Skew { w: f64 },
    /// `I - i gamma chi_E R` on the cone `|x1| >= |x2|`.
    Section7 { gamma: f64 },
}

fn invalid(e: pellip_core::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_MATRIX_SIZE {
        return Err(CliError::Validation(format!("matrix size must be in 1..={MAX_MATRIX_SIZE}, got {n}")));
    }
    Ok(())
}

fn matrix(n: usize, entries: &Entries) -> Result<CMatrix> {
    check_size(n)?;
    if entries.len() != n || entries.iter().any(|row| row.len() != n) {
        return Err(CliError::Validation(format!("entries must form an {n}x{n} array of [re, im] pairs")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| c(entries[i][j][0], entries[i][j][1])))
}

fn grid(spec: &GridSpec) -> Result<Grid> {
    let boundary = match spec.boundary.as_str() {
        "periodic" => Boundary::Periodic,
        "dirichlet" => Boundary::Dirichlet,
        other => return Err(CliError::Validation(format!("unknown boundary {other:?}"))),
    };
    if !(spec.dim == 1 || spec.dim == 2) {
        return Err(CliError::Validation(format!("grid dimension must be 1 or 2, got {}", spec.dim)));
    }
    let total = u32::try_from(spec.dim).ok().and_then(|d| spec.cells.checked_pow(d));
    if !total.is_some_and(|t| t <= MAX_GRID_CELLS) {
        return Err(CliError::Validation(format!("grid exceeds {MAX_GRID_CELLS} cells")));
    }
    Grid::new(spec.dim, spec.cells, spec.extent, boundary).map_err(invalid)
}

impl SpecFile {
    /// Builds and validates the coefficient description.
    pub fn build(&self) -> Result<MatrixSpec> {
        let spec = match self {
            SpecFile::Rotation { phi, n } => {
                check_size(*n)?;
                MatrixSpec::Rotation { phi: *phi, n: *n }
            }
            SpecFile::Skew { w } => MatrixSpec::Skew { w: *w },
            SpecFile::Constant { n, entries } => MatrixSpec::Constant(matrix(*n, entries)?),
            SpecFile::Rotated { phi, n, entries } => MatrixSpec::Rotated { b: matrix(*n, entries)?, phi: *phi },
            SpecFile::Field { grid: g, generator, entries } => {
                let g = grid(g)?;
                let field = match (generator, entries) {
                    (Some(Generator::Rotation { phi }), None) => MatrixField::rotation(&g, *phi),
                    (Some(Generator::Skew { w }), None) => MatrixField::skew(&g, *w),
                    (Some(Generator::Section7 { gamma }), None) => MatrixField::section7(&g, *gamma),
                    (None, Some(cells)) => {
                        if cells.len() != g.len() {
                            return Err(CliError::Validation(format!(
                                "{} cell matrices for a grid of {} cells",
                                cells.len(),
                                g.len()
                            )));
                        }
                        let cells = cells.iter().map(|e| matrix(g.dim(), e)).collect::<Result<Vec<_>>>()?;
                        MatrixField::new(g, cells)
                    }
                    _ => {
                        return Err(CliError::Validation(
                            "a field needs exactly one of \"generator\" and \"entries\"".into(),
                        ))
                    }
                };
                MatrixSpec::Field(field.map_err(invalid)?)
            }
        };
        spec.validated().map_err(invalid)
    }

    /// Inverse of [`SpecFile::build`] for matrix kinds; fields are written cell by cell.
    pub fn from_spec(spec: &MatrixSpec) -> Self {
        let entries = |a: &CMatrix| -> Entries {
            (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect()
        };
        match spec {
            MatrixSpec::Rotation { phi, n } => SpecFile::Rotation { phi: *phi, n: *n },
            MatrixSpec::Skew { w } => SpecFile::Skew { w: *w },
            MatrixSpec::Constant(a) => SpecFile::Constant { n: a.nrows(), entries: entries(a) },
            MatrixSpec::Rotated { b, phi } => SpecFile::Rotated { phi: *phi, n: b.nrows(), entries: entries(b) },
            MatrixSpec::Field(f) => {
                let g = f.grid();
                SpecFile::Field {
                    grid: GridSpec {
                        dim: g.dim(),
                        cells: g.cells_per_axis(),
                        extent: g.extent(),
                        boundary: match g.boundary() {
                            Boundary::Periodic => "periodic".into(),
                            Boundary::Dirichlet => "dirichlet".into(),
                        },
                    },
                    generator: None,
                    entries: Some(f.cells().iter().map(entries).collect()),
                }
            }
        }
    }
}

/// Parses and validates a specification document.
pub fn parse_spec(text: &str) -> Result<MatrixSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    file.build()
}

pub fn load_spec(path: &Path) -> Result<MatrixSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

pub fn write_spec(spec: &MatrixSpec) -> String {
    serde_json::to_string_pretty(&SpecFile::from_spec(spec)).expect("spec values serialize")
}
