//! Scalar functionals of an accretive matrix: `lambda_A`, `Lambda_A`, the
//! sector angle `nu`, the p-ellipticity constant `Delta_p`, `mu`, and the
//! normalized matrix `W_p`, together with closed forms for the standard
//! families and sampling oracles that do not share code with the eigenvalue
//! reductions.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{check_exponent_gt1, Error, Result};
use crate::field::{Boundary, MatrixField};
use crate::optim::SphereSampler;
use crate::realform::{
    c, complex_symmetric_part, devectorize, imag_part, inner, real_part, realify, rotation_generator,
    sym_antisym_split, CMatrix, CVector, RMatrix, RVector,
};

/// Conjugate exponent `p/(p-1)`.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `|1 - 2/p|`; equals 1 at both endpoints `p = 1` and `p = inf`.
pub fn p_hat_abs(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        (1.0 - 2.0 / p).abs()
    }
}

fn min_eig(m: &RMatrix) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

fn sym(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

fn validate(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Smallest eigenvalue of the symmetric part of the real form, i.e. the
/// infimum of `Re<A xi, xi>` over unit `xi`.
pub fn lambda(a: &CMatrix) -> f64 {
    min_eig(&sym(&realify(a)))
}

/// Operator norm of `A`.
pub fn big_lambda(a: &CMatrix) -> f64 {
    realify(a).singular_values().max()
}

/// `(lambda_A, Lambda_A)` after shape, finiteness and accretivity checks.
pub fn checked_bounds(a: &CMatrix) -> Result<(f64, f64)> {
    validate(a)?;
    let l = lambda(a);
    if l <= 0.0 {
        return Err(Error::NonAccretive { lambda: l });
    }
    Ok((l, big_lambda(a)))
}

/// Largest eigenvalue of the Hermitian part of `-i e^{-i beta} A`, which is
/// the supremum of `Im(e^{-i beta} <A xi, xi>)` over unit `xi`.
fn max_im_rotated(a: &CMatrix, beta: f64) -> f64 {
    let rot = a * Complex64::from_polar(1.0, -beta) * c(0.0, -1.0);
    let h = (&rot + rot.adjoint()) * c(0.5, 0.0);
    // The real form of a Hermitian matrix is symmetric with doubled spectrum.
    SymmetricEigen::new(realify(&h)).eigenvalues.max()
}

/// Sector angle: the largest `|arg <A xi, xi>|` over unit `xi`.
///
/// The numerical range is convex, so its extreme arguments are the smallest
/// `beta` with `sup Im(e^{-i beta} z) <= 0` and the mirror image for the lower
/// edge. Both are located by bisection on `beta`.
pub fn nu(a: &CMatrix) -> f64 {
    let upper = bisect_edge(|b| max_im_rotated(a, b) <= 0.0);
    let conj = a.map(|z| z.conj());
    let lower = bisect_edge(|b| max_im_rotated(&conj, b) <= 0.0);
    upper.abs().max(lower.abs())
}

/// Smallest `beta` in `[-pi/2, pi/2]` with `pred(beta)`, for a monotone predicate.
fn bisect_edge<F: Fn(f64) -> bool>(pred: F) -> f64 {
    let (mut lo, mut hi) = (-FRAC_PI_2, FRAC_PI_2);
    if pred(lo) {
        return lo;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `nu` by direct maximization of `|arg <A xi, xi>|` over the sphere.
pub fn nu_oracle(a: &CMatrix, sampler: &SphereSampler) -> f64 {
    let n = a.nrows();
    let m = sampler.minimize(2 * n, |x| {
        let xi = devectorize(&RVector::from_column_slice(x)).expect("even length");
        -inner(&(a * &xi), &xi).arg().abs()
    });
    -m.value
}

/// `2 lambda_min(sym(D M(A)))` with `D = diag(d_re I, d_im I)`.
fn weighted_min(a: &CMatrix, d_re: f64, d_im: f64) -> f64 {
    let n = a.nrows();
    let mut m = realify(a);
    for i in 0..n {
        m.row_mut(i).scale_mut(d_re);
        m.row_mut(n + i).scale_mut(d_im);
    }
    2.0 * min_eig(&sym(&m))
}

/// p-ellipticity constant of a single matrix.
pub fn delta_p(a: &CMatrix, p: f64) -> Result<f64> {
    check_exponent_gt1(p)?;
    Ok(weighted_min(a, 1.0 / p, 1.0 / conjugate(p)))
}

/// `Delta_r` for any `r > 0`, using the weights `1/r` and `1 - 1/r` on the real
/// and imaginary parts. Agrees with [`delta_p`] for `r > 1`.
pub fn delta_r_extended(a: &CMatrix, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidExponent { p: r, reason: "expected 0 < r < inf" });
    }
    Ok(weighted_min(a, 1.0 / r, 1.0 - 1.0 / r))
}

/// Sampled minimum of `Re<A xi, xi> - |1 - 2/p| |<A xi, conj xi>|` over unit `xi`.
pub fn delta_p_oracle(a: &CMatrix, p: f64, sampler: &SphereSampler) -> Result<f64> {
    check_exponent_gt1(p)?;
    let s = p_hat_abs(p);
    let n = a.nrows();
    let m = sampler.minimize(2 * n, |x| {
        let xi = devectorize(&RVector::from_column_slice(x)).expect("even length");
        let axi = a * &xi;
        let bilinear: Complex64 = axi.iter().zip(xi.iter()).map(|(u, v)| u * v).sum();
        inner(&axi, &xi).re - s * bilinear.norm()
    });
    Ok(m.value)
}

/// Exponent with `|1 - 2/p| = s` and `p >= 2`.
fn exponent_from_s(s: f64) -> f64 {
    2.0 / (1.0 - s)
}

/// `mu` by bisection on `s = |1 - 2/p|` for the sign change of `Delta_p`.
pub fn mu(a: &CMatrix) -> f64 {
    let delta = |s: f64| weighted_min(a, 1.0 / exponent_from_s(s), 0.5 * (1.0 + s));
    let s_max = 1.0 - 1e-9;
    if delta(s_max) > 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, s_max);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if delta(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sampled infimum of `Re<A xi, xi> / |<A xi, conj xi>|`, skipping points where
/// the denominator is below `1e-12`.
pub fn mu_oracle(a: &CMatrix, sampler: &SphereSampler) -> f64 {
    let n = a.nrows();
    let m = sampler.minimize(2 * n, |x| {
        let xi = devectorize(&RVector::from_column_slice(x)).expect("even length");
        let axi = a * &xi;
        let den: Complex64 = axi.iter().zip(xi.iter()).map(|(u, v)| u * v).sum();
        if den.norm() < 1e-12 {
            f64::INFINITY
        } else {
            inner(&axi, &xi).re / den.norm()
        }
    });
    m.value.min(1.0)
}

/// Open interval of exponents with `Delta_p > 0`, from `|1 - 2/p| < mu`.
pub fn p_ellipticity_range(mu: f64) -> (f64, f64) {
    if mu >= 1.0 {
        (1.0, f64::INFINITY)
    } else {
        (2.0 / (1.0 + mu), 2.0 / (1.0 - mu))
    }
}

/// Positive square root of a symmetric positive definite matrix.
fn spd_sqrt(m: &RMatrix, what: &'static str) -> Result<RMatrix> {
    let e = SymmetricEigen::new(m.clone());
    if e.eigenvalues.iter().any(|&v| v <= 0.0) {
        return Err(Error::NotPositiveDefinite(what));
    }
    let d = RMatrix::from_diagonal(&e.eigenvalues.map(f64::sqrt));
    Ok(&e.eigenvectors * d * e.eigenvectors.transpose())
}

/// `V_p = ((p-2) V_s + p V_a) / (2 sqrt(p-1))` where `V = Im A`.
pub fn script_v_p(a: &CMatrix, p: f64) -> Result<RMatrix> {
    check_exponent_gt1(p)?;
    let (vs, va) = sym_antisym_split(&imag_part(a))?;
    Ok((vs * (p - 2.0) + va * p) / (2.0 * (p - 1.0).sqrt()))
}

/// `W_p = S^{-1} V_p S^{-1}` with `S = (Re A)_s^{1/2}`, and its operator norm.
pub fn script_w_p(a: &CMatrix, p: f64) -> Result<(RMatrix, f64)> {
    let vp = script_v_p(a, p)?;
    let (us, _) = sym_antisym_split(&real_part(a))?;
    let s = spd_sqrt(&us, "symmetric part of Re A")?;
    let s_inv = s.try_inverse().ok_or(Error::NotPositiveDefinite("symmetric part of Re A"))?;
    let w = &s_inv * vp * &s_inv;
    let norm = w.singular_values().max();
    Ok((w, norm))
}

/// `Delta_p(A_s)` is nonnegative, tested through the pencil
/// `|p-2| |<V_s a, a>| <= 2 sqrt(p-1) <U_s a, a>` on real `a`.
pub fn sector_test_symmetric(a: &CMatrix, p: f64) -> Result<bool> {
    check_exponent_gt1(p)?;
    let a_s = complex_symmetric_part(a);
    let (us, _) = sym_antisym_split(&real_part(&a_s))?;
    let (vs, _) = sym_antisym_split(&imag_part(&a_s))?;
    let s = spd_sqrt(&us, "symmetric part of Re A")?;
    let s_inv = s.try_inverse().ok_or(Error::NotPositiveDefinite("symmetric part of Re A"))?;
    let pencil = &s_inv * vs * &s_inv;
    let rho = SymmetricEigen::new(pencil).eigenvalues.amax();
    Ok((p - 2.0).abs() * rho <= 2.0 * (p - 1.0).sqrt())
}

/// `e^{i phi} I_n`.
pub fn rotation_matrix(phi: f64, n: usize) -> Result<CMatrix> {
    if !(phi.abs() < FRAC_PI_2) {
        return Err(Error::OutOfRange(format!("rotation angle must satisfy |phi| < pi/2, got {phi}")));
    }
    Ok(CMatrix::from_diagonal_element(n, n, Complex64::from_polar(1.0, phi)))
}

/// `I + i w R` with `R` the 2x2 rotation generator.
pub fn skew_matrix(w: f64) -> Result<CMatrix> {
    if !(w.abs() < 1.0) {
        return Err(Error::OutOfRange(format!("skew parameter must satisfy |w| < 1, got {w}")));
    }
    let r = rotation_generator();
    Ok(CMatrix::from_fn(2, 2, |i, j| c(if i == j { 1.0 } else { 0.0 }, w * r[(i, j)])))
}

/// Families with a closed form for `Delta_p` or `||W_p||^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `e^{i phi} I`: `Delta_p = cos phi - |1 - 2/p|`.
    Rotation { phi: f64 },
    /// `I + i w R`, `p >= 2`: `Delta_p = 1 - sqrt(p_hat^2 + w^2)`.
    Skew { w: f64 },
    /// `e^{i phi} B`: squared norm of `W_p`.
    RotatedWpNorm { b: CMatrix, phi: f64 },
}

pub fn closed_form_delta(kind: &ClosedForm, p: f64) -> Result<f64> {
    check_exponent_gt1(p)?;
    let p_hat = 1.0 - 2.0 / p;
    match kind {
        ClosedForm::Rotation { phi } => Ok(phi.cos() - p_hat.abs()),
        ClosedForm::Skew { w } => {
            if p < 2.0 {
                return Err(Error::InvalidExponent { p, reason: "the skew closed form needs p >= 2" });
            }
            Ok(1.0 - (p_hat * p_hat + w * w).sqrt())
        }
        ClosedForm::RotatedWpNorm { b, phi } => {
            validate(b)?;
            if !(phi.abs() < FRAC_PI_2) {
                return Err(Error::OutOfRange(format!("angle must satisfy |phi| < pi/2, got {phi}")));
            }
            if imag_part(b).iter().any(|v| *v != 0.0) {
                return Err(Error::OutOfRange("the rotated closed form needs a real matrix B".into()));
            }
            let (bs, ba) = sym_antisym_split(&real_part(b))?;
            let s = spd_sqrt(&bs, "symmetric part of B")?;
            let s_inv = s.try_inverse().ok_or(Error::NotPositiveDefinite("symmetric part of B"))?;
            let k = (&s_inv * ba * &s_inv).singular_values().max();
            Ok(phi.tan().powi(2) * (k * k + p_hat * p_hat) / (1.0 - p_hat * p_hat))
        }
    }
}

/// Coefficient description accepted by the batch tools.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSpec {
    Constant(CMatrix),
    Rotation { phi: f64, n: usize },
    Skew { w: f64 },
    /// `e^{i phi} B`.
    Rotated { b: CMatrix, phi: f64 },
    Field(MatrixField),
}

impl MatrixSpec {
    /// Validates the payload; constant and rotated matrices must be accretive.
    pub fn validated(self) -> Result<Self> {
        match &self {
            MatrixSpec::Constant(a) => {
                checked_bounds(a)?;
            }
            MatrixSpec::Rotation { phi, n } => {
                if *n == 0 {
                    return Err(Error::Dimension("n must be positive".into()));
                }
                rotation_matrix(*phi, *n)?;
            }
            MatrixSpec::Skew { w } => {
                skew_matrix(*w)?;
            }
            MatrixSpec::Rotated { b, phi } => {
                if !phi.is_finite() {
                    return Err(Error::NonFinite);
                }
                checked_bounds(&(b * Complex64::from_polar(1.0, *phi)))?;
            }
            MatrixSpec::Field(_) => {}
        }
        Ok(self)
    }

    /// Cell matrices; a single matrix for constant kinds.
    pub fn matrices(&self) -> Vec<CMatrix> {
        match self {
            MatrixSpec::Constant(a) => vec![a.clone()],
            MatrixSpec::Rotation { phi, n } => {
                vec![CMatrix::from_diagonal_element(*n, *n, Complex64::from_polar(1.0, *phi))]
            }
            MatrixSpec::Skew { w } => {
                let r = rotation_generator();
                vec![CMatrix::from_fn(2, 2, |i, j| c(if i == j { 1.0 } else { 0.0 }, w * r[(i, j)]))]
            }
            MatrixSpec::Rotated { b, phi } => vec![b * Complex64::from_polar(1.0, *phi)],
            MatrixSpec::Field(f) => distinct(f.cells()),
        }
    }

    /// `(lambda, Lambda, nu)`, taken as min, max and max over cells.
    pub fn accretivity_bounds(&self) -> (f64, f64, f64) {
        self.matrices().iter().fold((f64::INFINITY, 0.0, 0.0), |(l, bl, n), a| {
            (l.min(lambda(a)), bl.max(big_lambda(a)), n.max(nu(a)))
        })
    }

    pub fn delta_p(&self, p: f64) -> Result<f64> {
        check_exponent_gt1(p)?;
        Ok(self.matrices().iter().map(|a| weighted_min(a, 1.0 / p, 1.0 / conjugate(p))).fold(f64::INFINITY, f64::min))
    }

    pub fn mu(&self) -> f64 {
        self.matrices().iter().map(mu).fold(f64::INFINITY, f64::min)
    }

    /// Largest `||W_p||` over cells.
    pub fn w_p_norm(&self, p: f64) -> Result<f64> {
        self.matrices().iter().try_fold(0.0f64, |acc, a| Ok(acc.max(script_w_p(a, p)?.1)))
    }

    pub fn report(&self, p: f64) -> Result<EllipticityReport> {
        let (lambda, big_lambda, nu) = self.accretivity_bounds();
        let mu = self.mu();
        Ok(EllipticityReport {
            p,
            lambda,
            big_lambda,
            nu,
            delta_p: self.delta_p(p)?,
            mu,
            w_p_norm: self.w_p_norm(p)?,
            p_range: p_ellipticity_range(mu),
        })
    }
}

/// Unique cell matrices in order of first appearance.
fn distinct(cells: &[CMatrix]) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::new();
    for a in cells {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityReport {
    pub p: f64,
    pub lambda: f64,
    pub big_lambda: f64,
    pub nu: f64,
    pub delta_p: f64,
    pub mu: f64,
    pub w_p_norm: f64,
    pub p_range: (f64, f64),
}

/// Smooth compactly supported radial bump `exp(-1/(1-|x/eps|^2))`.
fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Periodic convolution of a coefficient field with the mass-normalized
/// discrete bump of radius `eps`. `eps = 0` returns the field unchanged.
pub fn mollify(field: &MatrixField, eps: f64) -> Result<MatrixField> {
    let grid = field.grid();
    if grid.boundary() != Boundary::Periodic {
        return Err(Error::OutOfRange("mollification needs a periodic grid".into()));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::OutOfRange(format!("eps must be nonnegative, got {eps}")));
    }
    let h = grid.spacing();
    let reach = (eps / h).floor() as isize;
    let mut stencil: Vec<([isize; 2], f64)> = Vec::new();
    let offsets: Vec<isize> = (-reach..=reach).collect();
    let second: Vec<isize> = if grid.dim() == 2 { offsets.clone() } else { vec![0] };
    for &i in &offsets {
        for &j in &second {
            let r = ((i * i + j * j) as f64).sqrt() * h;
            let w = if eps == 0.0 { if r == 0.0 { 1.0 } else { 0.0 } } else { bump(r / eps) };
            if w > 0.0 {
                stencil.push(([i, j], w));
            }
        }
    }
    let mass: f64 = stencil.iter().map(|s| s.1).sum();
    let n = grid.dim();
    let cells = (0..grid.len())
        .map(|idx| {
            let mut acc = CMatrix::zeros(n, n);
            for (off, w) in &stencil {
                let mut j = idx;
                for axis in 0..n {
                    j = grid.neighbour(j, axis, off[axis]).expect("periodic");
                }
                acc += field.cell(j) * c(w / mass, 0.0);
            }
            acc
        })
        .collect();
    MatrixField::new(*grid, cells)
}

/// Vector `xi` realizing `Delta_p`: the eigenvector of the smallest eigenvalue
/// of `sym(D_p M(A))`.
pub fn delta_p_minimizer(a: &CMatrix, p: f64) -> Result<CVector> {
    check_exponent_gt1(p)?;
    let n = a.nrows();
    let q = conjugate(p);
    let mut m = realify(a);
    for i in 0..n {
        m.row_mut(i).scale_mut(1.0 / p);
        m.row_mut(n + i).scale_mut(1.0 / q);
    }
    let e = SymmetricEigen::new(sym(&m));
    let k = e.eigenvalues.imin();
    devectorize(&e.eigenvectors.column(k).into_owned())
}
