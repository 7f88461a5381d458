//! Identification of `C^n` with `R^2n` and the real block forms built on it.
//!
//! A complex vector `xi = alpha + i beta` is stored as the real column
//! `(alpha, beta)`; a complex matrix `A = U + iV` acts on it through
//!
//! ```text
//!        [ U  -V ]
//! M(A) = [ V   U ]
//! ```
//!
//! so that `vectorize(A xi) = M(A) vectorize(xi)`. Pairs of vectors come in two
//! layouts: `(Re w1, Re w2, Im w1, Im w2)` (the plain vectorization of
//! `C^2n`) and `(Re w1, Im w1, Re w2, Im w2)`, which is the layout used by the
//! Hessian pairings. `interleave(n)` converts the former into the latter.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(Re xi, Im xi)` as a real column of length `2n`.
pub fn vectorize(xi: &CVector) -> RVector {
    let n = xi.len();
    RVector::from_fn(2 * n, |k, _| if k < n { xi[k].re } else { xi[k - n].im })
}

/// Inverse of [`vectorize`]. Odd-length input has no complex counterpart.
pub fn devectorize(x: &RVector) -> Result<CVector> {
    if x.len() % 2 != 0 {
        return Err(Error::Dimension(format!("cannot devectorize length {}", x.len())));
    }
    let n = x.len() / 2;
    Ok(CVector::from_fn(n, |k, _| c(x[k], x[k + n])))
}

/// `(Re w1, Im w1, Re w2, Im w2)`.
pub fn vectorize_pair(w1: &CVector, w2: &CVector) -> Result<RVector> {
    if w1.len() != w2.len() {
        return Err(Error::Dimension(format!("pair of lengths {} and {}", w1.len(), w2.len())));
    }
    let a = vectorize(w1);
    let b = vectorize(w2);
    Ok(RVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied()))
}

/// Real block form `[[Re A, -Im A], [Im A, Re A]]`.
pub fn realify(a: &CMatrix) -> RMatrix {
    let (r, k) = a.shape();
    RMatrix::from_fn(2 * r, 2 * k, |i, j| {
        let (bi, ii) = (i / r, i % r);
        let (bj, jj) = (j / k, j % k);
        let z = a[(ii, jj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// `(M + M^T)/2` and `(M - M^T)/2`.
pub fn sym_antisym_split(m: &RMatrix) -> Result<(RMatrix, RMatrix)> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let t = m.transpose();
    Ok(((m + &t) * 0.5, (m - &t) * 0.5))
}

/// Symmetric part with respect to the plain transpose, `(A + A^T)/2`.
/// Not the Hermitian part.
pub fn complex_symmetric_part(a: &CMatrix) -> CMatrix {
    (a + a.transpose()) * c(0.5, 0.0)
}

/// Block matrix `[d_ij I_n]_{ij}`.
pub fn kron_identity(d: &RMatrix, n: usize) -> RMatrix {
    RMatrix::from_fn(d.nrows() * n, d.ncols() * n, |i, j| {
        if i % n == j % n {
            d[(i / n, j / n)]
        } else {
            0.0
        }
    })
}

/// Block diagonal `a ⊕ b`.
pub fn direct_sum(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let mut out = RMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Reflection `[[cos psi, sin psi], [sin psi, -cos psi]]`.
pub fn rotation_form(psi: f64) -> RMatrix {
    let (s, co) = psi.sin_cos();
    RMatrix::from_row_slice(2, 2, &[co, s, s, -co])
}

/// Permutation taking `(Re w1, Re w2, Im w1, Im w2)` to `(Re w1, Im w1, Re w2, Im w2)`.
pub fn interleave(n: usize) -> RMatrix {
    let swap = RMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    );
    kron_identity(&swap, n)
}

/// `diag(1, -1) ⊗ I_n`; maps `vectorize(xi)` to `vectorize(conj(xi))`.
pub fn conj_block(n: usize) -> RMatrix {
    kron_identity(&RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), n)
}

/// The 2x2 rotation generator `[[0, -1], [1, 0]]`.
pub fn rotation_generator() -> RMatrix {
    RMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

/// Complex bilinear-in-first, conjugate-linear-in-second pairing `sum z_j conj(w_j)`.
pub fn inner(z: &CVector, w: &CVector) -> Complex64 {
    z.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn real_part(a: &CMatrix) -> RMatrix {
    a.map(|z| z.re)
}

pub fn imag_part(a: &CMatrix) -> RMatrix {
    a.map(|z| z.im)
}

pub fn from_real(m: &RMatrix) -> CMatrix {
    m.map(|x| c(x, 0.0))
}

/// `U + iV` assembled from its real and imaginary parts.
pub fn from_parts(u: &RMatrix, v: &RMatrix) -> CMatrix {
    u.zip_map(v, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_cvec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn rand_cmat(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn vectorize_examples() {
        let v = vectorize(&CVector::from_vec(vec![c(1.0, 2.0)]));
        assert_eq!(v.as_slice(), &[1.0, 2.0]);
        let real = CVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(vectorize(&real).as_slice(), &[3.0, -1.0, 0.0, 0.0]);
        assert!(devectorize(&RVector::from_vec(vec![1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn real_inner_product_matches_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            let z = rand_cvec(&mut rng, n);
            let w = rand_cvec(&mut rng, n);
            let lhs = inner(&z, &w).re;
            let rhs = vectorize(&z).dot(&vectorize(&w));
            assert!((lhs - rhs).abs() < 1e-14);
            assert_eq!(devectorize(&vectorize(&z)).unwrap(), z);
        }
    }

    #[test]
    fn realify_of_i() {
        let m = realify(&CMatrix::from_element(1, 1, c(0.0, 1.0)));
        assert_eq!(m, RMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn realify_is_a_star_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let a = rand_cmat(&mut rng, n);
            let b = rand_cmat(&mut rng, n);
            let xi = rand_cvec(&mut rng, n);
            assert!((realify(&a.adjoint()) - realify(&a).transpose()).amax() < 1e-15);
            assert!((realify(&(&a * &b)) - realify(&a) * realify(&b)).amax() < 1e-13);
            assert!((vectorize(&(&a * &xi)) - realify(&a) * vectorize(&xi)).amax() < 1e-13);
        }
    }

    #[test]
    fn useful_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            let a = rand_cmat(&mut rng, n);
            let xi = rand_cvec(&mut rng, n);
            let eta = rand_cvec(&mut rng, n);
            let z = inner(&(&a * &xi), &eta);
            let m_xi = realify(&a) * vectorize(&xi);
            assert!((z.re - m_xi.dot(&vectorize(&eta))).abs() < 1e-13);
            let i_eta = eta.map(|e| e * c(0.0, 1.0));
            assert!((z.im - m_xi.dot(&vectorize(&i_eta))).abs() < 1e-13);
        }
    }

    #[test]
    fn real_form_expansions() {
        // Re<A xi, xi> and Re<A xi, conj xi> in terms of U_s, V_s, V_a.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=6 {
            let a = rand_cmat(&mut rng, n);
            let xi = rand_cvec(&mut rng, n);
            let (us, _) = sym_antisym_split(&real_part(&a)).unwrap();
            let (vs, va) = sym_antisym_split(&imag_part(&a)).unwrap();
            let al = xi.map(|z| z.re);
            let be = xi.map(|z| z.im);
            let q = |m: &RMatrix, x: &RVector, y: &RVector| (m * x).dot(y);
            let first = q(&us, &al, &al) + q(&us, &be, &be) + 2.0 * q(&va, &al, &be);
            let second = q(&us, &al, &al) - q(&us, &be, &be) - 2.0 * q(&vs, &al, &be);
            let ax = &a * &xi;
            assert!((inner(&ax, &xi).re - first).abs() < 1e-13);
            assert!((inner(&ax, &xi.map(|z| z.conj())).re - second).abs() < 1e-13);
        }
    }

    #[test]
    fn split_examples() {
        let m = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let (s, a) = sym_antisym_split(&m).unwrap();
        assert_eq!(s, RMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        assert_eq!(a, RMatrix::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.0]));
        let sym = RMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let (s, a) = sym_antisym_split(&sym).unwrap();
        assert_eq!(s, sym);
        assert_eq!(a, RMatrix::zeros(2, 2));
        assert!(matches!(
            sym_antisym_split(&RMatrix::zeros(2, 3)),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn split_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = RMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let (s, a) = sym_antisym_split(&m).unwrap();
        assert_eq!(s + a, m);
    }

    #[test]
    fn kron_examples() {
        let (a, b) = (2.0, 5.0);
        let k = kron_identity(&RMatrix::from_row_slice(1, 2, &[a, b]), 3);
        #[rustfmt::skip]
        let expected = RMatrix::from_row_slice(3, 6, &[
            a, 0., 0., b, 0., 0.,
            0., a, 0., 0., b, 0.,
            0., 0., a, 0., 0., b,
        ]);
        assert_eq!(k, expected);
        let d = RMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(kron_identity(&d, 1), d);
    }

    #[test]
    fn kron_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=4 {
            let d1 = RMatrix::from_fn(3, 4, |_, _| rng.gen_range(-1.0..1.0));
            let d2 = RMatrix::from_fn(4, 2, |_, _| rng.gen_range(-1.0..1.0));
            let lhs = kron_identity(&(&d1 * &d2), n);
            let rhs = kron_identity(&d1, n) * kron_identity(&d2, n);
            assert!((lhs - rhs).amax() < 1e-14);
        }
    }

    #[test]
    fn rotation_form_is_an_involution() {
        assert_eq!(rotation_form(0.0), RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        for k in 0..50 {
            let psi = -4.0 + 0.17 * k as f64;
            let sq = rotation_form(psi) * rotation_form(psi);
            assert!((sq - RMatrix::identity(2, 2)).amax() < 1e-15);
        }
    }

    #[test]
    fn interleave_and_conj_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let w = interleave(n);
            assert_eq!(&w * &w, RMatrix::identity(4 * n, 4 * n));
            let w1 = rand_cvec(&mut rng, n);
            let w2 = rand_cvec(&mut rng, n);
            let stacked = CVector::from_iterator(2 * n, w1.iter().chain(w2.iter()).copied());
            assert_eq!(vectorize_pair(&w1, &w2).unwrap(), &w * vectorize(&stacked));
            assert_eq!(conj_block(n) * vectorize(&w1), vectorize(&w1.map(|z| z.conj())));
        }
    }

    #[test]
    fn rotation_block_factorization() {
        // K(psi) ⊗ I = M(e^{i psi} I) U_n
        for n in 1..=3 {
            for psi in [0.0, 0.3, -1.1, 2.5] {
                let lhs = kron_identity(&rotation_form(psi), n);
                let rot = CMatrix::identity(n, n) * Complex64::from_polar(1.0, psi);
                let rhs = realify(&rot) * conj_block(n);
                assert!((lhs - rhs).amax() < 1e-15);
            }
        }
    }
}
