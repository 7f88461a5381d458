//! Power functions `F_r(z) = |z|^r`, their generalized Hessian forms, and the
//! two-variable Bellman function
//!
//! ```text
//! Q(zeta, eta) = |zeta|^p + |eta|^q + delta * { |zeta|^2 |eta|^(2-q)          if |zeta|^p <= |eta|^q
//!                                             { (2/p)|zeta|^p + (1-2/p)|eta|^q  otherwise
//! ```
//!
//! All Hessians are taken in the real coordinates `(Re zeta, Im zeta, Re eta,
//! Im eta)` and paired with `M(A) ⊕ M(B)` acting on `(V(omega1), V(omega2))`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::ellipticity::{conjugate, delta_p, delta_p_minimizer};
use crate::error::{check_exponent_gt1, Error, Result};
use crate::realform::{
    c, direct_sum, inner, kron_identity, realify, rotation_form, vectorize, vectorize_pair, CMatrix, CVector,
    RMatrix, RVector,
};

/// Width of the band around the singular set where Hessians are refused.
pub const SINGULAR_BAND: f64 = 1e-12;

type Block = [[f64; 2]; 2];

/// Hessian of `|z|^r` in real coordinates, defined also at `z = 0` when
/// `r >= 2`. `r = 0` is the constant function.
fn hess_power_block(r: f64, z: Complex64) -> Block {
    let m = z.norm();
    if r == 0.0 {
        return [[0.0; 2]; 2];
    }
    if m == 0.0 {
        let d = if r == 2.0 { 2.0 } else { 0.0 };
        return [[d, 0.0], [0.0, d]];
    }
    let r_hat = 1.0 - 2.0 / r;
    let s = 0.5 * r * r * m.powf(r - 2.0);
    let (sin2, cos2) = (2.0 * z.arg()).sin_cos();
    [[s * (1.0 + r_hat * cos2), s * r_hat * sin2], [s * r_hat * sin2, s * (1.0 - r_hat * cos2)]]
}

/// `(r^2/2) |zeta|^(r-2) (I + (1 - 2/r) K(2 arg zeta))`.
pub fn hess_power(r: f64, zeta: Complex64) -> Result<RMatrix> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidExponent { p: r, reason: "expected 0 < r < inf" });
    }
    if zeta.norm() == 0.0 {
        return Err(Error::SingularSet("power Hessian at zeta = 0"));
    }
    let r_hat = 1.0 - 2.0 / r;
    let id = RMatrix::identity(2, 2);
    Ok((id + rotation_form(2.0 * zeta.arg()) * r_hat) * (0.5 * r * r * zeta.norm().powf(r - 2.0)))
}

/// `<(K ⊗ I) x, M y>` for a 2x2 block `K` and real `2n` vectors.
fn pair_block(k: &Block, x: &RVector, m: &RMatrix, y: &RVector) -> f64 {
    let n = x.len() / 2;
    let my = m * y;
    let mut s = 0.0;
    for i in 0..n {
        let (xr, xi) = (x[i], x[n + i]);
        s += (k[0][0] * xr + k[0][1] * xi) * my[i] + (k[1][0] * xr + k[1][1] * xi) * my[n + i];
    }
    s
}

/// `<(Hess F_r(zeta) ⊗ I) V(xi), M(A) V(xi)>`, assembled from matrices.
pub fn hess_form_power_matrix(a: &CMatrix, r: f64, zeta: Complex64, xi: &CVector) -> Result<f64> {
    let h = hess_power(r, zeta)?;
    let v = vectorize(xi);
    Ok((kron_identity(&h, xi.len()) * &v).dot(&(realify(a) * &v)))
}

/// `(r^2/2) |zeta|^(r-2) Re(<A xi, xi> + (1 - 2/r) e^{-2i arg zeta} <A xi, conj xi>)`.
pub fn hess_form_power(a: &CMatrix, r: f64, zeta: Complex64, xi: &CVector) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidExponent { p: r, reason: "expected 0 < r < inf" });
    }
    if zeta.norm() == 0.0 {
        return Err(Error::SingularSet("power Hessian at zeta = 0"));
    }
    let r_hat = 1.0 - 2.0 / r;
    let axi = a * xi;
    let bilinear: Complex64 = axi.iter().zip(xi.iter()).map(|(u, v)| u * v).sum();
    let rot = Complex64::from_polar(1.0, -2.0 * zeta.arg());
    Ok(0.5 * r * r * zeta.norm().powf(r - 2.0) * (inner(&axi, xi) + r_hat * rot * bilinear).re)
}

/// `p^2 Re<A eta, J_q eta>` where `J_q` scales real parts by `1/q` and imaginary parts by `1/p`.
pub fn hess_form_jq(a: &CMatrix, p: f64, eta: &CVector) -> Result<f64> {
    check_exponent_gt1(p)?;
    let q = conjugate(p);
    let j = eta.map(|z| c(z.re / q, z.im / p));
    Ok(p * p * inner(&(a * eta), &j).re)
}

/// `(2/p^2) min_{|xi|=1} H[1; xi]` for `F_p`, reduced to an eigenvalue problem.
pub fn delta_from_hessian(a: &CMatrix, p: f64) -> Result<f64> {
    let h = hess_power(p, c(1.0, 0.0))?;
    check_exponent_gt1(p)?;
    let m = kron_identity(&h, a.nrows()) * realify(a);
    let s = (&m + m.transpose()) * 0.5;
    Ok(2.0 / (p * p) * nalgebra::SymmetricEigen::new(s).eigenvalues.min())
}

/// Exponents and perturbation of the Bellman function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellmanParams {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

impl BellmanParams {
    pub fn new(p: f64, delta: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::InvalidExponent { p, reason: "the Bellman function needs 2 <= p < inf" });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::OutOfRange(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(Self { p, q: conjugate(p), delta })
    }

    fn p_hat(&self) -> f64 {
        1.0 - 2.0 / self.p
    }

    /// True on the region `|zeta|^p >= |eta|^q`.
    fn outer_branch(&self, zeta: Complex64, eta: Complex64) -> bool {
        zeta.norm().powf(self.p) >= eta.norm().powf(self.q)
    }

    /// Rejects points within the band around `eta = 0` or `|zeta|^p = |eta|^q`.
    fn check_off_singular(&self, zeta: Complex64, eta: Complex64) -> Result<()> {
        if eta.norm() <= SINGULAR_BAND {
            return Err(Error::SingularSet("eta = 0"));
        }
        let (u, v) = (zeta.norm().powf(self.p), eta.norm().powf(self.q));
        if (u - v).abs() <= SINGULAR_BAND * u.max(v) {
            return Err(Error::SingularSet("|zeta|^p = |eta|^q"));
        }
        Ok(())
    }
}

pub fn bellman_value(b: &BellmanParams, zeta: Complex64, eta: Complex64) -> f64 {
    let (u, v) = (zeta.norm(), eta.norm());
    let (up, vq) = (u.powf(b.p), v.powf(b.q));
    if up >= vq {
        (1.0 + (1.0 - b.p_hat()) * b.delta) * up + (1.0 + b.p_hat() * b.delta) * vq
    } else {
        up + vq + b.delta * u * u * v.powf(2.0 - b.q)
    }
}

/// `(d Q / d conj zeta, d Q / d conj eta)`; the real gradient is twice the
/// vectorization of each component.
pub fn bellman_gradient(b: &BellmanParams, zeta: Complex64, eta: Complex64) -> (Complex64, Complex64) {
    let (p, q, d) = (b.p, b.q, b.delta);
    let (u, v) = (zeta.norm(), eta.norm());
    // |w|^(r-2) w with the continuous value 0 at w = 0 for r > 1.
    let pw = |w: Complex64, m: f64, r: f64| if m == 0.0 { c(0.0, 0.0) } else { w * m.powf(r - 2.0) };
    if b.outer_branch(zeta, eta) {
        let gz = pw(zeta, u, p) * (0.5 * p * (1.0 + (1.0 - b.p_hat()) * d));
        let ge = pw(eta, v, q) * (0.5 * q * (1.0 + b.p_hat() * d));
        (gz, ge)
    } else {
        let gz = pw(zeta, u, p) * (0.5 * p) + zeta * (d * v.powf(2.0 - q));
        let ge = pw(eta, v, q) * (0.5 * q) + eta * (d * u * u * 0.5 * (2.0 - q) * v.powf(-q));
        (gz, ge)
    }
}

/// Real 4x4 Hessian of `Q` in `(Re zeta, Im zeta, Re eta, Im eta)`.
pub fn bellman_hessian(b: &BellmanParams, zeta: Complex64, eta: Complex64) -> Result<RMatrix> {
    b.check_off_singular(zeta, eta)?;
    let [zz, ze, ez, ee] = hessian_blocks(b, zeta, eta);
    let mut h = RMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            h[(i, j)] = zz[i][j];
            h[(i, 2 + j)] = ze[i][j];
            h[(2 + i, j)] = ez[i][j];
            h[(2 + i, 2 + j)] = ee[i][j];
        }
    }
    Ok(h)
}

/// Blocks `[zeta-zeta, zeta-eta, eta-zeta, eta-eta]`; assumes an off-singular point.
fn hessian_blocks(b: &BellmanParams, zeta: Complex64, eta: Complex64) -> [Block; 4] {
    let (p, q, d) = (b.p, b.q, b.delta);
    let zero = [[0.0; 2]; 2];
    let scale = |k: Block, s: f64| k.map(|row| row.map(|x| x * s));
    let add = |x: Block, y: Block| [[x[0][0] + y[0][0], x[0][1] + y[0][1]], [x[1][0] + y[1][0], x[1][1] + y[1][1]]];
    if b.outer_branch(zeta, eta) {
        let zz = scale(hess_power_block(p, zeta), 1.0 + (1.0 - b.p_hat()) * d);
        let ee = scale(hess_power_block(q, eta), 1.0 + b.p_hat() * d);
        [zz, zero, zero, ee]
    } else {
        let v = eta.norm();
        let u2 = zeta.norm_sqr();
        let fe = v.powf(2.0 - q);
        let zz = add(hess_power_block(p, zeta), [[2.0 * d * fe, 0.0], [0.0, 2.0 * d * fe]]);
        let ee = add(hess_power_block(q, eta), scale(hess_power_block(2.0 - q, eta), d * u2));
        let k = 2.0 * (2.0 - q) * d * v.powf(-q);
        let ze = [[k * zeta.re * eta.re, k * zeta.re * eta.im], [k * zeta.im * eta.re, k * zeta.im * eta.im]];
        let ez = [[ze[0][0], ze[1][0]], [ze[0][1], ze[1][1]]];
        [zz, ze, ez, ee]
    }
}

/// `<(Hess ⊗ I) W(omega), (M(A) ⊕ M(B)) W(omega)>` with a given real 4x4 Hessian.
pub fn pair_hessian(hess: &RMatrix, a: &CMatrix, b: &CMatrix, omega1: &CVector, omega2: &CVector) -> Result<f64> {
    let n = omega1.len();
    if omega2.len() != n || a.nrows() != n || b.nrows() != n {
        return Err(Error::Dimension("A, B, omega1 and omega2 must share the dimension n".into()));
    }
    let w = vectorize_pair(omega1, omega2)?;
    // vectorize_pair interleaves per vector: (Re w1, Im w1, Re w2, Im w2), each of length n,
    // which is exactly the block layout of Hess ⊗ I_n.
    let m = direct_sum(&realify(a), &realify(b));
    Ok((kron_identity(hess, n) * &w).dot(&(m * &w)))
}

/// Generalized Hessian form of `Q` at `(zeta, eta)` in direction `(omega1, omega2)`.
pub fn bellman_hessian_form(
    b: &BellmanParams,
    a_mat: &CMatrix,
    b_mat: &CMatrix,
    zeta: Complex64,
    eta: Complex64,
    omega1: &CVector,
    omega2: &CVector,
) -> Result<f64> {
    let h = bellman_hessian(b, zeta, eta)?;
    pair_hessian(&h, a_mat, b_mat, omega1, omega2)
}

/// Three-term closed form of the Hessian form of `F_2 ⊗ F_(2-q)`.
///
/// The leading term carries `H[F_2]`; direct assembly of the 4x4 Hessian
/// confirms this and rules out `H[F_q]` in that position.
pub fn tensor_hessian_form(
    a: &CMatrix,
    b: &CMatrix,
    q: f64,
    zeta: Complex64,
    eta: Complex64,
    omega1: &CVector,
    omega2: &CVector,
) -> Result<f64> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidExponent { p: q, reason: "the tensor form needs 1 < q < 2" });
    }
    if eta.norm() == 0.0 || zeta.norm() >= eta.norm().powf(q - 1.0) {
        return Err(Error::OutOfRange("the tensor form needs eta != 0 and |zeta| < |eta|^(q-1)".into()));
    }
    let r = 2.0 - q;
    let v = eta.norm();
    let first = if omega1.iter().all(|z| z.norm() == 0.0) {
        0.0
    } else {
        v.powf(r) * 2.0 * inner(&(a * omega1), omega1).re
    };
    let second = zeta.norm_sqr() * hess_form_power(b, r, eta, omega2)?;
    let k = 2.0 * r * v.powf(-q);
    let ze: Block = [[zeta.re * eta.re, zeta.re * eta.im], [zeta.im * eta.re, zeta.im * eta.im]];
    let ez: Block = [[ze[0][0], ze[1][0]], [ze[0][1], ze[1][1]]];
    let (x1, x2) = (vectorize(omega1), vectorize(omega2));
    let third = k * pair_block(&ze, &x2, &realify(a), &x1);
    let fourth = k * pair_block(&ez, &x1, &realify(b), &x2);
    Ok(first + second + third + fourth)
}

/// Direct 4x4 assembly of the Hessian of `|zeta|^2 |eta|^(2-q)`.
pub fn tensor_hessian(q: f64, zeta: Complex64, eta: Complex64) -> Result<RMatrix> {
    if eta.norm() == 0.0 {
        return Err(Error::SingularSet("eta = 0"));
    }
    let r = 2.0 - q;
    let v = eta.norm();
    let mut h = RMatrix::zeros(4, 4);
    let ee = hess_power_block(r, eta);
    let k = 2.0 * r * v.powf(-q);
    let (zv, ev) = ([zeta.re, zeta.im], [eta.re, eta.im]);
    for i in 0..2 {
        h[(i, i)] = 2.0 * v.powf(r);
        for j in 0..2 {
            h[(2 + i, 2 + j)] = zeta.norm_sqr() * ee[i][j];
            h[(i, 2 + j)] = k * zv[i] * ev[j];
            h[(2 + j, i)] = k * zv[i] * ev[j];
        }
    }
    Ok(h)
}

/// `delta = lambda Delta_q(B) / (10 Lambda^2)`.
pub fn delta_choice(lambda: f64, big_lambda: f64, delta_q_b: f64) -> Result<f64> {
    if !(lambda > 0.0 && big_lambda > 0.0 && delta_q_b > 0.0) {
        return Err(Error::OutOfRange(format!(
            "delta choice needs positive inputs, got lambda={lambda}, Lambda={big_lambda}, Delta={delta_q_b}"
        )));
    }
    Ok(lambda * delta_q_b / (10.0 * big_lambda * big_lambda))
}

/// Infimum of `a X - b + c / X` over `X > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperbolaInf {
    Finite(f64),
    UnboundedBelow,
}

impl HyperbolaInf {
    pub fn is_positive(&self) -> bool {
        matches!(self, HyperbolaInf::Finite(v) if *v > 0.0)
    }

    pub fn value(&self) -> f64 {
        match self {
            HyperbolaInf::Finite(v) => *v,
            HyperbolaInf::UnboundedBelow => f64::NEG_INFINITY,
        }
    }
}

pub fn inf_hyperbola(a: f64, b: f64, c: f64) -> HyperbolaInf {
    if a < 0.0 || c < 0.0 {
        HyperbolaInf::UnboundedBelow
    } else {
        HyperbolaInf::Finite(2.0 * (a * c).sqrt() - b)
    }
}

/// Search effort for [`convexity_verify`].
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub seeds: usize,
    pub refine: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { seeds: 10_000, refine: 16, max_sweeps: 300, seed: 0x00b3_11a4 }
    }
}

/// A point `(v, omega)` together with the Hessian form there.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub zeta: Complex64,
    pub eta: Complex64,
    pub omega1: CVector,
    pub omega2: CVector,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub params: BellmanParams,
    pub delta_p: f64,
    pub lambda: f64,
    pub big_lambda: f64,
    /// `inf H / (|omega1| |omega2|)` found by the search.
    pub min_ratio: f64,
    pub bound: f64,
    pub witness: Witness,
    pub pass: bool,
}

/// Search coordinates: `t = ln(|zeta|^p)` with `|eta| = 1`, the two arguments,
/// then unnormalized `V(omega1)` and `V(omega2)`.
struct Search<'a> {
    b: BellmanParams,
    a_mat: &'a CMatrix,
    b_mat: &'a CMatrix,
    ma: RMatrix,
    mb: RMatrix,
    n: usize,
}

const T_RANGE: f64 = 30.0;
const T_GAP: f64 = 1e-9;

struct Evaluated {
    ratio: f64,
    h11: f64,
}

impl<'a> Search<'a> {
    fn new(b: BellmanParams, a_mat: &'a CMatrix, b_mat: &'a CMatrix) -> Self {
        Self { b, a_mat, b_mat, ma: realify(a_mat), mb: realify(b_mat), n: a_mat.nrows() }
    }

    fn dim(&self) -> usize {
        3 + 4 * self.n
    }

    fn point(&self, x: &[f64]) -> (Complex64, Complex64) {
        let mut t = x[0].clamp(-T_RANGE, T_RANGE);
        if t.abs() < T_GAP {
            t = if t < 0.0 { -T_GAP } else { T_GAP };
        }
        let zeta = Complex64::from_polar((t / self.b.p).exp(), x[1]);
        (zeta, Complex64::from_polar(1.0, x[2]))
    }

    fn directions(&self, x: &[f64]) -> (RVector, RVector) {
        let n2 = 2 * self.n;
        let unit = |s: &[f64]| {
            let v = RVector::from_column_slice(s);
            let nv = v.norm();
            if nv == 0.0 {
                RVector::from_fn(s.len(), |i, _| if i == 0 { 1.0 } else { 0.0 })
            } else {
                v / nv
            }
        };
        (unit(&x[3..3 + n2]), unit(&x[3 + n2..3 + 2 * n2]))
    }

    /// Infimum over the relative scale of `omega1` and `omega2`, for fixed directions.
    fn eval(&self, x: &[f64]) -> Evaluated {
        let (zeta, eta) = self.point(x);
        let (x1, x2) = self.directions(x);
        let [zz, ze, ez, ee] = hessian_blocks(&self.b, zeta, eta);
        let h11 = pair_block(&zz, &x1, &self.ma, &x1);
        let h22 = pair_block(&ee, &x2, &self.mb, &x2);
        let h12 = pair_block(&ze, &x2, &self.ma, &x1) + pair_block(&ez, &x1, &self.mb, &x2);
        Evaluated { ratio: inf_hyperbola(h11, -h12, h22).value(), h11 }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.eval(x).ratio
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        // Mix wide and near-interface exponents.
        let t: f64 = if rng.gen_bool(0.5) { rng.gen_range(-T_RANGE..T_RANGE) } else { rng.gen_range(-2.0..2.0) };
        x.push(t);
        x.push(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        x.push(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        for _ in 0..4 * self.n {
            x.push(rng.sample(StandardNormal));
        }
        x
    }

    fn coordinate_descent(&self, mut x: Vec<f64>, max_sweeps: usize) -> (Vec<f64>, f64) {
        let mut fx = self.objective(&x);
        let mut steps: Vec<f64> = (0..x.len()).map(|i| if i == 0 { 1.0 } else { 0.3 }).collect();
        for _ in 0..max_sweeps {
            if fx == f64::NEG_INFINITY || steps.iter().all(|&s| s < 1e-9) {
                break;
            }
            for i in 0..x.len() {
                let mut moved = false;
                for dir in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[i] += dir * steps[i];
                    let fy = self.objective(&y);
                    if fy < fx {
                        x = y;
                        fx = fy;
                        moved = true;
                        break;
                    }
                }
                if moved {
                    steps[i] *= 1.5;
                } else {
                    steps[i] *= 0.5;
                }
            }
        }
        (x, fx)
    }

    fn witness(&self, x: &[f64]) -> Witness {
        let (zeta, eta) = self.point(x);
        let (x1, x2) = self.directions(x);
        let e = self.eval(x);
        let to_c = |v: &RVector| CVector::from_fn(self.n, |i, _| c(v[i], v[self.n + i]));
        let (mut w1, mut w2) = (to_c(&x1), to_c(&x2));
        // An unbounded infimum is realized by dropping the other direction.
        if e.ratio == f64::NEG_INFINITY {
            if e.h11 < 0.0 {
                w2.fill(c(0.0, 0.0));
            } else {
                w1.fill(c(0.0, 0.0));
            }
        }
        let value = bellman_hessian_form(&self.b, self.a_mat, self.b_mat, zeta, eta, &w1, &w2)
            .unwrap_or(f64::NAN);
        Witness { zeta, eta, omega1: w1, omega2: w2, value }
    }

    /// Seeded search followed by coordinate descent on the best seeds.
    fn run(&self, budget: &SearchBudget) -> (f64, Witness) {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let seeds: Vec<Vec<f64>> = (0..budget.seeds.max(1)).map(|_| self.random_point(&mut rng)).collect();
        let mut scored: Vec<(f64, usize)> =
            seeds.par_iter().enumerate().map(|(i, x)| (self.objective(x), i)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let refined: Vec<(f64, Vec<f64>)> = scored
            .par_iter()
            .take(budget.refine.max(1))
            .map(|&(_, i)| {
                let (x, f) = self.coordinate_descent(seeds[i].clone(), budget.max_sweeps);
                (f, x)
            })
            .collect();
        let (best, x) = refined
            .into_iter()
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .expect("at least one seed");
        (best, self.witness(&x))
    }
}

fn check_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension("A and B must have the same size".into()));
    }
    crate::ellipticity::checked_bounds(a)?;
    crate::ellipticity::checked_bounds(b)?;
    Ok(())
}

/// Checks `H_Q >= (Delta_p / 5) (lambda / Lambda) |omega1| |omega2|` off the
/// singular set, with `delta` chosen by [`delta_choice`].
pub fn convexity_verify(p: f64, a: &CMatrix, b: &CMatrix, budget: &SearchBudget) -> Result<ConvexityReport> {
    check_pair(a, b)?;
    check_exponent_gt1(p)?;
    let dp = delta_p(a, p)?.min(delta_p(b, p)?);
    if dp <= 0.0 {
        return Err(Error::HypothesisUnmet(format!("Delta_p(A, B) = {dp:e} is not positive")));
    }
    let (la, lla) = crate::ellipticity::checked_bounds(a)?;
    let (lb, llb) = crate::ellipticity::checked_bounds(b)?;
    let (lambda, big_lambda) = (la.min(lb), lla.max(llb));
    let delta = delta_choice(lambda, big_lambda, delta_p(b, conjugate(p))?)?;
    let params = BellmanParams::new(p, delta)?;
    let (min_ratio, witness) = Search::new(params, a, b).run(budget);
    let bound = dp / 5.0 * lambda / big_lambda;
    Ok(ConvexityReport {
        params,
        delta_p: dp,
        lambda,
        big_lambda,
        min_ratio,
        bound,
        witness,
        pass: min_ratio >= bound - 1e-8,
    })
}

/// Looks for a point where the Hessian form of `Q` is negative. Tries the
/// eigen-minimizers of both diagonal blocks first, then falls back to search.
pub fn violation_search(params: &BellmanParams, a: &CMatrix, b: &CMatrix, budget: &SearchBudget) -> Result<Option<Witness>> {
    check_pair(a, b)?;
    let n = a.nrows();
    let zero = CVector::from_element(n, c(0.0, 0.0));
    let mut candidates = Vec::new();
    // Outer branch, omega2 = 0: proportional to H[F_p](1; omega1).
    let xi_a = delta_p_minimizer(a, params.q)?;
    let (zeta, eta) = (c(1.0, 0.0), c(0.5f64.powf(1.0 / params.q), 0.0));
    candidates.push((zeta, eta, xi_a, zero.clone()));
    // Outer branch, omega1 = 0: proportional to H[F_q](eta; omega2).
    let xi_b = delta_p_minimizer(b, params.p)?;
    candidates.push((zeta, eta, zero.clone(), xi_b.clone()));
    // Inner branch with small zeta, omega1 = 0.
    candidates.push((c(1e-3, 0.0), c(1.0, 0.0), zero, xi_b));
    for (z, e, w1, w2) in candidates {
        let value = bellman_hessian_form(params, a, b, z, e, &w1, &w2)?;
        if value < 0.0 {
            return Ok(Some(Witness { zeta: z, eta: e, omega1: w1, omega2: w2, value }));
        }
    }
    let (best, w) = Search::new(*params, a, b).run(budget);
    Ok((best < 0.0 && w.value < 0.0).then_some(w))
}

/// Real Hessian of `Q` by central differences of the analytic gradient.
pub fn bellman_hessian_fd(b: &BellmanParams, zeta: Complex64, eta: Complex64, step: f64) -> RMatrix {
    let x0 = [zeta.re, zeta.im, eta.re, eta.im];
    let grad = |x: &[f64; 4]| {
        let (gz, ge) = bellman_gradient(b, c(x[0], x[1]), c(x[2], x[3]));
        [2.0 * gz.re, 2.0 * gz.im, 2.0 * ge.re, 2.0 * ge.im]
    };
    let mut h = RMatrix::zeros(4, 4);
    for j in 0..4 {
        let hj = step * x0[j].abs().max(1.0);
        let (mut xp, mut xm) = (x0, x0);
        xp[j] += hj;
        xm[j] -= hj;
        let (gp, gm) = (grad(&xp), grad(&xm));
        for i in 0..4 {
            h[(i, j)] = (gp[i] - gm[i]) / (2.0 * hj);
        }
    }
    (&h + h.transpose()) * 0.5
}
