//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use pellip_core::bellman::*;
use pellip_core::ellipticity::*;
use pellip_core::field::*;
use pellip_core::heatnorm::*;
use pellip_core::realform::{CMatrix, CVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_260_517;

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn sign(x: f64, band: f64) -> i8 {
    if x > band {
        1
    } else if x < -band {
        -1
    } else {
        0
    }
}

const EXPONENTS: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 8.0];

fn random_set() -> Vec<(CMatrix, f64)> {
    let mut r = rng(2);
    (0..500)
        .map(|k| {
            let n = r.gen_range(1..=6);
            (random_accretive(&mut r, n), EXPONENTS[k % EXPONENTS.len()])
        })
        .collect()
}

fn closed_form_delta_p() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let phi = -1.5 + 3.0 * i as f64 / 19.0;
        for j in 0..20 {
            let p = 1.05 * (40.0f64 / 1.05).powf(j as f64 / 19.0);
            for n in [1, 2, 5] {
                let d = delta_p(&rotation_matrix(phi, n).unwrap(), p).unwrap();
                worst = worst.max((d - (phi.cos() - (1.0 - 2.0 / p).abs())).abs());
            }
        }
    }
    let mut worst_skew: f64 = 0.0;
    for i in 0..20 {
        let p = 2.0 + 38.0 * i as f64 / 19.0;
        for j in 0..20 {
            let w = 0.99 * j as f64 / 19.0;
            let d = delta_p(&skew_matrix(w).unwrap(), p).unwrap();
            let ph = 1.0 - 2.0 / p;
            worst_skew = worst_skew.max((d - (1.0 - (ph * ph + w * w).sqrt())).abs());
        }
    }
    Outcome::new(worst <= 1e-10 && worst_skew <= 1e-10, format!("rotation err {worst:.1e}, skew err {worst_skew:.1e}"))
}

fn duality_and_conjugation() -> Outcome {
    let (mut dual, mut conj, mut sign_bad) = (0.0f64, 0.0f64, 0);
    for (a, p) in random_set() {
        let d = delta_p(&a, p).unwrap();
        dual = dual.max((d - delta_p(&a, conjugate(p)).unwrap()).abs());
        conj = conj.max((d - delta_p(&a.map(|z| z.conj()), p).unwrap()).abs());
        let s = (sign(d, 1e-10), sign(delta_p(&a.adjoint(), p).unwrap(), 1e-10));
        if s.0 * s.1 < 0 {
            sign_bad += 1;
        }
    }
    Outcome::new(
        dual <= 1e-10 && conj <= 1e-10 && sign_bad == 0,
        format!("|D_p - D_q| {dual:.1e}, |D_p(conj A) - D_p(A)| {conj:.1e}, adjoint sign flips {sign_bad}"),
    )
}

fn w_p_equivalence() -> Outcome {
    let mut disagree = 0;
    for (a, p) in random_set() {
        let d = delta_p(&a, p).unwrap();
        let (_, norm) = script_w_p(&a, p).unwrap();
        if (norm - 1.0).abs() <= 1e-9 || d.abs() <= 1e-9 {
            continue;
        }
        if (norm < 1.0) != (d > 0.0) {
            disagree += 1;
        }
    }
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = r.gen_range(1..=5);
        let b = random_real_pd(&mut r, n);
        let phi = r.gen_range(-1.5..1.5);
        let p = [1.3, 2.0, 3.0, 6.0][k % 4];
        let a = &b * Complex64::from_polar(1.0, phi);
        let (_, norm) = script_w_p(&a, p).unwrap();
        let want = closed_form_delta(&ClosedForm::RotatedWpNorm { b: b.clone(), phi }, p).unwrap().sqrt();
        worst = worst.max((norm - want).abs() / want.max(1.0));
    }
    Outcome::new(disagree == 0 && worst <= 1e-9, format!("equivalence disagreements {disagree}, rotated-family err {worst:.1e}"))
}

fn mu_sandwich() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for (a, p) in random_set() {
        let d = delta_p(&a, p).unwrap();
        if d < 0.0 {
            continue;
        }
        checked += 1;
        let (l, ll) = (lambda(&a), big_lambda(&a));
        let m = mu(&a);
        let mid = m - (1.0 - 2.0 / p).abs();
        if !(d / ll <= mid + 1e-8 && mid <= m * d / l + 1e-8) {
            violations += 1;
        }
    }
    let mut eq: f64 = 0.0;
    for i in 0..30 {
        let phi = -1.45 + 2.9 * i as f64 / 29.0;
        for p in [1.5, 2.0, 3.0, 4.0, 10.0] {
            let a = rotation_matrix(phi, 3).unwrap();
            let d = delta_p(&a, p).unwrap();
            if d < 0.0 {
                continue;
            }
            let (l, ll, m) = (lambda(&a), big_lambda(&a), mu(&a));
            let mid = m - (1.0 - 2.0 / p).abs();
            eq = eq.max((d / ll - mid).abs()).max((mid - m * d / l).abs());
        }
    }
    Outcome::new(violations == 0 && eq <= 1e-9, format!("{checked} elliptic samples, violations {violations}, rotation equality err {eq:.1e}"))
}

fn bellman_convexity() -> Outcome {
    let mut pairs: Vec<(f64, CMatrix, CMatrix)> = Vec::new();
    for p in [2.0, 3.0, 4.0, 8.0] {
        let edge = phi_p(p).unwrap().min(1.5);
        pairs.push((p, rotation_matrix(0.3 * edge, 2).unwrap(), rotation_matrix(0.3 * edge, 2).unwrap()));
        pairs.push((p, rotation_matrix(0.8 * edge, 2).unwrap(), rotation_matrix(-0.5 * edge, 2).unwrap()));
        pairs.push((p, rotation_matrix(-0.9 * edge, 3).unwrap(), rotation_matrix(0.9 * edge, 3).unwrap()));
    }
    let mut r = rng(5);
    while pairs.len() < 30 {
        let p = [2.0, 3.0, 4.0, 8.0][pairs.len() % 4];
        let n = r.gen_range(1..=3);
        let (a, b) = (random_accretive(&mut r, n), random_accretive(&mut r, n));
        if delta_p(&a, p).unwrap().min(delta_p(&b, p).unwrap()) > 0.02 {
            pairs.push((p, a, b));
        }
    }
    let mut failures = 0;
    let mut margin = f64::INFINITY;
    for (k, (p, a, b)) in pairs.iter().enumerate() {
        let budget = SearchBudget { seed: SEED + k as u64, ..SearchBudget::default() };
        let rep = convexity_verify(*p, a, b, &budget).unwrap();
        if !rep.pass {
            failures += 1;
        }
        margin = margin.min(rep.min_ratio - rep.bound);
    }
    let mut witnesses = 0;
    for p in [3.0, 4.0, 8.0] {
        let a = rotation_matrix(phi_p(p).unwrap() + 0.1, 2).unwrap();
        let params = BellmanParams::new(p, 0.01).unwrap();
        let w = violation_search(&params, &a, &a, &SearchBudget::default()).unwrap();
        if w.is_some_and(|w| w.value < 0.0) {
            witnesses += 1;
        }
    }
    Outcome::new(
        failures == 0 && witnesses == 3,
        format!("30 pairs, failures {failures}, min (ratio - bound) {margin:.3e}, outside-angle witnesses {witnesses}/3"),
    )
}

fn hessian_oracles() -> Outcome {
    let mut r = rng(6);
    let mut worst_q: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let p = [2.5, 3.0, 4.0, 8.0][count % 4];
        let params = BellmanParams::new(p, r.gen_range(0.01..0.3)).unwrap();
        let q = params.q;
        let zeta = Complex64::from_polar(r.gen_range(0.2f64..2.0), r.gen_range(-PI..PI));
        let eta = Complex64::from_polar(r.gen_range(0.2f64..2.0), r.gen_range(-PI..PI));
        let gap = zeta.norm().powf(p) / eta.norm().powf(q);
        if (gap - 1.0).abs() < 0.05 {
            continue;
        }
        count += 1;
        let n = r.gen_range(1..=3);
        let (a, b) = (random_accretive(&mut r, n), random_accretive(&mut r, n));
        let (w1, w2) = (gaussian_vector(&mut r, n), gaussian_vector(&mut r, n));
        let h = 2e-4 * zeta.norm().min(eta.norm());
        let scale = |hm: &pellip_core::realform::RMatrix| {
            hm.norm() * (a.norm() + b.norm()) * (w1.norm_squared() + w2.norm_squared())
        };

        let fd = bellman_fd_hessian(&params, zeta, eta, h);
        let analytic = bellman_hessian_form(&params, &a, &b, zeta, eta, &w1, &w2).unwrap();
        let oracle = pair_hessian(&fd, &a, &b, &w1, &w2).unwrap();
        worst_q = worst_q.max((analytic - oracle).abs() / scale(&fd));

        // tensor term |zeta|^2 |eta|^(2-q) on the region where it is used
        let zs = zeta * (0.9 * eta.norm().powf(q - 1.0) / zeta.norm());
        let fd_t = fd_hessian(
            |y| (y[0] * y[0] + y[1] * y[1]) * (y[2] * y[2] + y[3] * y[3]).powf(0.5 * (2.0 - q)),
            [zs.re, zs.im, eta.re, eta.im],
            2e-4 * zs.norm().min(eta.norm()),
        );
        let t = tensor_hessian_form(&a, &b, q, zs, eta, &w1, &w2).unwrap();
        let t_oracle = pair_hessian(&fd_t, &a, &b, &w1, &w2).unwrap();
        worst_t = worst_t.max((t - t_oracle).abs() / scale(&fd_t));
    }
    let worst_id = hessian_identities();
    Outcome::new(
        worst_q <= 1e-5 && worst_t <= 1e-5 && worst_id <= 1e-12,
        format!("Q form err {worst_q:.1e}, tensor form err {worst_t:.1e}, identities err {worst_id:.1e}"),
    )
}

/// Largest relative defect of the six algebraic identities of the power-function form.
fn hessian_identities() -> f64 {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
    for _ in 0..300 {
        let n = r.gen_range(1..=4);
        let a = gaussian_matrix(&mut r, n);
        let xi = gaussian_vector(&mut r, n);
        let zeta = Complex64::from_polar(r.gen_range(0.3f64..3.0), r.gen_range(-PI..PI));
        let rr = r.gen_range(1.1..6.0);
        let t = r.gen_range(0.3..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let hf = |a: &CMatrix, r: f64, z: Complex64, x: &CVector| hess_form_power(a, r, z, x).unwrap();
        let base = hf(&a, rr, zeta, &xi);
        let two = 2.0 * pellip_core::realform::inner(&(&a * &xi), &xi).re;
        let i = Complex64::i();
        worst = worst
            .max(rel(hf(&a, 2.0, zeta, &xi), two))
            .max(rel(hf(&a, rr, zeta * t, &xi), t.abs().powf(rr - 2.0) * base))
            .max(rel(hf(&a, rr, zeta, &(&xi * c(t, 0.0))), t * t * base))
            .max(rel(hf(&a, rr, zeta * i, &xi), hf(&a, rr, zeta, &(&xi * i))))
            .max(rel(base, zeta.norm().powf(rr - 4.0) * hf(&a, rr, c(1.0, 0.0), &(&xi * zeta.conj()))))
            .max(rel(base, hf(&a.map(|z| z.conj()), rr, zeta.conj(), &xi.map(|z| z.conj()))));
    }
    worst
}

fn discrete_identities() -> Outcome {
    let inputs = SmoothInputs::canonical(BellmanParams::new(4.0, 0.1).unwrap());
    let study = refinement_study(&inputs, &[64, 128, 256], 1.9).unwrap();
    let orders: Vec<String> = study.orders.iter().map(|o| format!("[{:.2}, {:.2}, {:.2}]", o[0], o[1], o[2])).collect();
    let ii = study.residuals.iter().map(|r| r.antisymmetric).fold(0.0, f64::max);
    Outcome::new(
        study.converged.iter().all(|&x| x),
        format!("orders (i, ii, iii) per doubling {}, residual (ii) max {ii:.1e}", orders.join(" ")),
    )
}

fn counterexample() -> Outcome {
    let grid = Grid::periodic(2, 256, 4.0).unwrap();
    let gammas = linspace_step(0.5, 0.99, 0.01).unwrap();
    let scan = gamma_scan(40.0, &gammas, &grid).unwrap();
    let first_negative = scan.iter().find(|r| r.value < 0.0).map(|r| r.gamma);
    let gap = scan.iter().map(|r| r.relative_gap).fold(0.0, f64::max);

    let moderate = counterexample_section7(4.0, 0.5, &grid).unwrap();
    let field = MatrixField::section7(&grid, 0.5).unwrap();
    let mut r = rng(8);
    let mut min_probe = f64::INFINITY;
    for _ in 0..100 {
        let (alpha, beta) = (r.gen_range(0.5..2.0), r.gen_range(0.5..2.0));
        let x0 = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let k = [r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-1.0..1.0)];
        let weight = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let f = GridFunction::sample(&grid, |x| {
            let (y0, y1) = (x[0] - x0[0], x[1] - x0[1]);
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[0] * x[1];
            c(-alpha * (y0 * y0 + y1 * y1), phase).exp() + weight * (-beta * (x[0] * x[0] + x[1] * x[1])).exp()
        });
        min_probe = min_probe.min(dissipativity_functional(&field, &f, 4.0).unwrap().value);
    }
    let pass = first_negative.is_some() && gap <= 1e-6 && moderate.value >= -1e-9 && moderate.fd_value >= -1e-9 && min_probe >= -1e-9;
    Outcome::new(
        pass,
        format!(
            "p=40 first negative gamma {first_negative:?} (value at 0.99 {:.5}), decomposition gap {gap:.1e}; p=4 gamma=0.5 value {:.4}, min over 100 probes {min_probe:.4}",
            scan.last().unwrap().value,
            moderate.value
        ),
    )
}

fn sharp_heat_constant() -> Outcome {
    let mut worst_out: f64 = 0.0;
    let mut worst_in: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    for p in [1.5, 3.0, 4.0, 10.0] {
        let edge = phi_p(p).unwrap();
        for k in 1..=8 {
            let phi = edge + (1.5 - edge) * k as f64 / 8.0;
            let o = gaussian_oracle(phi, p, 1.0).unwrap().value;
            worst_out = worst_out.max((o - heat_norm_constant(phi, p).unwrap()).abs());
        }
        for phi in [0.0, 0.5 * edge, -0.5 * edge, edge, -edge] {
            worst_in = worst_in.max((gaussian_oracle(phi, p, 1.0).unwrap().value - 1.0).abs());
        }
        for phi in [0.5 * edge, edge + 0.5 * (1.5 - edge)] {
            let v: Vec<f64> = [0.1, 1.0, 10.0].iter().map(|&t| gaussian_oracle(phi, p, t).unwrap().value).collect();
            worst_t = worst_t.max((v[0] - v[1]).abs()).max((v[1] - v[2]).abs());
        }
    }
    let mut worst_end: f64 = 0.0;
    for k in 0..15 {
        let phi = -1.5 + 3.0 * k as f64 / 14.0;
        worst_end = worst_end.max((heat_norm_constant(phi, 1.0).unwrap() - 1.0 / phi.cos().sqrt()).abs());
    }
    Outcome::new(
        worst_out <= 1e-6 && worst_in <= 1e-8 && worst_t <= 1e-8 && worst_end <= 1e-10,
        format!("oracle vs formula {worst_out:.1e}, inside angle {worst_in:.1e}, t-spread {worst_t:.1e}, p=1 endpoint {worst_end:.1e}"),
    )
}

fn heat_flow_embedding() -> Outcome {
    let grid = Grid::periodic(1, 128, PI).unwrap();
    let mut r = rng(10);
    let mut failures = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut runs = 0;
    for k in 0..20 {
        let p = [1.5, 3.0, 4.0, 6.0][k % 4];
        let edge = phi_p(p).unwrap();
        let scalar = |r: &mut ChaCha8Rng| {
            CMatrix::from_element(1, 1, Complex64::from_polar(r.gen_range(0.5..2.0), r.gen_range(-0.95 * edge..0.95 * edge)))
        };
        let (a, b) = (scalar(&mut r), scalar(&mut r));
        let fa = MatrixField::constant(&grid, &a).unwrap();
        let fb = MatrixField::constant(&grid, &b).unwrap();
        for _ in 0..3 {
            let coef: Vec<Complex64> = (0..8).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
            let trig = |cs: &[Complex64], x: f64| cs.iter().enumerate().map(|(m, z)| z * Complex64::from_polar(1.0, m as f64 * x)).sum();
            let f = GridFunction::sample(&grid, |x| trig(&coef[..4], x[0]));
            let g = GridFunction::sample(&grid, |x| trig(&coef[4..], x[0]) * (-(x[0] * x[0])).exp());
            let rep = heat_flow_experiment(&fa, &fb, &f, &g, p, &TimeSchedule::default()).unwrap();
            runs += 1;
            if !rep.pass() {
                failures += 1;
            }
            worst_ratio = worst_ratio.max(rep.ratio);
        }
    }
    Outcome::new(failures == 0, format!("{runs} runs on 20 pairs, failures {failures}, max bound ratio {worst_ratio:.3e}"))
}

fn mollification() -> Outcome {
    let grid = Grid::periodic(2, 16, 1.0).unwrap();
    let h = grid.spacing();
    let mut r = rng(11);
    let mut worst_d: f64 = 0.0;
    let mut worst_mu: f64 = 0.0;
    for k in 0..20 {
        let p = [1.5, 3.0, 4.0, 6.0][k % 4];
        let (a1, a2) = (random_accretive(&mut r, 2), random_accretive(&mut r, 2));
        let normal = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let offset = r.gen_range(-0.5..0.5);
        let field = MatrixField::from_fn(&grid, |x| {
            if (normal[0] * x[0] + normal[1] * x[1] - offset).sin() >= 0.0 {
                a1.clone()
            } else {
                a2.clone()
            }
        })
        .unwrap();
        let dp = |f: &MatrixField| f.cells().iter().map(|a| delta_p(a, p).unwrap()).fold(f64::INFINITY, f64::min);
        let mu_f = |f: &MatrixField| f.cells().iter().map(mu).fold(f64::INFINITY, f64::min);
        let (d0, m0) = (dp(&field), mu_f(&field));
        for eps in [h, 2.0 * h, 4.0 * h] {
            let m = mollify(&field, eps).unwrap();
            worst_d = worst_d.max(d0 - dp(&m));
            worst_mu = worst_mu.max(m0 - mu_f(&m));
        }
    }
    Outcome::new(
        worst_d <= 1e-10 && worst_mu <= 1e-8,
        format!("max decrease of Delta_p {worst_d:.1e}, of mu {worst_mu:.1e}"),
    )
}

fn divergence_demo() -> Outcome {
    let n = first_dimension_exceeding(1.4, 4.0, 1e3, 200).unwrap();
    let detail = match n {
        Some(n) => {
            let r = tensorized_demo(1.4, 4.0, n).unwrap();
            format!("C = {:.6}, N_p lower bound {:.1} at n = {n}", r.c, r.n_p_lower)
        }
        None => "no n <= 200 exceeds 1000".into(),
    };
    let growth = (1..=5).map(|n| tensorized_demo(1.4, 4.0, 40 * n).unwrap().n_p_lower).collect::<Vec<_>>();
    let geometric = growth.windows(2).all(|w| w[1] > w[0]);
    Outcome::new(n.is_some() && geometric, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form Delta_p", closed_form_delta_p),
        ("duality and conjugation", duality_and_conjugation),
        ("W_p equivalence", w_p_equivalence),
        ("mu sandwich", mu_sandwich),
        ("Bellman convexity", bellman_convexity),
        ("Hessian oracles", hessian_oracles),
        ("discrete dissipativity identities", discrete_identities),
        ("non-dissipative cone field", counterexample),
        ("sharp heat constant", sharp_heat_constant),
        ("heat-flow embedding", heat_flow_embedding),
        ("mollification monotonicity", mollification),
        ("dimensional divergence", divergence_demo),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} ({:.1}s)", k + 1, out.detail, start.elapsed().as_secs_f64());
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
