//! One line per acceptance criterion, with timings. Instances come from
//! fixed seeds so the run is reproducible.

mod common;

use std::time::Instant;

use common::*;
use rand::Rng;
use structbe::experiments::*;
use structbe::structured::{
    build, cr_of_vector, g_matrix, h_matrix, i_matrix, j1_matrix, j2_matrix, k_matrix, scaling_for,
    vec_of_structure,
};
use structbe::wrls::{compute_zeta, compute_zeta_with, to_saddle, WrlsProblem};
use structbe::*;

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

fn run(id: u8, name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome {
        id,
        name,
        pass,
        detail,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn mat_close(a: &CMatrix, b: &CMatrix) -> bool {
    a.shape() == b.shape() && (a - b).norm() <= 1e-13 * a.norm().max(b.norm()).max(1.0)
}

fn vec_close(a: &CVector, b: &CVector) -> bool {
    (a - b).norm() <= 1e-13 * a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn ex71() -> (bool, String) {
    let sys = ill_scaled_toeplitz_system();
    let (x, y) = ill_scaled_reference_solution();
    let (px, py) = ill_scaled_printed_solution();
    let rounds = x
        .iter()
        .chain(y.iter())
        .zip(px.iter().chain(py.iter()))
        .all(|(v, p)| {
            let digits = 10f64.powi(p.re.abs().log10().floor() as i32 - 4);
            ((v.re / digits).round() * digits - p.re).abs() <= 1e-9 * p.re.abs()
        });
    let (gx, gy) = solve_gep(&sys).unwrap();
    let ours = CVector::from_iterator(8, gx.iter().chain(gy.iter()).copied());
    let fixture = CVector::from_iterator(8, x.iter().chain(y.iter()).copied());
    let gep_agrees = (&ours - &fixture).norm() <= 1e-12 * fixture.norm();

    let w = Weights::absolute();
    let rg = rigal_gaches(&sys, &x, &y).unwrap();
    let s2 = compute_be(&sys, &x, &y, &w, StructureClass::S2, false)
        .unwrap()
        .eta
        .unwrap();
    let s2s = compute_be(&sys, &x, &y, &w, StructureClass::S2, true)
        .unwrap()
        .eta
        .unwrap();
    let pass = rounds
        && gep_agrees
        && (6.2617e-18 / 2.0..=6.2617e-18 * 2.0).contains(&rg)
        && within(s2, 2.1761e-9, 0.01)
        && within(s2s, 4.3070e-5, 0.01);

    // the literal recipe (five-digit solution, weights 1/||block||) for comparison
    let lw = Weights::relative(&sys).unwrap();
    let lit = |sparse| {
        compute_be(&sys, &px, &py, &lw, StructureClass::S2, sparse)
            .unwrap()
            .eta
            .unwrap()
    };
    let detail = format!(
        "rg={rg:.4e} s2={s2:.4e} s2_sps={s2s:.4e} (reference solution rounds to printed digits: {rounds}, \
         own GEP within 1e-12: {gep_agrees}, unit weights) | literal recipe: rg={:.4e} s2={:.4e} s2_sps={:.4e}",
        rigal_gaches(&sys, &px, &py).unwrap(),
        lit(false),
        lit(true)
    );
    (pass, detail)
}

fn ex56() -> (bool, String) {
    let (sys, x, y) = kkt_reference_system();
    let eta = compute_be(
        &sys,
        &x,
        &y,
        &kkt_reference_weights(),
        StructureClass::S0,
        false,
    )
    .unwrap()
    .eta
    .unwrap();
    ((eta - 0.0288).abs() <= 5e-4, format!("eta={eta:.6}"))
}

fn lemmas() -> (bool, String) {
    let mut r = rng(3);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut note = |good: bool| {
        ok &= good;
        checked += 1;
    };
    for _ in 0..100 {
        let n = r.random_range(1..=12);
        let m = r.random_range(1..=12);
        let (v, x, y) = (vector(&mut r, n), vector(&mut r, n), vector(&mut r, m));

        let gen = vector(&mut r, n);
        let a = build(StructureKind::Circulant, n, n, &gen).unwrap();
        let circ = Some(StructureKind::Circulant);
        note(mat_close(
            &cr_of_vector(&v),
            &oracle_action(circ, n, n, &v, false),
        ));
        note(mat_close(
            &h_matrix(&v),
            &oracle_action(circ, n, n, &v, true),
        ));
        note(vec_close(&(&a * &v), &(cr_of_vector(&v) * &gen)));
        note(vec_close(&(a.transpose() * &v), &(h_matrix(&v) * &gen)));

        let gen = vector(&mut r, m + n - 1);
        let t = build(StructureKind::Toeplitz, m, n, &gen).unwrap();
        let toep = Some(StructureKind::Toeplitz);
        note(mat_close(
            &k_matrix(&x, m),
            &oracle_action(toep, m, n, &x, false),
        ));
        note(mat_close(
            &g_matrix(&y, n),
            &oracle_action(toep, m, n, &y, true),
        ));
        note(vec_close(&(&t * &x), &(k_matrix(&x, m) * &gen)));
        note(vec_close(&(t.transpose() * &y), &(g_matrix(&y, n) * &gen)));

        let gen = vector(&mut r, n);
        let s = build(StructureKind::SymToeplitz, n, n, &gen).unwrap();
        note(mat_close(
            &i_matrix(&x),
            &oracle_action(Some(StructureKind::SymToeplitz), n, n, &x, false),
        ));
        note(vec_close(&(&s * &x), &(i_matrix(&x) * &gen)));

        let d = dense_matrix(&mut r, m, n, 0.0);
        let vd = dense::vec_col_major(&d);
        note(mat_close(
            &j1_matrix(&x, m),
            &oracle_action(None, m, n, &x, false),
        ));
        note(mat_close(
            &j2_matrix(&y, n),
            &oracle_action(None, m, n, &y, true),
        ));
        note(vec_close(&(&d * &x), &(j1_matrix(&x, m) * &vd)));
        note(vec_close(&(d.transpose() * &y), &(j2_matrix(&y, n) * &vd)));

        for (kind, rows, cols) in [
            (StructureKind::Circulant, n, n),
            (StructureKind::Toeplitz, m, n),
            (StructureKind::SymToeplitz, n, n),
        ] {
            let b = structured_matrix(&mut r, Some(kind), rows, cols, 0.3);
            let g = vec_of_structure(&b, kind, 0.0).unwrap();
            let d = rel_diff(
                scaling_for(kind, rows, cols).unwrap().apply(&g).norm(),
                b.norm(),
            );
            worst = worst.max(d);
            note(d < 1e-13);
        }
    }
    (
        ok,
        format!(
            "{checked} identities over 100 instances, worst scaling-norm deviation {worst:.1e}"
        ),
    )
}

fn optimality() -> (bool, String) {
    let mut r = rng(4);
    let (mut ok, mut worst, mut samples) = (true, 0.0f64, 0);
    for i in 0..50 {
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=8));
        let sparse = i % 2 == 1;
        for class in ALL_CLASSES {
            let sys = system_for(&mut r, class, n, m, if sparse { 0.3 } else { 0.0 });
            let (x, y) = (vector(&mut r, sys.n()), vector(&mut r, sys.m()));
            let w = Weights::new([0.5, 1.0, 2.0, 1.0, 1.5]).unwrap();
            let Some(eta) = compute_be(&sys, &x, &y, &w, class, sparse).unwrap().eta else {
                ok = false;
                continue;
            };
            let coeff = assemble_coefficient(&sys, &x, &y, &w, class, sparse).unwrap();
            let e_min = normal_equation_solution(&coeff, &residual(&sys, &x, &y).unwrap().rd);
            let d = rel_diff(eta, e_min.norm());
            worst = worst.max(d);
            ok &= d < 1e-11;
            for _ in 0..100 {
                let step = null_space_component(&coeff, &vector(&mut r, coeff.ncols()));
                let e = &e_min + step * Complex64::new(r.random_range(0.001..2.0), 0.0);
                let p = extract_perturbations(&e, &sys, &w, class, sparse).unwrap();
                ok &= weighted_triple_norm(&p, &w) >= eta * (1.0 - 1e-12);
                samples += 1;
            }
        }
    }
    (
        ok,
        format!(
            "50 systems x 4 classes, {samples} null-space samples, worst eta deviation {worst:.1e}"
        ),
    )
}

fn constraints() -> (bool, String) {
    let mut r = rng(5);
    let (mut ok, mut worst, mut reports) = (true, 0.0f64, 0);
    for i in 0..60 {
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=8));
        let sparse = i % 2 == 0;
        for class in ALL_CLASSES {
            let sys = system_for(&mut r, class, n, m, 0.35);
            let (x, y) = (vector(&mut r, sys.n()), vector(&mut r, sys.m()));
            let w = Weights::absolute();
            let report = compute_be(&sys, &x, &y, &w, class, sparse).unwrap();
            if !report.feasible {
                continue;
            }
            reports += 1;
            let v = verify_perturbation(&sys, &x, &y, &report.perturbations, &w).unwrap();
            let scale = sys.coefficient_norm() * (x.norm_squared() + y.norm_squared()).sqrt()
                + sys.rhs().norm();
            let rel = perturbed_residual(&sys, &report.perturbations, &x, &y).norm() / scale;
            worst = worst.max(rel);
            ok &= rel <= 1e-10 && v.structure_ok && v.sparsity_ok;
        }
    }
    (
        ok && reports > 0,
        format!("{reports} feasible reports, worst relative residual {worst:.1e}"),
    )
}

fn monotonicity() -> (bool, String) {
    let mut r = rng(6);
    let mut ok = true;
    for _ in 0..100 {
        let n = r.random_range(1..=10);
        let sys = system_for(&mut r, StructureClass::S1, n, n, 0.3);
        let (x, y) = (vector(&mut r, n), vector(&mut r, n));
        let w = Weights::absolute();
        let eta = |class, sparse| {
            compute_be(&sys, &x, &y, &w, class, sparse)
                .unwrap()
                .eta
                .unwrap()
        };
        let (s0d, s0s) = (
            eta(StructureClass::S0, false),
            eta(StructureClass::S0, true),
        );
        let (s2d, s2s) = (
            eta(StructureClass::S2, false),
            eta(StructureClass::S2, true),
        );
        let s1d = eta(StructureClass::S1, false);
        let le = |a: f64, b: f64| a <= b * (1.0 + 1e-12);
        ok &= le(s0d, s0s) && le(s0d, s2d) && le(s2d, s1d) && le(s2d, s2s);
    }
    (ok, "100 circulant systems, n = m <= 10".into())
}

fn experiments() -> (bool, String) {
    let sizes = [8, 16, 32];
    let ex72 = sparse_toeplitz_sweep(&sizes, 1).unwrap();
    let ex73 = gaussian_kernel_sweep(&sizes, 1).unwrap();
    let max72 = ex72.iter().flat_map(|row| row.values()).fold(0.0, f64::max);
    let max73 = ex73.iter().flat_map(|row| row.values()).fold(0.0, f64::max);
    let ratio = ex73
        .iter()
        .flat_map(|row| {
            row.values()[1..]
                .iter()
                .map(|v| v / row.eta)
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    let pass = max72 <= 1e-9 && max73 <= 1e-10 && ratio <= 1e3;
    (pass, format!("ex72 max {max72:.2e}; ex73 max {max73:.2e}, worst structured/unstructured ratio {ratio:.1}"))
}

fn wrls_cross_check() -> (bool, String) {
    let mut r = rng(8);
    let (mut ok, mut agreed, mut planted, mut worst) = (true, 0, 0, 0.0f64);
    for i in 0..40 {
        let kind = if i % 2 == 0 {
            StructureKind::Toeplitz
        } else {
            StructureKind::SymToeplitz
        };
        let n = r.random_range(1..=10);
        let m = if kind == StructureKind::Toeplitz {
            r.random_range(1..=10)
        } else {
            n
        };
        let k = structured_matrix(&mut r, Some(kind), m, n, 0.3);
        let h = dense_matrix(&mut r, n, n, 0.0);
        let w = &h * h.adjoint() + CMatrix::identity(n, n) * Complex64::new(n as f64, 0.0);
        let p = WrlsProblem::new(w, k, kind, r.random_range(0.05..2.0), vector(&mut r, n)).unwrap();
        let (rr, z) = (vector(&mut r, n), vector(&mut r, m));
        let class = if kind == StructureKind::Toeplitz {
            StructureClass::S2
        } else {
            StructureClass::S3
        };
        let weights = Weights::new([0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let sys = to_saddle(&p).unwrap();
        for sparse in [false, true] {
            let zeta = compute_zeta_with(&p, &rr, &z, 1.0, 1.0, sparse, None).unwrap();
            let be = compute_be(&sys, &rr, &z, &weights, class, sparse).unwrap();
            ok &= zeta.feasible == be.feasible;
            if let (Some(a), Some(b)) = (zeta.zeta, be.eta) {
                let d = rel_diff(a, b);
                worst = worst.max(d);
                ok &= d < 1e-11;
                agreed += 1;
            }
        }

        // plant a structured, pattern-preserving ΔK and Δf; solve the perturbed problem exactly
        let gen = vec_of_structure(p.k(), kind, 0.0).unwrap();
        let dgen = CVector::from_fn(gen.len(), |j, _| {
            if gen[j].norm() == 0.0 {
                gen[j]
            } else {
                cplx(&mut r) * 1e-3
            }
        });
        let dk = build(kind, m, n, &dgen).unwrap();
        let df = vector(&mut r, n) * Complex64::new(1e-3, 0.0);
        let kp = p.k() + &dk;
        let mut big = sys.coefficient_matrix();
        big.view_mut((n, 0), (m, n)).copy_from(&kp);
        big.view_mut((0, n), (n, m)).copy_from(&kp.transpose());
        let mut rhs = CVector::zeros(n + m);
        rhs.rows_mut(0, n).copy_from(&(p.f() + &df));
        let (pr, pz) = split(&big.lu().solve(&rhs).unwrap(), n);
        let bound = (dk.norm_squared() + df.norm_squared()).sqrt();
        match compute_zeta(&p, &pr, &pz, 1.0, 1.0).unwrap().zeta {
            Some(zeta) => ok &= zeta <= bound * (1.0 + 1e-8),
            None => ok = false,
        }
        planted += 1;
    }
    (
        ok && agreed >= 25,
        format!("{agreed} agreeing instances (worst {worst:.1e}), {planted} planted bounds"),
    )
}

fn main() {
    let outcomes = [
        run(1, "ill-scaled Toeplitz regression", ex71),
        run(2, "KKT regression", ex56),
        run(3, "builder identities", lemmas),
        run(4, "optimality oracle", optimality),
        run(5, "constraint satisfaction", constraints),
        run(6, "monotonicity", monotonicity),
        run(7, "ex72 / ex73 sweeps", experiments),
        run(8, "WRLS cross-check", wrls_cross_check),
    ];
    let limits = [(1, 1.0), (2, 1.0), (7, 30.0)];
    let mut all = true;
    for o in &outcomes {
        let limit = limits.iter().find(|(id, _)| *id == o.id).map(|(_, s)| *s);
        let in_time = limit.is_none_or(|s| o.secs < s);
        let pass = o.pass && in_time;
        all &= pass;
        let budget = limit.map(|s| format!(" (limit {s} s)")).unwrap_or_default();
        println!(
            "[{}] {}. {}: {} [{:.3} s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail,
            o.secs
        );
    }
    if !all {
        eprintln!("acceptance criteria failed");
        std::process::exit(1);
    }
}
