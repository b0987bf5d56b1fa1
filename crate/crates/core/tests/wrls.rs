mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use structbe::experiments::split;
use structbe::structured::{build, vec_of_structure};
use structbe::wrls::{compute_zeta, compute_zeta_with, to_saddle, wrls_residual, WrlsProblem};
use structbe::*;

fn hpd(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = dense_matrix(r, n, n, 0.0);
    &m * m.adjoint() + CMatrix::identity(n, n) * Complex64::new(n as f64 * 0.5, 0.0)
}

fn problem(r: &mut ChaCha8Rng, kind: StructureKind, n: usize, m: usize) -> WrlsProblem {
    let m = if kind == StructureKind::SymToeplitz {
        n
    } else {
        m
    };
    let k = structured_matrix(r, Some(kind), m, n, 0.3);
    let lambda = r.random_range(0.05..2.0);
    WrlsProblem::new(hpd(r, n), k, kind, lambda, vector(r, n)).unwrap()
}

fn restricted_weights(w2: f64, w4: f64) -> Weights {
    Weights::new([0.0, w2, 0.0, w4, 0.0]).unwrap()
}

fn class_for(kind: StructureKind) -> StructureClass {
    match kind {
        StructureKind::SymToeplitz => StructureClass::S3,
        _ => StructureClass::S2,
    }
}

#[test]
fn rejects_invalid_problems() {
    let w = CMatrix::identity(2, 2);
    let k = CMatrix::identity(2, 2);
    let f = CVector::zeros(2);
    let not_hpd = dense::real_matrix(&[&[1., 2.], &[2., 1.]]);
    let not_herm = dense::real_matrix(&[&[2., 1.], &[0., 2.]]);
    assert_eq!(
        WrlsProblem::new(not_hpd, k.clone(), StructureKind::Toeplitz, 1.0, f.clone()).unwrap_err(),
        Error::NotPositiveDefinite
    );
    assert!(
        WrlsProblem::new(not_herm, k.clone(), StructureKind::Toeplitz, 1.0, f.clone()).is_err()
    );
    assert!(WrlsProblem::new(
        w.clone(),
        k.clone(),
        StructureKind::Toeplitz,
        0.0,
        f.clone()
    )
    .is_err());
    assert!(WrlsProblem::new(
        w.clone(),
        k.clone(),
        StructureKind::Circulant,
        1.0,
        f.clone()
    )
    .is_err());
    let not_toeplitz = dense::real_matrix(&[&[1., 2.], &[3., 1.]]);
    assert!(WrlsProblem::new(w.clone(), not_toeplitz, StructureKind::SymToeplitz, 1.0, f).is_err());
    let p = WrlsProblem::new(w, k, StructureKind::Toeplitz, 1.0, CVector::zeros(2)).unwrap();
    assert!(compute_zeta(&p, &CVector::zeros(2), &CVector::zeros(2), 0.0, 1.0).is_err());
    assert!(compute_zeta(&p, &CVector::zeros(3), &CVector::zeros(2), 1.0, 1.0).is_err());
}

#[test]
fn exact_pair_has_zero_zeta() {
    // W = I, K = I, λ = 1: r + z = f and z = r, so r = z = f/2
    let f = dense::real_vector(&[2., -4., 6.]);
    let p = WrlsProblem::new(
        CMatrix::identity(3, 3),
        CMatrix::identity(3, 3),
        StructureKind::SymToeplitz,
        1.0,
        f.clone(),
    )
    .unwrap();
    let half = &f * Complex64::new(0.5, 0.0);
    let report = compute_zeta(&p, &half, &half, 1.0, 1.0).unwrap();
    assert_eq!(report.zeta, Some(0.0));
    assert!(report.dk.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn f_only_perturbation_when_k_residual_vanishes() {
    // r = z = 0 leaves only Δf = −f available: ζ = w4·‖f‖
    let f = dense::real_vector(&[3., 4.]);
    let p = WrlsProblem::new(
        CMatrix::identity(2, 2),
        CMatrix::identity(2, 2),
        StructureKind::Toeplitz,
        1.0,
        f,
    )
    .unwrap();
    let zero = CVector::zeros(2);
    let report = compute_zeta(&p, &zero, &zero, 1.0, 2.0).unwrap();
    assert!((report.zeta.unwrap() - 10.0).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn zeta_matches_restricted_saddle_error(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=10, sparse in any::<bool>()) {
        let mut r = rng(seed);
        for kind in [StructureKind::Toeplitz, StructureKind::SymToeplitz] {
            let p = problem(&mut r, kind, n, m);
            let (rr, z) = (vector(&mut r, p.n()), vector(&mut r, p.m()));
            let (w2, w4) = (r.random_range(0.2..3.0), r.random_range(0.2..3.0));
            let zeta = compute_zeta_with(&p, &rr, &z, w2, w4, sparse, None).unwrap();
            let sys = to_saddle(&p).unwrap();
            let be = compute_be(&sys, &rr, &z, &restricted_weights(w2, w4), class_for(kind), sparse).unwrap();
            prop_assert_eq!(zeta.feasible, be.feasible);
            if !sparse {
                prop_assert!(zeta.feasible);
            }
            let (Some(a), Some(b)) = (zeta.zeta, be.eta) else { continue };
            prop_assert!(rel_diff(a, b) < 1e-11, "{kind:?}: {a} vs {b}");
            prop_assert!(close(&zeta.dk, &be.perturbations.db, 1e-9));
        }
    }

    #[test]
    fn planted_perturbation_bounds_zeta(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=10) {
        let mut r = rng(seed);
        for kind in [StructureKind::Toeplitz, StructureKind::SymToeplitz] {
            let p = problem(&mut r, kind, n, m);
            let (n, m) = (p.n(), p.m());
            // structured, pattern-preserving ΔK and an arbitrary Δf
            let gen = vec_of_structure(p.k(), kind, 0.0).unwrap();
            let scale = 10f64.powi(r.random_range(-6..0));
            let dgen = CVector::from_fn(gen.len(), |i, _| if gen[i].norm() == 0.0 { gen[i] } else { cplx(&mut r) * scale });
            let dk = build(kind, m, n, &dgen).unwrap();
            let df = vector(&mut r, n) * Complex64::new(scale, 0.0);
            let sys = to_saddle(&p).unwrap();
            let kp = p.k() + &dk;
            let mut big = sys.coefficient_matrix();
            big.view_mut((n, 0), (m, n)).copy_from(&kp);
            big.view_mut((0, n), (n, m)).copy_from(&kp.transpose());
            let mut rhs = CVector::zeros(n + m);
            rhs.rows_mut(0, n).copy_from(&(p.f() + &df));
            let u = big.lu().solve(&rhs).unwrap();
            let (rr, z) = split(&u, n);
            let (w2, w4) = (1.0, 1.0);
            let zeta = compute_zeta(&p, &rr, &z, w2, w4).unwrap().zeta.unwrap();
            let planted = (w2 * w2 * dk.norm_squared() + w4 * w4 * df.norm_squared()).sqrt();
            prop_assert!(zeta <= planted * (1.0 + 1e-8) + 1e-13, "{kind:?}: {zeta} > {planted}");
        }
    }

    #[test]
    fn residual_and_inverse_agree_with_saddle_form(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=10) {
        let mut r = rng(seed);
        for kind in [StructureKind::Toeplitz, StructureKind::SymToeplitz] {
            let p = problem(&mut r, kind, n, m);
            let sys = to_saddle(&p).unwrap();
            let ident = sys.a() * p.w();
            prop_assert!((ident - CMatrix::identity(p.n(), p.n())).norm() <= 1e-12 * (p.n() as f64).sqrt());
            let (rr, z) = (vector(&mut r, p.n()), vector(&mut r, p.m()));
            let (rf, rg) = wrls_residual(&p, &rr, &z).unwrap();
            let res = residual(&sys, &rr, &z).unwrap();
            let scale = sys.coefficient_norm() * (rr.norm() + z.norm()) + p.f().norm();
            prop_assert!((rf - res.rf).norm() <= 1e-12 * scale);
            prop_assert!((rg - res.rg).norm() <= 1e-12 * scale);
        }
    }
}

fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}
