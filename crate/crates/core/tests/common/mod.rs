#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use structbe::structured::build;
use structbe::{CMatrix, CVector, Complex64, SaddleSystem, StructureClass, StructureKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| cplx(rng))
}

/// Random vector with roughly `zeros` of its entries set to exact zero.
pub fn sparse_vector(rng: &mut ChaCha8Rng, n: usize, zeros: f64) -> CVector {
    CVector::from_fn(n, |_, _| {
        let v = cplx(rng);
        if rng.random_bool(zeros) {
            Complex64::new(0.0, 0.0)
        } else {
            v
        }
    })
}

pub fn dense_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, zeros: f64) -> CMatrix {
    CMatrix::from_fn(m, n, |_, _| {
        let v = cplx(rng);
        if rng.random_bool(zeros) {
            Complex64::new(0.0, 0.0)
        } else {
            v
        }
    })
}

pub fn structured_matrix(
    rng: &mut ChaCha8Rng,
    kind: Option<StructureKind>,
    m: usize,
    n: usize,
    zeros: f64,
) -> CMatrix {
    match kind {
        None => dense_matrix(rng, m, n, zeros),
        Some(kind) => {
            let len = kind.generator_len(m, n).unwrap();
            build(kind, m, n, &sparse_vector(rng, len, zeros)).unwrap()
        }
    }
}

/// Random system whose blocks carry the structure of `class`; `n = m`
/// where the class needs it.
pub fn system_for(
    rng: &mut ChaCha8Rng,
    class: StructureClass,
    n: usize,
    m: usize,
    zeros: f64,
) -> SaddleSystem {
    let m = if matches!(class, StructureClass::S1 | StructureClass::S3) {
        n
    } else {
        m
    };
    let [ka, kb, kc] = class.block_kinds();
    let a = structured_matrix(rng, ka, n, n, zeros);
    let b = structured_matrix(rng, kb, m, n, zeros);
    let c = structured_matrix(rng, kc, m, m, zeros);
    SaddleSystem::new(a, b, c, vector(rng, n), vector(rng, m)).unwrap()
}

/// Column `k` of the map `gen ↦ M(gen)·v` (or `M(gen)ᵀ·v`), from
/// unit generators.
pub fn oracle_action(
    kind: Option<StructureKind>,
    m: usize,
    n: usize,
    v: &CVector,
    transposed: bool,
) -> CMatrix {
    let len = match kind {
        Some(kind) => kind.generator_len(m, n).unwrap(),
        None => m * n,
    };
    let out_len = if transposed { n } else { m };
    let mut out = CMatrix::zeros(out_len, len);
    for k in 0..len {
        let mut e = CVector::zeros(len);
        e[k] = Complex64::new(1.0, 0.0);
        let mat = match kind {
            Some(kind) => build(kind, m, n, &e).unwrap(),
            None => CMatrix::from_column_slice(m, n, e.as_slice()),
        };
        let col = if transposed {
            mat.transpose() * v
        } else {
            mat * v
        };
        out.set_column(k, &col);
    }
    out
}

/// `Xᴴ(XXᴴ)⁻¹r` for full-row-rank `X`.
pub fn normal_equation_solution(x: &CMatrix, r: &CVector) -> CVector {
    let gram = x * x.adjoint();
    let t = gram.lu().solve(r).expect("full row rank");
    x.adjoint() * t
}

/// Projection of `v` onto the null space of a full-row-rank `X`.
pub fn null_space_component(x: &CMatrix, v: &CVector) -> CVector {
    v - normal_equation_solution(x, &(x * v))
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `(A+ΔA)x + (B+ΔB)ᵀy − (f+Δf)` stacked with the second block row,
/// evaluated directly from the blocks.
pub fn perturbed_residual(
    sys: &SaddleSystem,
    p: &structbe::PerturbationSet,
    x: &CVector,
    y: &CVector,
) -> CVector {
    let top = (sys.a() + &p.da) * x + (sys.b() + &p.db).transpose() * y - (sys.f() + &p.df);
    let bottom = (sys.b() + &p.db) * x + (sys.c() + &p.dc) * y - (sys.g() + &p.dg);
    CVector::from_iterator(
        top.len() + bottom.len(),
        top.iter().chain(bottom.iter()).copied(),
    )
}

pub const ALL_CLASSES: [StructureClass; 4] = [
    StructureClass::S0,
    StructureClass::S1,
    StructureClass::S2,
    StructureClass::S3,
];
