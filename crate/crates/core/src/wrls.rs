//! Weighted regularized least squares, posed through its augmented
//! (stationarity) system
//!
//! ```text
//!     [ W⁻¹   Kᵀ  ] [r]   [f]
//!     [ K    −λI  ] [z] = [0]
//! ```
//!
//! and the backward error `ζ(z̃)` of an approximate pair `(r̃, z̃)` when only
//! `K` (keeping its structure) and `f` may be perturbed.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::backward_error::SaddleSystem;
use crate::dense::{frob_norm, min_norm_solve, numerical_rank, CMatrix, CVector};
use crate::error::{shape_err, Error, Result};
use crate::structured::{
    build, g_matrix, generator_pattern, i_matrix, k_matrix, scaling_for, vec_of_structure,
    StructureKind,
};

#[derive(Debug, Clone)]
pub struct WrlsProblem {
    w: CMatrix,
    w_chol: Cholesky<Complex64, nalgebra::Dyn>,
    k: CMatrix,
    kind: StructureKind,
    lambda: f64,
    f: CVector,
}

impl WrlsProblem {
    /// `W` must be Hermitian positive definite, `K` of `kind` (Toeplitz or
    /// symmetric-Toeplitz, checked exactly) and `λ > 0`.
    pub fn new(
        w: CMatrix,
        k: CMatrix,
        kind: StructureKind,
        lambda: f64,
        f: CVector,
    ) -> Result<Self> {
        let n = w.nrows();
        if !w.is_square() || n == 0 {
            return Err(shape_err(format!(
                "W must be square and non-empty, got {:?}",
                w.shape()
            )));
        }
        if k.ncols() != n || f.len() != n {
            return Err(shape_err(format!(
                "K must have {n} columns and f length {n}, got {:?} and {}",
                k.shape(),
                f.len()
            )));
        }
        if kind == StructureKind::Circulant {
            return Err(Error::InvalidArgument(
                "K must be toeplitz or sym-toeplitz".into(),
            ));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        crate::dense::ensure_finite_matrix(&w, "W")?;
        crate::dense::ensure_finite_matrix(&k, "K")?;
        crate::dense::ensure_finite_vector(&f, "f")?;
        let asym = frob_norm(&(&w - w.adjoint()));
        if asym > 1e-12 * frob_norm(&w) {
            return Err(Error::NotPositiveDefinite);
        }
        vec_of_structure(&k, kind, 0.0)?;
        let w_chol = Cholesky::new(w.clone()).ok_or(Error::NotPositiveDefinite)?;
        // the complex factorisation takes a complex square root of a negative pivot
        // instead of failing, so definiteness is read off the factor's diagonal
        if w_chol
            .l_dirty()
            .diagonal()
            .iter()
            .any(|d| d.re <= 0.0 || d.im.abs() > 1e-12 * d.re)
        {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            w,
            w_chol,
            k,
            kind,
            lambda,
            f,
        })
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn m(&self) -> usize {
        self.k.nrows()
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn k(&self) -> &CMatrix {
        &self.k
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn f(&self) -> &CVector {
        &self.f
    }

    /// `W⁻¹v` through the Cholesky factor.
    pub fn apply_w_inverse(&self, v: &CVector) -> CVector {
        self.w_chol.solve(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrlsReport {
    /// `None` when the rank condition fails.
    pub zeta: Option<f64>,
    pub dk: CMatrix,
    pub df: CVector,
    pub feasible: bool,
    pub r_f: CVector,
    pub r_g: CVector,
    pub rank: usize,
    pub augmented_rank: usize,
    pub lsq_residual: f64,
}

/// The saddle form: `A = W⁻¹`, `B = K` (tagged), `C = −λI`, `g = 0`.
pub fn to_saddle(p: &WrlsProblem) -> Result<SaddleSystem> {
    let (n, m) = (p.n(), p.m());
    let a = p.w_chol.inverse();
    let c = CMatrix::identity(m, m) * Complex64::from(-p.lambda);
    let sys = SaddleSystem::new(a, p.k.clone(), c, p.f.clone(), CVector::zeros(m))?;
    debug_assert_eq!(sys.n(), n);
    sys.with_tags([None, Some(p.kind), None])
}

/// `r̃_f = f − W⁻¹r̃ − Kᵀz̃` and `r̃_g = λz̃ − Kr̃`.
pub fn wrls_residual(p: &WrlsProblem, r: &CVector, z: &CVector) -> Result<(CVector, CVector)> {
    if r.len() != p.n() || z.len() != p.m() {
        return Err(shape_err(format!(
            "(r, z) lengths ({}, {}) do not match ({}, {})",
            r.len(),
            z.len(),
            p.n(),
            p.m()
        )));
    }
    let rf = &p.f - p.apply_w_inverse(r) - p.k.transpose() * z;
    let rg = z * Complex64::from(p.lambda) - &p.k * r;
    Ok((rf, rg))
}

/// `ζ(z̃)` preserving the sparsity of `K`.
pub fn compute_zeta(
    p: &WrlsProblem,
    r: &CVector,
    z: &CVector,
    w2: f64,
    w4: f64,
) -> Result<WrlsReport> {
    compute_zeta_with(p, r, z, w2, w4, true, None)
}

/// `ζ(z̃)` with the sparsity mode and rank tolerance chosen by the caller.
pub fn compute_zeta_with(
    p: &WrlsProblem,
    r: &CVector,
    z: &CVector,
    w2: f64,
    w4: f64,
    sparse: bool,
    rank_tol: Option<f64>,
) -> Result<WrlsReport> {
    for (name, w) in [("w2", w2), ("w4", w4)] {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "{name} must be positive, got {w}"
            )));
        }
    }
    let (r_f, r_g) = wrls_residual(p, r, z)?;
    let (n, m) = (p.n(), p.m());
    let gen_k = vec_of_structure(&p.k, p.kind, 0.0)?;
    let scale = scaling_for(p.kind, m, n)?;
    let len = gen_k.len();
    let pattern = if sparse {
        generator_pattern(&gen_k)
    } else {
        CVector::from_element(len, Complex64::from(1.0))
    };
    let factor = CVector::from_fn(len, |k, _| pattern[k] / (scale.diag()[k] * w2));

    let (top, bottom) = match p.kind {
        StructureKind::Toeplitz => (g_matrix(z, n), k_matrix(r, m)),
        _ => (i_matrix(z), i_matrix(r)),
    };
    let mut x = CMatrix::zeros(n + m, len + n);
    for j in 0..len {
        for i in 0..n {
            x[(i, j)] = top[(i, j)] * factor[j];
        }
        for i in 0..m {
            x[(n + i, j)] = bottom[(i, j)] * factor[j];
        }
    }
    for i in 0..n {
        x[(i, len + i)] = Complex64::from(-1.0 / w4);
    }

    let rd = CVector::from_iterator(n + m, r_f.iter().chain(r_g.iter()).copied());
    let rank = numerical_rank(&x, rank_tol);
    let mut augmented = x.clone().insert_column(len + n, Complex64::from(0.0));
    augmented.set_column(len + n, &rd);
    let augmented_rank = numerical_rank(&augmented, rank_tol);
    let sol = min_norm_solve(&x, &rd, rank_tol)?;
    let feasible = rd.norm() == 0.0 || rank == augmented_rank;

    let e = &sol.solution;
    let gen = CVector::from_fn(len, |k, _| e[k] * factor[k]);
    let dk = build(p.kind, m, n, &gen)?;
    let df = e.rows(len, n) / Complex64::from(w4);
    Ok(WrlsReport {
        zeta: feasible.then(|| e.norm()),
        dk,
        df,
        feasible,
        r_f,
        r_g,
        rank,
        augmented_rank,
        lsq_residual: sol.residual_norm,
    })
}
