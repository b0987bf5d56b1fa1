//! Dense complex kernel.
//!
//! Matrices are `nalgebra` column-major `DMatrix<Complex64>`, so the storage
//! order already coincides with `vec(A) = [a₁ᵀ, a₂ᵀ, …, a_nᵀ]ᵀ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Minimum-norm least-squares solution of `x·z ≈ r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNormSolution {
    pub solution: CVector,
    /// `‖x·z − r‖₂`, zero (up to roundoff) for consistent systems.
    pub residual_norm: f64,
    pub effective_rank: usize,
}

/// Real matrix from row slices; handy for literals in tests and examples.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
    CMatrix::from_fn(nrows, ncols, |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)))
}

pub fn ensure_finite_matrix(a: &CMatrix, what: &'static str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn ensure_finite_vector(v: &CVector, what: &'static str) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn hadamard(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() {
        return Err(shape_err(format!(
            "hadamard of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn vec_col_major(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec_col_major`].
pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(shape_err(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

pub fn frob_norm(a: &CMatrix) -> f64 {
    a.norm()
}

/// Θ_A: one where `a_ij ≠ 0`, zero elsewhere.
pub fn sign_pattern(a: &CMatrix) -> CMatrix {
    a.map(|z| if z == ZERO { ZERO } else { ONE })
}

/// `ε · max(rows, cols)`, relative to the largest singular value.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols).max(1) as f64
}

fn to_faer(x: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)])
}

/// Thin SVD `x = U·diag(s)·Vᴴ`, returned as `(U, s, V)`.
fn thin_svd(x: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = to_faer(x)
        .thin_svd()
        .expect("SVD of a finite matrix converges");
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let k = s.dim();
    (
        CMatrix::from_fn(u.nrows(), k, |i, j| u[(i, j)]),
        (0..k).map(|i| s[i].re).collect(),
        CMatrix::from_fn(v.nrows(), k, |i, j| v[(i, j)]),
    )
}

pub fn singular_values(x: &CMatrix) -> Vec<f64> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Vec::new();
    }
    to_faer(x)
        .singular_values()
        .expect("SVD of a finite matrix converges")
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(x: &CMatrix, tol: Option<f64>) -> usize {
    let sv = singular_values(x);
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let tol = tol.unwrap_or_else(|| default_rank_tol(x.nrows(), x.ncols()));
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Minimum-norm least-squares solution through the SVD `x = UΣVᴴ`:
/// `z = V Σ⁺ Uᴴ r`, with singular values at or below `tol · σ_max`
/// treated as zero.
pub fn min_norm_solve(x: &CMatrix, r: &CVector, tol: Option<f64>) -> Result<MinNormSolution> {
    if r.len() != x.nrows() {
        return Err(shape_err(format!(
            "right-hand side has length {}, system has {} rows",
            r.len(),
            x.nrows()
        )));
    }
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rank tolerance must be positive, got {t}"
            )));
        }
    }
    let (rows, cols) = x.shape();
    if rows == 0 || cols == 0 {
        return Ok(MinNormSolution {
            solution: CVector::zeros(cols),
            residual_norm: r.norm(),
            effective_rank: 0,
        });
    }
    let tol = tol.unwrap_or_else(|| default_rank_tol(rows, cols));
    let (u, s, v) = thin_svd(x);
    let smax = s.iter().copied().fold(0.0_f64, f64::max);
    let mut solution = CVector::zeros(cols);
    let mut rank = 0;
    if smax > 0.0 {
        for (k, &sk) in s.iter().enumerate() {
            if sk <= tol * smax {
                continue;
            }
            rank += 1;
            let coeff = u.column(k).dotc(r) / sk;
            solution.axpy(coeff, &v.column(k), ONE);
        }
    }
    let residual_norm = (x * &solution - r).norm();
    Ok(MinNormSolution {
        solution,
        residual_norm,
        effective_rank: rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_masks_circulant_by_pattern() {
        let a = real_matrix(&[&[5., 7., 3.], &[3., 5., 7.], &[7., 3., 5.]]);
        let theta = real_matrix(&[&[1., 0., 1.], &[1., 1., 0.], &[0., 1., 1.]]);
        let expected = real_matrix(&[&[5., 0., 3.], &[3., 5., 0.], &[0., 3., 5.]]);
        assert_eq!(hadamard(&a, &theta).unwrap(), expected);
        assert_eq!(hadamard(&a, &CMatrix::from_element(3, 3, ONE)).unwrap(), a);
        assert_eq!(
            hadamard(&a, &CMatrix::zeros(3, 3)).unwrap(),
            CMatrix::zeros(3, 3)
        );
    }

    #[test]
    fn hadamard_rejects_mismatched_shapes() {
        let err = hadamard(&CMatrix::zeros(2, 3), &CMatrix::zeros(3, 2)).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn kron_with_unit_identity() {
        let b = real_matrix(&[&[1., 2.], &[3., 4.], &[5., 6.]]);
        assert_eq!(kron(&CMatrix::identity(1, 1), &b), b);
    }

    #[test]
    fn vec_stacks_columns() {
        let a = real_matrix(&[&[1., 3.], &[2., 4.]]);
        assert_eq!(vec_col_major(&a), real_vector(&[1., 2., 3., 4.]));
        let one = CMatrix::from_element(1, 1, Complex64::new(2.0, -1.0));
        assert_eq!(
            vec_col_major(&one),
            CVector::from_element(1, Complex64::new(2.0, -1.0))
        );
        assert_eq!(unvec(&vec_col_major(&a), 2, 2).unwrap(), a);
        assert!(unvec(&vec_col_major(&a), 3, 2).is_err());
    }

    #[test]
    fn frobenius_norms() {
        assert!((frob_norm(&CMatrix::identity(3, 3)) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(frob_norm(&CMatrix::zeros(4, 2)), 0.0);
        assert_eq!(frob_norm(&real_matrix(&[&[3., 4.]])), 5.0);
    }

    #[test]
    fn sign_pattern_cases() {
        let m = real_matrix(&[&[3., 0., 9.], &[9., 3., 0.], &[0., 9., 3.]]);
        let theta = real_matrix(&[&[1., 0., 1.], &[1., 1., 0.], &[0., 1., 1.]]);
        assert_eq!(sign_pattern(&m), theta);
        assert_eq!(sign_pattern(&CMatrix::zeros(2, 2)), CMatrix::zeros(2, 2));
        let full = real_matrix(&[&[1., -2.], &[0.5, 7.]]);
        assert_eq!(sign_pattern(&full), CMatrix::from_element(2, 2, ONE));
    }

    #[test]
    fn min_norm_identity_and_underdetermined() {
        let s = min_norm_solve(&CMatrix::identity(2, 2), &real_vector(&[1., 2.]), None).unwrap();
        assert!((s.solution[0] - c(1.0)).norm() < 1e-15);
        assert!((s.solution[1] - c(2.0)).norm() < 1e-15);
        assert!(s.residual_norm < 1e-15);
        assert_eq!(s.effective_rank, 2);

        let s = min_norm_solve(&real_matrix(&[&[1., 1.]]), &real_vector(&[2.]), None).unwrap();
        assert!((s.solution[0] - c(1.0)).norm() < 1e-14);
        assert!((s.solution[1] - c(1.0)).norm() < 1e-14);
        assert_eq!(s.effective_rank, 1);
    }

    #[test]
    fn min_norm_reports_inconsistency_through_residual() {
        // rank one, r outside the range
        let x = real_matrix(&[&[1., 1.], &[1., 1.]]);
        let s = min_norm_solve(&x, &real_vector(&[1., -1.]), None).unwrap();
        assert_eq!(s.effective_rank, 1);
        assert!((s.residual_norm - 2f64.sqrt()).abs() < 1e-14);
        assert!(s.solution.norm() < 1e-14);
    }

    #[test]
    fn min_norm_rejects_bad_input() {
        let x = CMatrix::identity(2, 2);
        assert!(min_norm_solve(&x, &real_vector(&[1.]), None).is_err());
        assert!(min_norm_solve(&x, &real_vector(&[1., 2.]), Some(0.0)).is_err());
    }

    #[test]
    fn rank_cases() {
        assert_eq!(numerical_rank(&CMatrix::identity(3, 3), None), 3);
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 4), None), 0);
        let u = CVector::from_vec(vec![
            Complex64::new(1.0, 2.0),
            c(-0.5),
            Complex64::new(0.3, 0.1),
        ]);
        let v = CVector::from_vec(vec![c(2.0), Complex64::new(0.0, 1.0), c(0.7), c(-1.1)]);
        let outer = &u * v.adjoint();
        assert_eq!(numerical_rank(&outer, None), 1);
    }
}
