//! Reference solvers that produce the approximate solutions being audited.

use num_complex::Complex64;

use crate::dense::{CMatrix, CVector, ZERO};
use crate::error::{shape_err, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: CVector,
    pub iterations: usize,
    /// `‖d − 𝒜u‖₂ / ‖d‖₂`, recomputed from the returned solution.
    pub rel_residual: f64,
    pub converged: bool,
    /// Relative residual estimate after each GMRES step (empty for GEP).
    pub residual_history: Vec<f64>,
}

fn check_square(a: &CMatrix, d: &CVector) -> Result<()> {
    if !a.is_square() || a.nrows() != d.len() {
        return Err(shape_err(format!(
            "need a square matrix matching the right-hand side, got {:?} and {}",
            a.shape(),
            d.len()
        )));
    }
    Ok(())
}

fn relative_residual(a: &CMatrix, u: &CVector, d: &CVector) -> f64 {
    let dn = d.norm();
    let r = (d - a * u).norm();
    if dn == 0.0 {
        r
    } else {
        r / dn
    }
}

/// Gaussian elimination with partial pivoting.
pub fn gep(a: &CMatrix, d: &CVector) -> Result<SolveOutcome> {
    check_square(a, d)?;
    let n = a.nrows();
    let mut lu = a.clone();
    let mut rhs = d.clone();
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pivot == 0.0 {
            return Err(Error::Singular(k));
        }
        if p != k {
            lu.swap_rows(p, k);
            rhs.swap_rows(p, k);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            if l == ZERO {
                continue;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                lu[(i, j)] -= l * ukj;
            }
            lu[(i, k)] = ZERO;
            let rk = rhs[k];
            rhs[i] -= l * rk;
        }
    }
    let mut u = CVector::zeros(n);
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= lu[(i, j)] * u[j];
        }
        u[i] = acc / lu[(i, i)];
    }
    Ok(SolveOutcome {
        rel_residual: relative_residual(a, &u, d),
        solution: u,
        iterations: 1,
        converged: true,
        residual_history: Vec::new(),
    })
}

/// Complex Givens rotation `[c s; −s̄ c]` with real `c`, zeroing `b` in `(a, b)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (an, bn) = (a.norm(), b.norm());
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, (b / bn).conj());
    }
    let r = an.hypot(bn);
    let phase = a / an;
    (an / r, phase * b.conj() / r)
}

/// Unrestarted GMRES from the zero vector, modified Gram–Schmidt Arnoldi
/// with one reorthogonalisation pass.
pub fn gmres(a: &CMatrix, d: &CVector, tol: f64, max_iter: usize) -> Result<SolveOutcome> {
    check_square(a, d)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "GMRES tolerance must be positive, got {tol}"
        )));
    }
    let n = a.nrows();
    let beta = d.norm();
    if beta == 0.0 {
        return Ok(SolveOutcome {
            solution: CVector::zeros(n),
            iterations: 0,
            rel_residual: 0.0,
            converged: true,
            residual_history: Vec::new(),
        });
    }
    let max_iter = max_iter.min(n).max(1);
    let mut basis: Vec<CVector> = vec![d / Complex64::from(beta)];
    let mut h = CMatrix::zeros(max_iter + 1, max_iter);
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(max_iter);
    let mut g = CVector::zeros(max_iter + 1);
    g[0] = Complex64::from(beta);
    let mut history = Vec::with_capacity(max_iter);
    let mut k = 0;
    while k < max_iter {
        let mut w = a * &basis[k];
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let hij = v.dotc(&w);
                h[(i, k)] += hij;
                w -= v * hij;
            }
        }
        let hnext = w.norm();
        h[(k + 1, k)] = Complex64::from(hnext);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (x, y) = (h[(i, k)], h[(i + 1, k)]);
            h[(i, k)] = x * c + s * y;
            h[(i + 1, k)] = -s.conj() * x + y * c;
        }
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        let (x, y) = (h[(k, k)], h[(k + 1, k)]);
        h[(k, k)] = x * c + s * y;
        h[(k + 1, k)] = ZERO;
        rot.push((c, s));
        let gk = g[k];
        g[k] = gk * c;
        g[k + 1] = -s.conj() * gk;
        k += 1;
        let estimate = g[k].norm() / beta;
        history.push(estimate);
        if estimate <= tol || hnext <= f64::EPSILON * beta {
            break;
        }
        basis.push(w / Complex64::from(hnext));
    }
    let mut coeffs = CVector::zeros(k);
    for i in (0..k).rev() {
        let mut acc = g[i];
        for j in i + 1..k {
            acc -= h[(i, j)] * coeffs[j];
        }
        coeffs[i] = acc / h[(i, i)];
    }
    let mut u = CVector::zeros(n);
    for (v, c) in basis.iter().zip(coeffs.iter()) {
        u += v * *c;
    }
    let rel_residual = relative_residual(a, &u, d);
    Ok(SolveOutcome {
        solution: u,
        iterations: k,
        rel_residual,
        converged: rel_residual <= tol,
        residual_history: history,
    })
}
