//! Circulant, Toeplitz and symmetric-Toeplitz matrices and their generators.
//!
//! Generator conventions (indices zero-based):
//!
//! - circulant `n×n`: `c = [c₀ … c_{n−1}]` is the first column, and
//!   `C[i][j] = c[(i − j) mod n]`.
//! - Toeplitz `m×n`: `t = [t_{−m+1} … t₀ … t_{n−1}]`, stored so that
//!   `T[i][j] = t[j − i + m − 1]`.
//! - symmetric-Toeplitz `n×n`: `s = [t₀ … t_{n−1}]`, `S[i][j] = s[|i − j|]`.
//!
//! The builder matrices at the bottom turn a product `M·v` (or `Mᵀ·v`) with
//! a structured `M` into a linear map acting on the generator of `M`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::dense::{kron, CMatrix, CVector, ONE, ZERO};
use crate::error::{shape_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Circulant,
    Toeplitz,
    SymToeplitz,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureKind::Circulant => "circulant",
            StructureKind::Toeplitz => "toeplitz",
            StructureKind::SymToeplitz => "sym-toeplitz",
        })
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "circulant" => Ok(StructureKind::Circulant),
            "toeplitz" => Ok(StructureKind::Toeplitz),
            "sym-toeplitz" | "symtoeplitz" | "symmetric-toeplitz" => Ok(StructureKind::SymToeplitz),
            other => Err(Error::InvalidArgument(format!(
                "unknown structure kind '{other}'"
            ))),
        }
    }
}

impl StructureKind {
    /// Generator length for an `m×n` matrix of this kind.
    pub fn generator_len(self, m: usize, n: usize) -> Result<usize> {
        if m == 0 || n == 0 {
            return Err(shape_err(format!(
                "{self} matrix must be non-empty, got {m}x{n}"
            )));
        }
        match self {
            StructureKind::Toeplitz => Ok(m + n - 1),
            StructureKind::Circulant | StructureKind::SymToeplitz if m == n => Ok(n),
            _ => Err(shape_err(format!(
                "{self} matrix must be square, got {m}x{n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuredGenerator {
    kind: StructureKind,
    rows: usize,
    cols: usize,
    gen: CVector,
}

impl StructuredGenerator {
    pub fn new(kind: StructureKind, rows: usize, cols: usize, gen: CVector) -> Result<Self> {
        let expected = kind.generator_len(rows, cols)?;
        if gen.len() != expected {
            return Err(shape_err(format!(
                "{kind} {rows}x{cols} needs a generator of length {expected}, got {}",
                gen.len()
            )));
        }
        Ok(Self {
            kind,
            rows,
            cols,
            gen,
        })
    }

    /// Generator of `a`, checked entrywise against `kind` (see [`vec_of_structure`]).
    pub fn from_matrix(a: &CMatrix, kind: StructureKind, tol: f64) -> Result<Self> {
        let gen = vec_of_structure(a, kind, tol)?;
        Ok(Self {
            kind,
            rows: a.nrows(),
            cols: a.ncols(),
            gen,
        })
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn generator(&self) -> &CVector {
        &self.gen
    }

    pub fn to_matrix(&self) -> CMatrix {
        from_generator(self.kind, self.rows, self.cols, &self.gen)
    }
}

fn from_generator(kind: StructureKind, m: usize, n: usize, gen: &CVector) -> CMatrix {
    match kind {
        StructureKind::Circulant => CMatrix::from_fn(n, n, |i, j| gen[(i + n - j) % n]),
        StructureKind::Toeplitz => CMatrix::from_fn(m, n, |i, j| gen[j + m - 1 - i]),
        StructureKind::SymToeplitz => CMatrix::from_fn(n, n, |i, j| gen[i.abs_diff(j)]),
    }
}

/// `Cr(c)`: first column `c`, each further column a downward cyclic shift.
pub fn build_circulant(c: &CVector) -> Result<CMatrix> {
    if c.is_empty() {
        return Err(shape_err("circulant generator is empty"));
    }
    Ok(from_generator(
        StructureKind::Circulant,
        c.len(),
        c.len(),
        c,
    ))
}

pub fn build_toeplitz(gen: &StructuredGenerator) -> Result<CMatrix> {
    if gen.kind != StructureKind::Toeplitz {
        return Err(Error::InvalidArgument(format!(
            "expected a toeplitz generator, got {}",
            gen.kind
        )));
    }
    Ok(gen.to_matrix())
}

/// Toeplitz matrix straight from a generator vector of length `m + n − 1`.
pub fn toeplitz(gen: &CVector, m: usize, n: usize) -> Result<CMatrix> {
    let g = StructuredGenerator::new(StructureKind::Toeplitz, m, n, gen.clone())?;
    Ok(g.to_matrix())
}

pub fn build_sym_toeplitz(t: &CVector) -> CMatrix {
    from_generator(StructureKind::SymToeplitz, t.len(), t.len(), t)
}

/// Build any kind from a raw generator, checking its length.
pub fn build(kind: StructureKind, m: usize, n: usize, gen: &CVector) -> Result<CMatrix> {
    Ok(StructuredGenerator::new(kind, m, n, gen.clone())?.to_matrix())
}

/// Generator of `a` for `kind`. Every entry is compared with the generator
/// value it should repeat; a deviation above `tol · max|a_ij|` is a
/// structure violation, so `tol = 0` demands exact structure.
pub fn vec_of_structure(a: &CMatrix, kind: StructureKind, tol: f64) -> Result<CVector> {
    let (m, n) = a.shape();
    kind.generator_len(m, n)?;
    let gen = match kind {
        StructureKind::Circulant => a.column(0).into_owned(),
        StructureKind::SymToeplitz => a.column(0).into_owned(),
        StructureKind::Toeplitz => CVector::from_fn(m + n - 1, |p, _| {
            if p < m - 1 {
                a[(m - 1 - p, 0)]
            } else {
                a[(0, p + 1 - m)]
            }
        }),
    };
    let rebuilt = from_generator(kind, m, n, &gen);
    let scale = a.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let limit = tol * scale;
    for j in 0..n {
        for i in 0..m {
            let deviation = (a[(i, j)] - rebuilt[(i, j)]).norm();
            if deviation > limit || deviation.is_nan() {
                return Err(Error::StructureViolation {
                    kind,
                    row: i,
                    col: j,
                    deviation,
                });
            }
        }
    }
    Ok(gen)
}

/// Same construction as [`build_circulant`]; the name follows its role as
/// the map `vec_𝒞(A) ↦ A·x`.
pub fn cr_of_vector(x: &CVector) -> CMatrix {
    let n = x.len();
    CMatrix::from_fn(n, n, |i, j| x[(i + n - j) % n])
}

/// `ℋ_y`, entry `(i, j) = y[(i + j) mod n]`; maps `vec_𝒞(B)` to `Bᵀy`.
pub fn h_matrix(y: &CVector) -> CMatrix {
    let n = y.len();
    CMatrix::from_fn(n, n, |i, j| y[(i + j) % n])
}

/// `𝒦_x ∈ ℂ^{m×(m+n−1)}`; maps `vec_𝒯(A)` to `A·x` for Toeplitz `A ∈ ℂ^{m×n}`.
/// Row `i` carries `x` starting at column `m − 1 − i`.
pub fn k_matrix(x: &CVector, m: usize) -> CMatrix {
    let n = x.len();
    let mut out = CMatrix::zeros(m, m + n - 1);
    for i in 0..m {
        for j in 0..n {
            out[(i, j + m - 1 - i)] = x[j];
        }
    }
    out
}

/// `𝒢_y ∈ ℂ^{n×(m+n−1)}`; maps `vec_𝒯(B)` to `Bᵀy` for Toeplitz
/// `B ∈ ℂ^{m×n}`. Row `j` carries `[y_m, …, y₁]` starting at column `j`.
pub fn g_matrix(y: &CVector, n: usize) -> CMatrix {
    let m = y.len();
    let mut out = CMatrix::zeros(n, m + n - 1);
    for j in 0..n {
        for i in 0..m {
            out[(j, j + m - 1 - i)] = y[i];
        }
    }
    out
}

/// `ℐ_x`; maps `vec_𝒮𝒯(A)` to `A·x` for symmetric-Toeplitz `A`.
/// It is the sum of a Hankel part (`x[i + k]`) and a lower-triangular
/// Toeplitz part (`x[i − k]`, `k ≥ 1`).
pub fn i_matrix(x: &CVector) -> CMatrix {
    let n = x.len();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, i.abs_diff(j))] += x[j];
        }
    }
    out
}

/// `𝒥^{1,m}_x = xᵀ ⊗ I_m`; maps `vec(A)` to `A·x` for `A ∈ ℂ^{m×n}`.
pub fn j1_matrix(x: &CVector, m: usize) -> CMatrix {
    kron(
        &CMatrix::from_row_slice(1, x.len(), x.as_slice()),
        &CMatrix::identity(m, m),
    )
}

/// `𝒥^{2,n}_y = I_n ⊗ yᵀ`; maps `vec(B)` to `Bᵀ·y` for `B ∈ ℂ^{m×n}`.
pub fn j2_matrix(y: &CVector, n: usize) -> CMatrix {
    kron(
        &CMatrix::identity(n, n),
        &CMatrix::from_row_slice(1, y.len(), y.as_slice()),
    )
}

/// Diagonal `𝔇` with `‖𝔇·vec_kind(A)‖₂ = ‖A‖_F` for every `A` of that
/// kind: entry `k` is the square root of how many times generator entry
/// `k` appears in the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingDiagonal {
    diag: DVector<f64>,
}

impl ScalingDiagonal {
    pub fn identity(len: usize) -> Self {
        Self {
            diag: DVector::from_element(len, 1.0),
        }
    }

    pub fn diag(&self) -> &DVector<f64> {
        &self.diag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        CVector::from_fn(v.len(), |k, _| v[k] * self.diag[k])
    }

    pub fn apply_inverse(&self, v: &CVector) -> CVector {
        CVector::from_fn(v.len(), |k, _| v[k] / self.diag[k])
    }
}

pub fn scaling_for(kind: StructureKind, m: usize, n: usize) -> Result<ScalingDiagonal> {
    let len = kind.generator_len(m, n)?;
    let diag = match kind {
        StructureKind::Circulant => DVector::from_element(n, (n as f64).sqrt()),
        StructureKind::Toeplitz => DVector::from_fn(len, |p, _| {
            let count = m.min(n).min(p + 1).min(m + n - 1 - p);
            (count as f64).sqrt()
        }),
        StructureKind::SymToeplitz => DVector::from_fn(n, |k, _| {
            if k == 0 {
                (n as f64).sqrt()
            } else {
                (2.0 * (n - k) as f64).sqrt()
            }
        }),
    };
    Ok(ScalingDiagonal { diag })
}

/// 0/1 generator of the sparsity pattern, `vec_kind(Θ_M)`. Assumes `M`
/// already has the structure (its pattern then does too).
pub fn generator_pattern(gen: &CVector) -> CVector {
    gen.map(|z| if z == ZERO { ZERO } else { ONE })
}
