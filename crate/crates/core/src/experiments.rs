//! Reference instances: two fixed systems with known backward errors and
//! two randomized size sweeps whose approximate solutions come from GMRES.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::backward_error::{compute_be, rigal_gaches, SaddleSystem, StructureClass, Weights};
use crate::dense::{real_matrix, real_vector, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::solvers::{gep, gmres, SolveOutcome};
use crate::structured::{build_sym_toeplitz, StructureKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Ill-scaled 4×4 Toeplitz blocks solved by GEP.
    Ex71,
    /// Small unstructured KKT system with a planted approximate solution.
    Ex56,
    /// Random sparse Toeplitz blocks, GMRES.
    Ex72,
    /// Gaussian-kernel symmetric-Toeplitz constraint block, GMRES.
    Ex73,
}

impl Experiment {
    pub fn is_sweep(self) -> bool {
        matches!(self, Experiment::Ex72 | Experiment::Ex73)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Ex71 => "ex71",
            Experiment::Ex56 => "ex56",
            Experiment::Ex72 => "ex72",
            Experiment::Ex73 => "ex73",
        })
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ex71" => Ok(Experiment::Ex71),
            "ex56" => Ok(Experiment::Ex56),
            "ex72" => Ok(Experiment::Ex72),
            "ex73" => Ok(Experiment::Ex73),
            other => Err(Error::InvalidArgument(format!(
                "unknown experiment '{other}'"
            ))),
        }
    }
}

fn toeplitz_rows(first_col: &[f64], first_row: &[f64]) -> CMatrix {
    let (m, n) = (first_col.len(), first_row.len());
    CMatrix::from_fn(m, n, |i, j| {
        Complex64::new(
            if i >= j {
                first_col[i - j]
            } else {
                first_row[j - i]
            },
            0.0,
        )
    })
}

/// The badly scaled Toeplitz system whose GEP solution is backward stable
/// but far from strongly backward stable.
pub fn ill_scaled_toeplitz_system() -> SaddleSystem {
    let a = toeplitz_rows(&[1e-6, 1e8, 10.0, 0.0], &[1e-6, 0.0, 1e3, 0.0]);
    let b = toeplitz_rows(&[1e-5, 1e5, 0.0, 0.0], &[1e-5, 1e7, 0.0, 0.0]);
    let c = toeplitz_rows(&[0.0, -0.5, 0.0, 0.0], &[0.0, 1e8, -60.0, 0.0]);
    let f = real_vector(&[1e8, 0.0, 1e3, 0.0]);
    let g = real_vector(&[1e-8, 0.0, 0.0, 0.0]);
    let tags = [Some(StructureKind::Toeplitz); 3];
    SaddleSystem::new(a, b, c, f, g)
        .and_then(|s| s.with_tags(tags))
        .expect("fixed instance is valid")
}

/// The five-digit solution printed for [`ill_scaled_toeplitz_system`].
pub fn ill_scaled_printed_solution() -> (CVector, CVector) {
    (
        real_vector(&[6.0278e3, -1.0000e4, 9.8995e-3, -9.9000e7]),
        real_vector(&[-5.0378e4, 1.0000e3, -8.8995e-2, 9.9000e6]),
    )
}

/// The LAPACK `dgesv` solution of [`ill_scaled_toeplitz_system`], stored
/// bit-exactly. Its residual is pure rounding, so the sparsity-preserving
/// error depends on the last bits of the solution.
pub fn ill_scaled_reference_solution() -> (CVector, CVector) {
    let bits = |b: &[u64]| real_vector(&b.iter().map(|&b| f64::from_bits(b)).collect::<Vec<_>>());
    (
        bits(&[
            0x40b78bc0afb57020,
            0xc0c387ffe135bb59,
            0x3f8446363c9da9b6,
            0xc1979a7933144dfe,
        ]),
        bits(&[
            0xc0e8993132bdf242,
            0x408f3fffceb51f86,
            0xbfb6c867a6e3755c,
            0x4162e1fbcf437a1c,
        ]),
    )
}

/// Split `u` into `(x, y)` with `x` of length `n`.
pub fn split(u: &CVector, n: usize) -> (CVector, CVector) {
    (
        u.rows(0, n).into_owned(),
        u.rows(n, u.len() - n).into_owned(),
    )
}

/// Solve a saddle system by GEP on its assembled matrix.
pub fn solve_gep(sys: &SaddleSystem) -> Result<(CVector, CVector)> {
    let out = gep(&sys.coefficient_matrix(), &sys.rhs())?;
    Ok(split(&out.solution, sys.n()))
}

/// A 4+2 KKT system with `A = I`, `C = 0`, and an approximate solution
/// that is off by `0.005` in every component. Returns `(system, x̃, ỹ)`.
pub fn kkt_reference_system() -> (SaddleSystem, CVector, CVector) {
    let a = CMatrix::identity(4, 4);
    let b = real_matrix(&[&[2., -1., 1., 2.], &[3., 1., 1., 1.]]);
    let sys = SaddleSystem::new(
        a,
        b,
        CMatrix::zeros(2, 2),
        real_vector(&[-1., 0., 2., 3.]),
        CVector::zeros(2),
    )
    .expect("fixed instance is valid");
    let x = real_vector(&[-1.495, 1.505, 1.505, 1.505]);
    let y = real_vector(&[1.005, -0.495]);
    (sys, x, y)
}

/// Weights for [`kkt_reference_system`]: only `B` and `f` may move.
pub fn kkt_reference_weights() -> Weights {
    Weights::new([0.0, 1.0, 0.0, 1.0, 0.0]).expect("valid weights")
}

fn randn(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Bernoulli(`density`) mask over uniform(0, 1) values.
fn sprand(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let keep = rng.random_bool(density);
            let value: f64 = rng.random();
            if keep {
                value
            } else {
                0.0
            }
        })
        .collect()
}

/// `toeplitz(a₁, a₂)` with a sparse first column and a dense first row;
/// the shared corner entry is taken from the dense row.
fn sparse_dense_toeplitz(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CMatrix {
    let mut col = sprand(rng, n, density);
    let row = randn(rng, n);
    col[0] = row[0];
    toeplitz_rows(&col, &row)
}

/// Random `n×n` Toeplitz blocks with sparse lower parts (densities 0.4,
/// 0.1, 0.1) and Gaussian right-hand sides.
pub fn sparse_toeplitz_system(n: usize, rng: &mut ChaCha8Rng) -> Result<SaddleSystem> {
    let a = sparse_dense_toeplitz(rng, n, 0.4);
    let b = sparse_dense_toeplitz(rng, n, 0.1);
    let c = sparse_dense_toeplitz(rng, n, 0.1);
    let f = real_vector(&randn(rng, n));
    let g = real_vector(&randn(rng, n));
    SaddleSystem::new(a, b, c, f, g)?.with_tags([Some(StructureKind::Toeplitz); 3])
}

/// `A = I`, `B` the symmetric-Toeplitz Gaussian kernel
/// `e^{−(i−j)²/2}/√(2π)`, `C = −μI`, Gaussian `f`, `g = 0`.
pub fn gaussian_kernel_system(n: usize, mu: f64, rng: &mut ChaCha8Rng) -> Result<SaddleSystem> {
    let kernel = CVector::from_fn(n, |k, _| {
        let k = k as f64;
        Complex64::new(
            (-k * k / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            0.0,
        )
    });
    let b = build_sym_toeplitz(&kernel);
    let c = CMatrix::identity(n, n) * Complex64::new(-mu, 0.0);
    let f = real_vector(&randn(rng, n));
    SaddleSystem::new(CMatrix::identity(n, n), b, c, f, CVector::zeros(n))?.with_tags([
        None,
        Some(StructureKind::SymToeplitz),
        None,
    ])
}

pub const GAUSSIAN_KERNEL_MU: f64 = 0.01;

/// GMRES tolerance of the sparse Toeplitz sweep.
pub const SPARSE_TOEPLITZ_GMRES_TOL: f64 = 1e-7;

/// GMRES tolerance of the Gaussian-kernel sweep. Its blocks are well
/// conditioned, so an unpreconditioned run stopped at `1e-7` leaves a
/// residual far above roundoff; the sweep asks for a near-roundoff solve.
pub const GAUSSIAN_KERNEL_GMRES_TOL: f64 = 1e-13;

/// One row of a sweep: the unstructured error, the sparsity-preserving
/// unstructured error, and the structured errors without and with
/// sparsity.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub eta: f64,
    pub eta_sps: f64,
    pub eta_struct: f64,
    pub eta_struct_sps: f64,
    pub gmres_iterations: usize,
    pub gmres_rel_residual: f64,
}

impl SweepRow {
    pub fn values(&self) -> [f64; 4] {
        [self.eta, self.eta_sps, self.eta_struct, self.eta_struct_sps]
    }
}

fn feasible_eta(
    sys: &SaddleSystem,
    x: &CVector,
    y: &CVector,
    w: &Weights,
    class: StructureClass,
    sparse: bool,
) -> Result<f64> {
    compute_be(sys, x, y, w, class, sparse)?
        .eta
        .ok_or(Error::Undefined("constraint system is inconsistent"))
}

fn gmres_solve(sys: &SaddleSystem, tol: f64) -> Result<(SolveOutcome, CVector, CVector)> {
    let dim = sys.n() + sys.m();
    let out = gmres(&sys.coefficient_matrix(), &sys.rhs(), tol, dim)?;
    let (x, y) = split(&out.solution, sys.n());
    Ok((out, x, y))
}

fn sweep_row(
    sys: &SaddleSystem,
    tol: f64,
    weights: &Weights,
    class: StructureClass,
) -> Result<SweepRow> {
    let (out, x, y) = gmres_solve(sys, tol)?;
    Ok(SweepRow {
        n: sys.n(),
        eta: rigal_gaches(sys, &x, &y)?,
        eta_sps: feasible_eta(sys, &x, &y, weights, StructureClass::S0, true)?,
        eta_struct: feasible_eta(sys, &x, &y, weights, class, false)?,
        eta_struct_sps: feasible_eta(sys, &x, &y, weights, class, true)?,
        gmres_iterations: out.iterations,
        gmres_rel_residual: out.rel_residual,
    })
}

pub fn size_rng(seed: u64, n: usize) -> ChaCha8Rng {
    // one stream per size keeps a row independent of the other sizes requested
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    rng
}

pub fn sparse_toeplitz_sweep(sizes: &[usize], seed: u64) -> Result<Vec<SweepRow>> {
    sizes
        .iter()
        .map(|&n| {
            let sys = sparse_toeplitz_system(n, &mut size_rng(seed, n))?;
            sweep_row(
                &sys,
                SPARSE_TOEPLITZ_GMRES_TOL,
                &Weights::absolute(),
                StructureClass::S2,
            )
        })
        .collect()
}

/// Weights relative to the blocks with `w₅ = 0` (`g` is not perturbed).
pub fn gaussian_kernel_sweep(sizes: &[usize], seed: u64) -> Result<Vec<SweepRow>> {
    sizes
        .iter()
        .map(|&n| {
            let sys = gaussian_kernel_system(n, GAUSSIAN_KERNEL_MU, &mut size_rng(seed, n))?;
            let weights = Weights::relative(&sys)?.with(4, 0.0)?;
            sweep_row(
                &sys,
                GAUSSIAN_KERNEL_GMRES_TOL,
                &weights,
                StructureClass::S3,
            )
        })
        .collect()
}

/// Parse `a:step:b`, `a:b` or a comma-separated list of sizes.
pub fn parse_sizes(list: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("cannot parse size list '{list}'"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let sizes: Vec<usize> = if list.contains(':') {
        let parts: Vec<&str> = list.split(':').collect();
        let (start, step, end) = match parts.as_slice() {
            [a, b] => (num(a)?, 1, num(b)?),
            [a, s, b] => (num(a)?, num(s)?, num(b)?),
            _ => return Err(bad()),
        };
        if step == 0 || start > end {
            return Err(bad());
        }
        (start..=end).step_by(step).collect()
    } else {
        list.split(',').map(num).collect::<Result<_>>()?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}
