//! Normwise backward errors of an approximate solution `ũ = [x̃; ỹ]` and
//! the minimal perturbations attaining them.
//!
//! The structured errors solve `min ‖ΔE‖₂` subject to `𝒳·ΔE = r_d`, where
//! `𝒳` linearises the perturbed equations in the (scaled, weighted)
//! generators of the perturbation blocks. The minimiser is the minimum-norm
//! least-squares solution; when some weights are zero `𝒳` may lose full row
//! rank and the constraint can be inconsistent, in which case no
//! perturbation of the admitted shape exists.

mod assemble;
mod system;

use num_complex::Complex64;

use crate::dense::{frob_norm, min_norm_solve, CMatrix, CVector, ZERO};
use crate::error::{shape_err, Error, Result};
use crate::structured::{vec_of_structure, StructureKind};
use assemble::{assemble, check_len, rebuild_block, zero_or, Layout};

pub use system::{SaddleSystem, StructureClass, Weights};

/// `r_f = f − Ax̃ − Bᵀỹ`, `r_g = g − Bx̃ − Cỹ` and their concatenation.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub rf: CVector,
    pub rg: CVector,
    pub rd: CVector,
}

/// Numerical knobs of [`compute_be_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff of the minimum-norm solve; `None`
    /// uses `ε·max(rows, cols)`.
    pub rank_tol: Option<f64>,
    /// The constraint counts as consistent when the least-squares residual
    /// is at most this times `‖r_d‖₂`.
    pub consistency_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: None,
            consistency_tol: 1e-10,
        }
    }
}

/// `(ΔA, ΔB, ΔC, Δf, Δg)` together with the structure they were built to
/// keep.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSet {
    pub da: CMatrix,
    pub db: CMatrix,
    pub dc: CMatrix,
    pub df: CVector,
    pub dg: CVector,
    pub class: StructureClass,
    pub sparse: bool,
}

impl PerturbationSet {
    pub fn zeros(sys: &SaddleSystem, class: StructureClass, sparse: bool) -> Self {
        let (n, m) = (sys.n(), sys.m());
        Self {
            da: CMatrix::zeros(n, n),
            db: CMatrix::zeros(m, n),
            dc: CMatrix::zeros(m, m),
            df: CVector::zeros(n),
            dg: CVector::zeros(m),
            class,
            sparse,
        }
    }

    pub fn blocks(&self) -> [&CMatrix; 3] {
        [&self.da, &self.db, &self.dc]
    }

    pub fn is_zero(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|z| *z == ZERO))
            && self.df.iter().chain(self.dg.iter()).all(|z| *z == ZERO)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeReport {
    /// The backward error; `None` when no admissible perturbation exists.
    pub eta: Option<f64>,
    /// Rebuilt from the minimum-norm least-squares solution, so they are
    /// meaningful (they attain `eta`) only when `feasible`.
    pub perturbations: PerturbationSet,
    /// `‖(𝒜+Δ𝒜)ũ − (d+Δd)‖₂` for `perturbations`.
    pub verify_residual: f64,
    pub weighted_norm: f64,
    pub feasible: bool,
    pub coefficient_rank: usize,
    pub coefficient_shape: (usize, usize),
    /// `‖𝒳·ΔE − r_d‖₂` of the least-squares solution.
    pub lsq_residual: f64,
    /// `‖ΔE‖₂` of the least-squares solution, defined even when infeasible.
    pub lsq_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub residual_norm: f64,
    pub structure_ok: bool,
    pub sparsity_ok: bool,
    pub weighted_norm: f64,
}

fn check_solution(sys: &SaddleSystem, x: &CVector, y: &CVector) -> Result<()> {
    if x.len() != sys.n() || y.len() != sys.m() {
        return Err(shape_err(format!(
            "solution lengths ({}, {}) do not match ({}, {})",
            x.len(),
            y.len(),
            sys.n(),
            sys.m()
        )));
    }
    Ok(())
}

/// `M·v` (or `Mᵀ·v`) by plain left-to-right dot products, so residuals
/// do not depend on a BLAS backend; for nearly exact solutions they are
/// pure rounding.
fn product(mat: &CMatrix, v: &CVector, transposed: bool) -> CVector {
    let rows = if transposed { mat.ncols() } else { mat.nrows() };
    CVector::from_fn(rows, |i, _| {
        let mut acc = ZERO;
        for (j, vj) in v.iter().enumerate() {
            let mij = if transposed { mat[(j, i)] } else { mat[(i, j)] };
            acc += mij * vj;
        }
        acc
    })
}

pub fn residual(sys: &SaddleSystem, x: &CVector, y: &CVector) -> Result<Residual> {
    check_solution(sys, x, y)?;
    let rf = &sys.f - product(&sys.a, x, false) - product(&sys.b, y, true);
    let rg = &sys.g - product(&sys.b, x, false) - product(&sys.c, y, false);
    let rd = system::concat(&rf, &rg);
    Ok(Residual { rf, rg, rd })
}

/// Unstructured backward error `‖d − 𝒜ũ‖₂ / √(‖𝒜‖²_F‖ũ‖₂² + ‖d‖₂²)`.
pub fn rigal_gaches(sys: &SaddleSystem, x: &CVector, y: &CVector) -> Result<f64> {
    let r = residual(sys, x, y)?;
    let u2 = x.norm_squared() + y.norm_squared();
    let d2 = sys.f.norm_squared() + sys.g.norm_squared();
    let an = sys.coefficient_norm();
    let denom = (an * an * u2 + d2).sqrt();
    if denom == 0.0 {
        return Err(Error::Undefined(
            "coefficient matrix, solution and right-hand side are all zero",
        ));
    }
    Ok(r.rd.norm() / denom)
}

/// `√(Σ w_i²‖part_i‖²)`.
pub fn weighted_triple_norm(pert: &PerturbationSet, weights: &Weights) -> f64 {
    let parts = [
        frob_norm(&pert.da),
        frob_norm(&pert.db),
        frob_norm(&pert.dc),
        pert.df.norm(),
        pert.dg.norm(),
    ];
    parts
        .iter()
        .zip(weights.as_array())
        .map(|(p, w)| (w * p).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// The coefficient matrix `𝒳` of the constraint `𝒳·ΔE = r_d`. Columns of
/// zero-weight parts are left out.
pub fn assemble_coefficient(
    sys: &SaddleSystem,
    x: &CVector,
    y: &CVector,
    weights: &Weights,
    class: StructureClass,
    sparse: bool,
) -> Result<CMatrix> {
    check_solution(sys, x, y)?;
    sys.check_class(class, weights)?;
    let layout = Layout::new(sys, weights, class, sparse)?;
    Ok(assemble(&layout, weights, x, y))
}

/// Inverse of the column layout of [`assemble_coefficient`]: slice, undo
/// scaling and weight, rebuild each block, mask. Zero-weight parts are
/// exact zeros.
pub fn extract_perturbations(
    delta_e: &CVector,
    sys: &SaddleSystem,
    weights: &Weights,
    class: StructureClass,
    sparse: bool,
) -> Result<PerturbationSet> {
    let layout = Layout::new(sys, weights, class, sparse)?;
    extract(&layout, delta_e, sys, weights, class, sparse)
}

fn extract(
    layout: &Layout,
    delta_e: &CVector,
    sys: &SaddleSystem,
    weights: &Weights,
    class: StructureClass,
    sparse: bool,
) -> Result<PerturbationSet> {
    check_len(layout, delta_e)?;
    let (n, m) = (sys.n(), sys.m());
    let mut rebuilt: [Option<CMatrix>; 3] = [None, None, None];
    for (slot, block) in rebuilt.iter_mut().zip(&layout.blocks) {
        if let Some(block) = block {
            *slot = Some(rebuild_block(block, delta_e)?);
        }
    }
    let [da, db, dc] = rebuilt;
    let mut pert = PerturbationSet {
        da: zero_or(da, n, n),
        db: zero_or(db, m, n),
        dc: zero_or(dc, m, m),
        df: layout.f.map_or_else(
            || CVector::zeros(n),
            |at| delta_e.rows(at, n) / Complex64::from(weights.get(3)),
        ),
        dg: layout.g.map_or_else(
            || CVector::zeros(m),
            |at| delta_e.rows(at, m) / Complex64::from(weights.get(4)),
        ),
        class,
        sparse,
    };
    if sparse {
        // no-op for exactly structured blocks, which are already masked
        // through their generator
        for (d, (orig, kind)) in [&mut pert.da, &mut pert.db, &mut pert.dc]
            .into_iter()
            .zip(sys.blocks().into_iter().zip(class.block_kinds()))
        {
            if kind.is_none() {
                mask_in_place(d, orig);
            }
        }
    }
    Ok(pert)
}

fn mask_in_place(d: &mut CMatrix, orig: &CMatrix) {
    for (dij, oij) in d.iter_mut().zip(orig.iter()) {
        if *oij == ZERO {
            *dij = ZERO;
        }
    }
}

/// Check that `pert` makes `ũ` an exact solution of the perturbed system
/// and keeps the structure (and, in sparse mode, the zero pattern) it
/// claims.
pub fn verify_perturbation(
    sys: &SaddleSystem,
    x: &CVector,
    y: &CVector,
    pert: &PerturbationSet,
    weights: &Weights,
) -> Result<Verification> {
    check_solution(sys, x, y)?;
    let (n, m) = (sys.n(), sys.m());
    let shapes_ok = pert.da.shape() == (n, n)
        && pert.db.shape() == (m, n)
        && pert.dc.shape() == (m, m)
        && pert.df.len() == n
        && pert.dg.len() == m;
    if !shapes_ok {
        return Err(shape_err("perturbation shapes do not match the system"));
    }
    let perturbed = SaddleSystem::new(
        &sys.a + &pert.da,
        &sys.b + &pert.db,
        &sys.c + &pert.dc,
        &sys.f + &pert.df,
        &sys.g + &pert.dg,
    )?;
    let residual_norm = residual(&perturbed, x, y)?.rd.norm();

    let structure_ok = pert
        .blocks()
        .into_iter()
        .zip(pert.class.block_kinds())
        .all(|(d, kind)| kind.is_none_or(|k: StructureKind| vec_of_structure(d, k, 0.0).is_ok()));
    let sparsity_ok = !pert.sparse
        || pert
            .blocks()
            .into_iter()
            .zip(sys.blocks())
            .all(|(d, orig)| {
                d.iter()
                    .zip(orig.iter())
                    .all(|(dij, oij)| *oij != ZERO || *dij == ZERO)
            });

    Ok(Verification {
        residual_norm,
        structure_ok,
        sparsity_ok,
        weighted_norm: weighted_triple_norm(pert, weights),
    })
}

pub fn compute_be(
    sys: &SaddleSystem,
    x: &CVector,
    y: &CVector,
    weights: &Weights,
    class: StructureClass,
    sparse: bool,
) -> Result<BeReport> {
    compute_be_with(sys, x, y, weights, class, sparse, &Tolerances::default())
}

pub fn compute_be_with(
    sys: &SaddleSystem,
    x: &CVector,
    y: &CVector,
    weights: &Weights,
    class: StructureClass,
    sparse: bool,
    tol: &Tolerances,
) -> Result<BeReport> {
    if !(tol.consistency_tol >= 0.0 && tol.consistency_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "consistency tolerance must be >= 0, got {}",
            tol.consistency_tol
        )));
    }
    check_solution(sys, x, y)?;
    sys.check_class(class, weights)?;
    let layout = Layout::new(sys, weights, class, sparse)?;
    let coeff = assemble(&layout, weights, x, y);
    let rd = residual(sys, x, y)?.rd;
    let rd_norm = rd.norm();

    let sol = min_norm_solve(&coeff, &rd, tol.rank_tol)?;
    let feasible = rd_norm == 0.0 || sol.residual_norm <= tol.consistency_tol * rd_norm;
    let lsq_norm = sol.solution.norm();
    let perturbations = if rd_norm == 0.0 {
        PerturbationSet::zeros(sys, class, sparse)
    } else {
        extract(&layout, &sol.solution, sys, weights, class, sparse)?
    };
    let check = verify_perturbation(sys, x, y, &perturbations, weights)?;
    Ok(BeReport {
        eta: feasible.then_some(if rd_norm == 0.0 { 0.0 } else { lsq_norm }),
        perturbations,
        verify_residual: check.residual_norm,
        weighted_norm: check.weighted_norm,
        feasible,
        coefficient_rank: sol.effective_rank,
        coefficient_shape: coeff.shape(),
        lsq_residual: sol.residual_norm,
        lsq_norm,
    })
}
