//! Linearisation of the perturbed equations in the unknown
//! `ΔE = [e_A; e_B; e_C; e_f; e_g]`.
//!
//! Every block `M` of kind `k` contributes `M·v = 𝔐_k(v)·gen(M)` where
//! `𝔐_k` is one of the builder matrices in [`crate::structured`] (or a
//! Kronecker map for unstructured blocks). The unknown for `M` is
//! `e = w·𝔇·gen(ΔM)`, so `‖e‖₂ = w‖ΔM‖_F`, and the column block is
//! `𝔐_k(v)·diag(pattern)·𝔇⁻¹/w`. Parts with zero weight get no columns.

use nalgebra::DVector;

use super::system::{SaddleSystem, StructureClass, Weights};
use crate::dense::{sign_pattern, unvec, vec_col_major, CMatrix, CVector, ONE, ZERO};
use crate::error::{shape_err, Result};
use crate::structured::{
    build, cr_of_vector, g_matrix, generator_pattern, h_matrix, i_matrix, j1_matrix, j2_matrix,
    k_matrix, scaling_for, vec_of_structure, StructureKind,
};

/// Columns owned by one matrix block.
#[derive(Debug, Clone)]
pub(crate) struct BlockLayout {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
    pub kind: Option<StructureKind>,
    pub weight: f64,
    pub scale: DVector<f64>,
    /// 0/1 mask on the generator (on `vec(M)` for unstructured blocks).
    pub pattern: CVector,
}

impl BlockLayout {
    pub fn len(&self) -> usize {
        self.scale.len()
    }

    /// `diag(pattern)·𝔇⁻¹/w`, as a vector of diagonal entries.
    fn column_factor(&self) -> CVector {
        CVector::from_fn(self.len(), |k, _| {
            self.pattern[k] / (self.scale[k] * self.weight)
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub blocks: [Option<BlockLayout>; 3],
    /// Offset of `e_f` and `e_g`, when present.
    pub f: Option<usize>,
    pub g: Option<usize>,
    pub total: usize,
}

impl Layout {
    pub fn new(
        sys: &SaddleSystem,
        weights: &Weights,
        class: StructureClass,
        sparse: bool,
    ) -> Result<Self> {
        let (n, m) = (sys.n(), sys.m());
        let dims = [(n, n), (m, n), (m, m)];
        let mut offset = 0;
        let mut blocks: [Option<BlockLayout>; 3] = [None, None, None];
        for (idx, (block, kind)) in sys
            .blocks()
            .into_iter()
            .zip(class.block_kinds())
            .enumerate()
        {
            let weight = weights.get(idx);
            if weight == 0.0 {
                continue;
            }
            let (rows, cols) = dims[idx];
            let (scale, pattern) = match kind {
                Some(kind) => {
                    let scale = scaling_for(kind, rows, cols)?.diag().clone();
                    let pattern = if sparse {
                        generator_pattern(&vec_of_structure(block, kind, sys.structure_tol())?)
                    } else {
                        CVector::from_element(scale.len(), ONE)
                    };
                    (scale, pattern)
                }
                None => {
                    let pattern = if sparse {
                        vec_col_major(&sign_pattern(block))
                    } else {
                        CVector::from_element(rows * cols, ONE)
                    };
                    (DVector::from_element(rows * cols, 1.0), pattern)
                }
            };
            let layout = BlockLayout {
                offset,
                rows,
                cols,
                kind,
                weight,
                scale,
                pattern,
            };
            offset += layout.len();
            blocks[idx] = Some(layout);
        }
        let mut take = |part: usize, len: usize| {
            (weights.get(part) != 0.0).then(|| {
                let at = offset;
                offset += len;
                at
            })
        };
        let f = take(3, n);
        let g = take(4, m);
        Ok(Self {
            blocks,
            f,
            g,
            total: offset,
        })
    }
}

/// `𝔐_k(v)`: the matrix taking `gen(M)` to `M·v`, or to `Mᵀ·v` when
/// `transposed`.
fn action(
    kind: Option<StructureKind>,
    rows: usize,
    cols: usize,
    v: &CVector,
    transposed: bool,
) -> CMatrix {
    match (kind, transposed) {
        (None, false) => j1_matrix(v, rows),
        (None, true) => j2_matrix(v, cols),
        (Some(StructureKind::Circulant), false) => cr_of_vector(v),
        (Some(StructureKind::Circulant), true) => h_matrix(v),
        (Some(StructureKind::Toeplitz), false) => k_matrix(v, rows),
        (Some(StructureKind::Toeplitz), true) => g_matrix(v, cols),
        (Some(StructureKind::SymToeplitz), _) => i_matrix(v),
    }
}

fn place(out: &mut CMatrix, row: usize, layout: &BlockLayout, raw: &CMatrix) {
    let factor = layout.column_factor();
    for j in 0..raw.ncols() {
        for i in 0..raw.nrows() {
            out[(row + i, layout.offset + j)] = raw[(i, j)] * factor[j];
        }
    }
}

pub(crate) fn assemble(layout: &Layout, weights: &Weights, x: &CVector, y: &CVector) -> CMatrix {
    let (n, m) = (x.len(), y.len());
    let mut out = CMatrix::zeros(n + m, layout.total);
    if let Some(a) = &layout.blocks[0] {
        place(&mut out, 0, a, &action(a.kind, a.rows, a.cols, x, false));
    }
    if let Some(b) = &layout.blocks[1] {
        place(&mut out, 0, b, &action(b.kind, b.rows, b.cols, y, true));
        place(&mut out, n, b, &action(b.kind, b.rows, b.cols, x, false));
    }
    if let Some(c) = &layout.blocks[2] {
        place(&mut out, n, c, &action(c.kind, c.rows, c.cols, y, false));
    }
    if let Some(at) = layout.f {
        let v = -ONE / weights.get(3);
        for i in 0..n {
            out[(i, at + i)] = v;
        }
    }
    if let Some(at) = layout.g {
        let v = -ONE / weights.get(4);
        for i in 0..m {
            out[(n + i, at + i)] = v;
        }
    }
    out
}

/// Rebuild `ΔM` from its slice of `ΔE`.
pub(crate) fn rebuild_block(layout: &BlockLayout, delta_e: &CVector) -> Result<CMatrix> {
    let slice = delta_e.rows(layout.offset, layout.len());
    let factor = layout.column_factor();
    let gen = CVector::from_fn(layout.len(), |k, _| slice[k] * factor[k]);
    match layout.kind {
        Some(kind) => build(kind, layout.rows, layout.cols, &gen),
        None => unvec(&gen, layout.rows, layout.cols),
    }
}

pub(crate) fn check_len(layout: &Layout, delta_e: &CVector) -> Result<()> {
    if delta_e.len() != layout.total {
        return Err(shape_err(format!(
            "perturbation vector has length {}, layout needs {}",
            delta_e.len(),
            layout.total
        )));
    }
    Ok(())
}

pub(crate) fn zero_or(v: Option<CMatrix>, rows: usize, cols: usize) -> CMatrix {
    v.unwrap_or_else(|| CMatrix::from_element(rows, cols, ZERO))
}
