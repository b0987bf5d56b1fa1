use std::fmt;
use std::str::FromStr;

use crate::dense::{ensure_finite_matrix, ensure_finite_vector, frob_norm, CMatrix, CVector};
use crate::error::{shape_err, Error, Result};
use crate::structured::{vec_of_structure, StructureKind};

/// Which structure the perturbations `ΔA, ΔB, ΔC` must keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureClass {
    /// Unstructured blocks.
    S0,
    /// All three blocks circulant, `n = m`.
    S1,
    /// All three blocks Toeplitz.
    S2,
    /// `B` symmetric-Toeplitz, `A` and `C` unstructured, `n = m`.
    S3,
}

impl StructureClass {
    /// Required kind of `(ΔA, ΔB, ΔC)`; `None` is an unstructured block.
    pub fn block_kinds(self) -> [Option<StructureKind>; 3] {
        match self {
            StructureClass::S0 => [None, None, None],
            StructureClass::S1 => [Some(StructureKind::Circulant); 3],
            StructureClass::S2 => [Some(StructureKind::Toeplitz); 3],
            StructureClass::S3 => [None, Some(StructureKind::SymToeplitz), None],
        }
    }
}

impl fmt::Display for StructureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureClass::S0 => "S0",
            StructureClass::S1 => "S1",
            StructureClass::S2 => "S2",
            StructureClass::S3 => "S3",
        })
    }
}

impl FromStr for StructureClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s0" | "unstructured" | "dense" => Ok(StructureClass::S0),
            "s1" | "circulant" => Ok(StructureClass::S1),
            "s2" | "toeplitz" => Ok(StructureClass::S2),
            "s3" | "sym-toeplitz" | "symtoeplitz" => Ok(StructureClass::S3),
            other => Err(Error::InvalidArgument(format!(
                "unknown structure class '{other}'"
            ))),
        }
    }
}

/// Weights `w₁…w₅` of the norm
/// `√(w₁²‖ΔA‖²_F + w₂²‖ΔB‖²_F + w₃²‖ΔC‖²_F + w₄²‖Δf‖² + w₅²‖Δg‖²)`.
/// A zero weight pins the corresponding part: it is not perturbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights([f64; 5]);

impl Weights {
    pub fn new(w: [f64; 5]) -> Result<Self> {
        if let Some(bad) = w.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and nonnegative, got {bad}"
            )));
        }
        if w.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(Self(w))
    }

    /// All weights one.
    pub fn absolute() -> Self {
        Self([1.0; 5])
    }

    /// `w_i = 1/‖part_i‖`, which measures perturbations relative to the
    /// data. A zero part gets weight zero (its relative perturbation is zero).
    pub fn relative(sys: &SaddleSystem) -> Result<Self> {
        let norms = [
            frob_norm(&sys.a),
            frob_norm(&sys.b),
            frob_norm(&sys.c),
            sys.f.norm(),
            sys.g.norm(),
        ];
        Self::new(norms.map(|v| if v > 0.0 { 1.0 / v } else { 0.0 }))
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.0
    }

    pub fn get(&self, part: usize) -> f64 {
        self.0[part]
    }

    pub fn with(mut self, part: usize, value: f64) -> Result<Self> {
        self.0[part] = value;
        Self::new(self.0)
    }
}

/// The saddle-point system `[A Bᵀ; B C][x; y] = [f; g]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSystem {
    pub(crate) a: CMatrix,
    pub(crate) b: CMatrix,
    pub(crate) c: CMatrix,
    pub(crate) f: CVector,
    pub(crate) g: CVector,
    tags: [Option<StructureKind>; 3],
    structure_tol: f64,
}

impl SaddleSystem {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, f: CVector, g: CVector) -> Result<Self> {
        let n = a.nrows();
        let m = b.nrows();
        if n == 0 {
            return Err(shape_err("block A is empty"));
        }
        if a.ncols() != n {
            return Err(shape_err(format!("A must be square, got {:?}", a.shape())));
        }
        if b.ncols() != n {
            return Err(shape_err(format!("B must be {m}x{n}, got {:?}", b.shape())));
        }
        if c.shape() != (m, m) {
            return Err(shape_err(format!("C must be {m}x{m}, got {:?}", c.shape())));
        }
        if f.len() != n || g.len() != m {
            return Err(shape_err(format!(
                "right-hand side lengths ({}, {}) do not match ({n}, {m})",
                f.len(),
                g.len()
            )));
        }
        ensure_finite_matrix(&a, "A")?;
        ensure_finite_matrix(&b, "B")?;
        ensure_finite_matrix(&c, "C")?;
        ensure_finite_vector(&f, "f")?;
        ensure_finite_vector(&g, "g")?;
        Ok(Self {
            a,
            b,
            c,
            f,
            g,
            tags: [None; 3],
            structure_tol: 0.0,
        })
    }

    /// Tolerance used whenever a block's structure is checked, relative to
    /// its largest entry. Zero (the default) demands exact structure.
    pub fn with_structure_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "structure tolerance must be >= 0, got {tol}"
            )));
        }
        self.structure_tol = tol;
        self.validate_tags(self.tags)?;
        Ok(self)
    }

    /// Attach structure tags to `(A, B, C)`; every tagged block is checked.
    pub fn with_tags(mut self, tags: [Option<StructureKind>; 3]) -> Result<Self> {
        self.validate_tags(tags)?;
        self.tags = tags;
        Ok(self)
    }

    fn validate_tags(&self, tags: [Option<StructureKind>; 3]) -> Result<()> {
        for (block, tag) in self.blocks().into_iter().zip(tags) {
            if let Some(kind) = tag {
                vec_of_structure(block, kind, self.structure_tol)?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.nrows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn f(&self) -> &CVector {
        &self.f
    }

    pub fn g(&self) -> &CVector {
        &self.g
    }

    pub fn tags(&self) -> [Option<StructureKind>; 3] {
        self.tags
    }

    pub fn structure_tol(&self) -> f64 {
        self.structure_tol
    }

    pub(crate) fn blocks(&self) -> [&CMatrix; 3] {
        [&self.a, &self.b, &self.c]
    }

    /// The assembled `(n+m)×(n+m)` coefficient matrix.
    pub fn coefficient_matrix(&self) -> CMatrix {
        let (n, m) = (self.n(), self.m());
        let mut full = CMatrix::zeros(n + m, n + m);
        full.view_mut((0, 0), (n, n)).copy_from(&self.a);
        full.view_mut((0, n), (n, m)).copy_from(&self.b.transpose());
        full.view_mut((n, 0), (m, n)).copy_from(&self.b);
        full.view_mut((n, n), (m, m)).copy_from(&self.c);
        full
    }

    pub fn rhs(&self) -> CVector {
        concat(&self.f, &self.g)
    }

    /// `‖𝒜‖_F`, with `B` counted twice.
    pub fn coefficient_norm(&self) -> f64 {
        let (a, b, c) = (frob_norm(&self.a), frob_norm(&self.b), frob_norm(&self.c));
        (a * a + 2.0 * b * b + c * c).sqrt()
    }

    /// Check that the blocks this class perturbs (nonzero weight) carry the
    /// class structure.
    pub fn check_class(&self, class: StructureClass, weights: &Weights) -> Result<()> {
        let incompatible = |reason: String| Error::IncompatibleClass {
            class: class.to_string(),
            reason,
        };
        if matches!(class, StructureClass::S1 | StructureClass::S3) && self.n() != self.m() {
            return Err(incompatible(format!(
                "needs n = m, got n = {}, m = {}",
                self.n(),
                self.m()
            )));
        }
        for (idx, (block, kind)) in self
            .blocks()
            .into_iter()
            .zip(class.block_kinds())
            .enumerate()
        {
            let Some(kind) = kind else { continue };
            if weights.get(idx) == 0.0 {
                continue;
            }
            if let Err(e) = vec_of_structure(block, kind, self.structure_tol) {
                let name = ["A", "B", "C"][idx];
                return Err(match e {
                    Error::StructureViolation { .. } => e,
                    other => incompatible(format!("block {name}: {other}")),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn concat(top: &CVector, bottom: &CVector) -> CVector {
    CVector::from_iterator(
        top.len() + bottom.len(),
        top.iter().chain(bottom.iter()).copied(),
    )
}
