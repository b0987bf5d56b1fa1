//! Normwise structured backward errors for saddle-point systems
//!
//! ```text
//!     [ A  Bᵀ ] [x]   [f]
//!     [ B  C  ] [y] = [g]
//! ```
//!
//! whose blocks are circulant, Toeplitz or symmetric-Toeplitz, with or
//! without preservation of the blocks' sparsity patterns. Besides the scalar
//! backward error the crate reconstructs the minimal structured perturbation
//! set `(ΔA, ΔB, ΔC, Δf, Δg)` that attains it, so that the approximate
//! solution can be checked to solve the nearby problem exactly.
//!
//! Module map:
//!
//! - [`dense`]: complex dense kernel (Hadamard/Kronecker products, `vec`,
//!   norms, numerical rank, minimum-norm least squares).
//! - [`structured`]: generators, structured builders and the coefficient
//!   builder matrices used to linearise `ΔM·v` in the generator.
//! - [`backward_error`]: the saddle system, weights, coefficient assembly,
//!   backward errors and minimal perturbations.
//! - [`wrls`]: weighted regularized least squares recast as a saddle system.
//! - [`solvers`]: Gaussian elimination with partial pivoting and GMRES.
//! - [`experiments`]: the fixed and randomized reference instances.

pub mod backward_error;
pub mod dense;
mod error;
pub mod experiments;
pub mod solvers;
pub mod structured;
pub mod wrls;

pub use backward_error::{
    assemble_coefficient, compute_be, compute_be_with, extract_perturbations, residual,
    rigal_gaches, verify_perturbation, weighted_triple_norm, BeReport, PerturbationSet, Residual,
    SaddleSystem, StructureClass, Tolerances, Verification, Weights,
};
pub use dense::{CMatrix, CVector, MinNormSolution};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use structured::{ScalingDiagonal, StructureKind, StructuredGenerator};
