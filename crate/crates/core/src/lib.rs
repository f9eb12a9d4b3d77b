//! Completely reducible positive maps attached to bipartite operators.
//!
//! A positive semidefinite `A ∈ M_k ⊗ M_m` induces the adjoint pair of positive maps
//! `G_A: M_k → M_m` and `F_A: M_m → M_k`, and hence the self-adjoint positive map `F_A ∘ G_A`.
//! This crate provides the realignment / partial-transpose algebra, Schmidt decompositions,
//! class membership tests (PPT, SPC, invariant under realignment, and the `S₄` family),
//! a constructive decomposition of `A` into weakly irreducible blocks with supports on
//! orthogonal local spaces, and completion of `k` mutually unbiased bases of `ℂ^k` to `k + 1`.

pub mod classify;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod mub;
pub mod reducibility;
pub mod schmidt;
pub mod superop;
pub mod symmetry;
pub mod tensor;
mod tolerance;

pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use tensor::{BipartiteOperator, BipartiteVector};
pub use tolerance::Tolerances;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖M − M*‖ = {defect:.3e} with ‖M‖ = {norm:.3e}")]
    NonHermitianInput { defect: f64, norm: f64 },
    #[error("expected a square matrix, got {0}x{1}")]
    NonSquareInput(usize, usize),
    #[error("operation requires equal local dimensions, got ({0}, {1})")]
    NonSquareDims(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("map is numerically zero (largest eigenvalue {0:.3e})")]
    ZeroMap(f64),
    #[error("operator is not positive semidefinite (least eigenvalue {0:.3e})")]
    NotPsdInput(f64),
    #[error("candidate is not an eigenvector: ‖L(γ) − λγ‖ = {residual:.3e}, λ = {lambda:.3e}")]
    NotAnEigenvector { residual: f64, lambda: f64 },
    #[error("decomposition exceeded recursion depth {0}")]
    RecursionLimit(usize),
    #[error("spectrum of F_A∘G_A is not contained in {{0, 1}} (offending eigenvalue {0:.6e})")]
    SpectrumNotZeroOne(f64),
    #[error("F_A∘G_A is not completely reducible (witness cross norm {cross_norm:.3e})")]
    NotCompletelyReducible {
        witness: Box<reducibility::Witness>,
        cross_norm: f64,
    },
    #[error("decomposition is indeterminate: {0}")]
    Indeterminate(String),
    #[error("basis is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("input bases are not mutually unbiased: {0}")]
    InputNotUnbiased(String),
    #[error("completion operator has the wrong spectrum: {0}")]
    SpectrumMismatch(String),
    #[error("could not extract a basis vector: {0}")]
    ExtractionFailure(String),
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("fixture generator budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("bad dimension for fixture: {0}")]
    BadDimension(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
