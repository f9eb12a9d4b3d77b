//! Dense complex linear algebra: the matrix type, Hermitian eigensolver, SVD, range projectors
//! and positivity checks every other module is built on.

mod eigen;
mod matrix;
mod svd;

pub use eigen::{hermitian_eig, orthonormalize, HermitianEigenSystem};
pub use matrix::{vdot, vnorm, CMatrix, ONE, ZERO};
pub use svd::{svd, Svd};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Orthogonal projector onto the range of `m`, keeping singular directions above
/// `rank_tol · s_max`.
pub fn range_projector(m: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let n = m.rows();
    let dec = svd(m)?;
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    let mut p = CMatrix::zeros(n, n);
    if smax == 0.0 {
        return Ok(p);
    }
    for (i, &s) in dec.singular_values.iter().enumerate() {
        if s > rank_tol * smax {
            let x = dec.left.col(i);
            p += &CMatrix::outer(&x, &x);
        }
    }
    Ok(p)
}

/// Numerical rank: singular values above `rank_tol · s_max`.
pub fn rank(m: &CMatrix, rank_tol: f64) -> Result<usize> {
    Ok(svd(m)?.rank(rank_tol))
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdCheck {
    pub psd: bool,
    pub hermitian: bool,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// `M` is PSD iff it is Hermitian within `herm_tol` (relative Frobenius) and
/// `λ_min ≥ −psd_tol · max(1, λ_max)`.
pub fn psd_check(m: &CMatrix, herm_tol: f64, psd_tol: f64) -> Result<PsdCheck> {
    if !m.is_square() {
        return Err(Error::NonSquareInput(m.rows(), m.cols()));
    }
    let hermitian = m.hermiticity_defect() <= herm_tol * m.norm_fro();
    let eig = hermitian_eig(&m.hermitian_part(), f64::INFINITY)?;
    let min_eigenvalue = eig.min_eigenvalue();
    let max_eigenvalue = eig.max_eigenvalue();
    let psd = hermitian && min_eigenvalue >= -psd_tol * max_eigenvalue.max(1.0);
    Ok(PsdCheck {
        psd,
        hermitian,
        min_eigenvalue,
        max_eigenvalue,
    })
}

/// Convenience form returning `(psd, λ_min)` with the default hermiticity tolerance.
pub fn is_psd(m: &CMatrix, psd_tol: f64) -> Result<(bool, f64)> {
    let check = psd_check(m, crate::Tolerances::default().hermitian, psd_tol)?;
    Ok((check.psd, check.min_eigenvalue))
}
