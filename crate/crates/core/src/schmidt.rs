//! Operator Schmidt decompositions `A = Σ λᵢ γᵢ ⊗ δᵢ`.
//!
//! The plain variant reads the factors off an SVD of the realigned matrix. The Hermitian variant
//! expands `A` in a real orthonormal basis of Hermitian matrices on each side, so the coefficient
//! matrix is real and its singular vectors give Hermitian factors directly, degenerate clusters
//! included.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{svd, CMatrix, ONE, ZERO};
use crate::tensor::{kron, realign, unvec_f, vec_f, BipartiteOperator};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    pub k: usize,
    pub m: usize,
    /// Positive, descending.
    pub lambdas: Vec<f64>,
    pub gammas: Vec<CMatrix>,
    pub deltas: Vec<CMatrix>,
    pub hermitian: bool,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Schmidt decomposition from the SVD of `S(A)`: `γᵢ = F⁻¹(xᵢ)`, `δᵢ = F⁻¹(ȳᵢ)`.
///
/// Each `γᵢ` is rotated so its largest-modulus entry is real positive; the conjugate phase goes
/// to `δᵢ`.
pub fn schmidt_decompose(a: &BipartiteOperator, tol: &Tolerances) -> Result<SchmidtDecomposition> {
    let (k, m) = a.dims();
    if a.norm_fro() == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let dec = svd(&realign(a))?;
    let smax = dec.singular_values[0];
    let mut out = SchmidtDecomposition {
        k,
        m,
        lambdas: Vec::new(),
        gammas: Vec::new(),
        deltas: Vec::new(),
        hermitian: false,
    };
    for (i, &s) in dec.singular_values.iter().enumerate() {
        if s <= tol.schmidt_cutoff * smax {
            break;
        }
        let x = dec.left.col(i);
        let y: Vec<Complex64> = dec.right.col(i).iter().map(|z| z.conj()).collect();
        let mut gamma = unvec_f(&x, k, k);
        let mut delta = unvec_f(&y, m, m);
        let pivot = largest_entry(&gamma);
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            gamma = gamma.scale(phase);
            delta = delta.scale(phase.conj());
        }
        out.lambdas.push(s);
        out.gammas.push(gamma);
        out.deltas.push(delta);
    }
    Ok(out)
}

/// Hermitian Schmidt decomposition of a Hermitian `A`.
///
/// With `{Hₐ}` a real orthonormal Hermitian basis of `M_k` and `{K_b}` the transposed basis of
/// `M_m`, `A = Σ c_ab Hₐ ⊗ K_b` with real `c`. A real SVD `c = U Σ Vᵗ` yields
/// `γₗ = Σ U_al Hₐ`, `δₗ = Σ V_bl K_b`. Choosing `K_b = H_bᵗ` makes `c` symmetric positive
/// semidefinite whenever `A = S(A)`, so such inputs come out as `Σ λᵢ γᵢ ⊗ γᵢᵗ`.
///
/// Sign convention: the largest-modulus entry of `γᵢ` has positive real part (positive imaginary
/// part if the real part vanishes); the sign is shared with `δᵢ`.
pub fn hermitian_schmidt_decompose(
    a: &BipartiteOperator,
    tol: &Tolerances,
) -> Result<SchmidtDecomposition> {
    let (k, m) = a.dims();
    let am = a.matrix();
    let norm = am.norm_fro();
    let defect = am.hermiticity_defect();
    if defect > tol.hermitian * norm {
        return Err(Error::NonHermitianInput { defect, norm });
    }
    if norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let hk = basis_columns(&hermitian_basis(k));
    let km = basis_columns(&transposed_hermitian_basis(m));
    // c_ab = ⟨A, Hₐ ⊗ K_b⟩ = F(Hₐ)* S(A) conj(F(K_b)).
    let r = realign(&BipartiteOperator::new(k, m, am.hermitian_part())?);
    let c = &(&hk.adjoint() * &r) * &km.conj();
    let c_real = CMatrix::from_fn(c.rows(), c.cols(), |i, j| Complex64::new(c[(i, j)].re, 0.0));
    let dec = svd(&c_real)?;
    let smax = dec.singular_values[0];

    let mut out = SchmidtDecomposition {
        k,
        m,
        lambdas: Vec::new(),
        gammas: Vec::new(),
        deltas: Vec::new(),
        hermitian: true,
    };
    for (l, &s) in dec.singular_values.iter().enumerate() {
        if s <= tol.schmidt_cutoff * smax {
            break;
        }
        let mut gamma = unvec_f(&hk.mul_vec(&dec.left.col(l)), k, k).hermitian_part();
        let mut delta = unvec_f(&km.mul_vec(&dec.right.col(l)), m, m).hermitian_part();
        let pivot = largest_entry(&gamma);
        let negative = if pivot.re != 0.0 { pivot.re < 0.0 } else { pivot.im < 0.0 };
        if negative {
            gamma = gamma.scale_real(-1.0);
            delta = delta.scale_real(-1.0);
        }
        out.lambdas.push(s);
        out.gammas.push(gamma);
        out.deltas.push(delta);
    }
    Ok(out)
}

/// `Σ λᵢ γᵢ ⊗ δᵢ`.
pub fn reconstruct(d: &SchmidtDecomposition, dims: (usize, usize)) -> Result<BipartiteOperator> {
    let (k, m) = dims;
    if d.gammas.len() != d.lambdas.len() || d.deltas.len() != d.lambdas.len() {
        return Err(Error::DimensionMismatch("factor lists have different lengths".into()));
    }
    let mut out = CMatrix::zeros(k * m, k * m);
    for ((lambda, g), dl) in d.lambdas.iter().zip(&d.gammas).zip(&d.deltas) {
        if g.shape() != (k, k) || dl.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "factor shapes {:?} and {:?} do not match dims ({k}, {m})",
                g.shape(),
                dl.shape()
            )));
        }
        out += &kron(g, dl).scale_real(*lambda);
    }
    BipartiteOperator::new(k, m, out)
}

/// Real orthonormal basis of the Hermitian `n × n` matrices (trace inner product):
/// `Eₐₐ`, then for `a < b` the pair `(E_ab + E_ba)/√2`, `i(E_ab − E_ba)/√2`.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(a, a)] = ONE;
        out.push(e);
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut s = CMatrix::zeros(n, n);
            s[(a, b)] = Complex64::new(r, 0.0);
            s[(b, a)] = Complex64::new(r, 0.0);
            out.push(s);
            let mut t = CMatrix::zeros(n, n);
            t[(a, b)] = Complex64::new(0.0, r);
            t[(b, a)] = Complex64::new(0.0, -r);
            out.push(t);
        }
    }
    out
}

fn transposed_hermitian_basis(n: usize) -> Vec<CMatrix> {
    hermitian_basis(n).iter().map(CMatrix::transpose).collect()
}

/// Columns are `F(Hₐ)`.
fn basis_columns(basis: &[CMatrix]) -> CMatrix {
    let n2 = basis.first().map(|b| b.rows() * b.cols()).unwrap_or(0);
    let mut out = CMatrix::zeros(n2, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_col(j, &vec_f(b));
    }
    out
}

fn largest_entry(m: &CMatrix) -> Complex64 {
    let mut best = ZERO;
    for z in m.as_slice() {
        if z.norm() > best.norm() * (1.0 + 1e-12) {
            best = *z;
        }
    }
    best
}
