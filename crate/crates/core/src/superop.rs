//! The positive maps `G_A: M_k → M_m`, `F_A: M_m → M_k` and `F_A ∘ G_A`, as matrices acting on
//! `vec_f` coordinates, plus the Perron fixed point of a positive map.
//!
//! `G_A` is fixed by `tr(A(X ⊗ Y)) = tr(G_A(X) Y)`, which in the 4-index view reads
//! `G_A(X)[p, q] = Σ A[i, p, j, q] X[j, i]`; `F_A(Y)[i, j] = Σ A[i, p, j, q] Y[q, p]` is its
//! adjoint for Hermitian `A`.

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, psd_check, CMatrix, HermitianEigenSystem, ONE};
use crate::tensor::{unvec_f, vec_f, BipartiteOperator};
use crate::{Error, Result, Tolerances};

/// A linear map `M_source → M_target` stored as its `target² × source²` matrix in `vec_f`
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperOperator {
    pub source_dim: usize,
    pub target_dim: usize,
    pub matrix: CMatrix,
}

impl SuperOperator {
    /// Tabulates `f` on the matrix units `E_ab`; column `a·n + b` holds `vec_f(f(E_ab))`.
    pub fn from_fn(source_dim: usize, target_dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let n = source_dim;
        let mut matrix = CMatrix::zeros(target_dim * target_dim, n * n);
        let mut unit = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                unit[(a, b)] = ONE;
                let image = f(&unit);
                debug_assert_eq!(image.shape(), (target_dim, target_dim));
                matrix.set_col(a * n + b, &vec_f(&image));
                unit[(a, b)] = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        Self {
            source_dim,
            target_dim,
            matrix,
        }
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!(x.shape(), (self.source_dim, self.source_dim), "SuperOperator::apply: shape");
        unvec_f(&self.matrix.mul_vec(&vec_f(x)), self.target_dim, self.target_dim)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SuperOperator) -> Result<SuperOperator> {
        if first.target_dim != self.source_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose a map on M_{} after a map into M_{}",
                self.source_dim, first.target_dim
            )));
        }
        Ok(SuperOperator {
            source_dim: first.source_dim,
            target_dim: self.target_dim,
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// Adjoint for the trace inner product; in `vec_f` coordinates the conjugate transpose.
    pub fn adjoint(&self) -> SuperOperator {
        SuperOperator {
            source_dim: self.target_dim,
            target_dim: self.source_dim,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            source_dim: n,
            target_dim: n,
            matrix: CMatrix::identity(n * n),
        }
    }

    /// Spectrum of a self-adjoint map (`source_dim == target_dim`).
    pub fn eig(&self) -> Result<HermitianEigenSystem> {
        hermitian_eig(&self.matrix.hermitian_part(), f64::INFINITY)
    }
}

/// `G_A(X)[p, q] = Σᵢⱼ A[i, p, j, q] X[j, i]`.
pub fn apply_g(a: &BipartiteOperator, x: &CMatrix) -> CMatrix {
    let (k, m) = a.dims();
    CMatrix::from_fn(m, m, |p, q| {
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                let xji = x[(j, i)];
                if xji.re != 0.0 || xji.im != 0.0 {
                    s += a.tensor_entry(i, p, j, q) * xji;
                }
            }
        }
        s
    })
}

/// `F_A(Y)[i, j] = Σ_pq A[i, p, j, q] Y[q, p]`.
pub fn apply_f(a: &BipartiteOperator, y: &CMatrix) -> CMatrix {
    let (k, m) = a.dims();
    CMatrix::from_fn(k, k, |i, j| {
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for p in 0..m {
            for q in 0..m {
                let yqp = y[(q, p)];
                if yqp.re != 0.0 || yqp.im != 0.0 {
                    s += a.tensor_entry(i, p, j, q) * yqp;
                }
            }
        }
        s
    })
}

fn require_hermitian(a: &BipartiteOperator, tol: &Tolerances) -> Result<()> {
    let norm = a.norm_fro();
    let defect = a.matrix().hermiticity_defect();
    if defect > tol.hermitian * norm {
        return Err(Error::NonHermitianInput { defect, norm });
    }
    Ok(())
}

pub fn g_of(a: &BipartiteOperator, tol: &Tolerances) -> Result<SuperOperator> {
    require_hermitian(a, tol)?;
    let (k, m) = a.dims();
    Ok(SuperOperator::from_fn(k, m, |x| apply_g(a, x)))
}

pub fn f_of(a: &BipartiteOperator, tol: &Tolerances) -> Result<SuperOperator> {
    require_hermitian(a, tol)?;
    let (k, m) = a.dims();
    Ok(SuperOperator::from_fn(m, k, |y| apply_f(a, y)))
}

/// `F_A ∘ G_A` for PSD `A`; its matrix is Hermitian positive semidefinite.
pub fn fg_of(a: &BipartiteOperator, tol: &Tolerances) -> Result<SuperOperator> {
    let check = psd_check(a.matrix(), tol.hermitian, tol.psd)?;
    if !check.hermitian {
        let norm = a.norm_fro();
        return Err(Error::NonHermitianInput {
            defect: a.matrix().hermiticity_defect(),
            norm,
        });
    }
    if !check.psd {
        return Err(Error::NotPsdInput(check.min_eigenvalue));
    }
    Ok(fg_unchecked(a))
}

/// `F_A ∘ G_A` without the positivity check, symmetrized to be exactly Hermitian.
pub(crate) fn fg_unchecked(a: &BipartiteOperator) -> SuperOperator {
    let herm = a.map_matrix(CMatrix::hermitian_part);
    let (k, m) = herm.dims();
    let g = SuperOperator::from_fn(k, m, |x| apply_g(&herm, x));
    let f = SuperOperator::from_fn(m, k, |y| apply_f(&herm, y));
    let mut fg = f.compose(&g).expect("dimensions agree by construction");
    fg.matrix = fg.matrix.hermitian_part();
    fg
}

/// Perron eigenpair of a positive self-adjoint map on `M_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronPair {
    pub lambda: f64,
    /// PSD, unit Frobenius norm.
    pub gamma: CMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Power iteration `Lⁿ(Id)/‖Lⁿ(Id)‖_F`.
///
/// Starting from the identity keeps every iterate PSD for a positive `L`, so the limit is a PSD
/// eigenvector for the spectral radius even when that eigenvalue is degenerate.
pub fn top_fixed_psd(l: &SuperOperator, tol: &Tolerances) -> Result<PerronPair> {
    if l.source_dim != l.target_dim {
        return Err(Error::DimensionMismatch("top_fixed_psd needs a map M_k → M_k".into()));
    }
    let k = l.source_dim;
    let scale = l.matrix.norm_fro();
    let mut x = CMatrix::identity(k).scale_real(1.0 / (k as f64).sqrt());
    for it in 1..=tol.power_max_iter {
        let y = l.apply(&x).hermitian_part();
        let n = y.norm_fro();
        if n <= tol.decomposition * scale.max(f64::MIN_POSITIVE) || n == 0.0 {
            return Err(Error::ZeroMap(n));
        }
        let next = y.scale_real(1.0 / n);
        let step = next.dist_fro(&x);
        x = next;
        if step <= tol.power_tol {
            let lx = l.apply(&x);
            let lambda = lx.inner(&x).re;
            let residual = lx.dist_fro(&x.scale_real(lambda));
            return Ok(PerronPair {
                lambda,
                gamma: x,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NoConvergence(format!(
        "power iteration did not settle within {} steps",
        tol.power_max_iter
    )))
}
