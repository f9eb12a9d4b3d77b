//! Kronecker products, the vectorization `F`, the flip `T`, the vector `u`, realignment and
//! partial transposes.
//!
//! Index convention: `a ⊗ b` has entry `i·m + j` equal to `aᵢ bⱼ`, and an operator on
//! `ℂ^k ⊗ ℂ^m` is read as the 4-index tensor `A[i, p, j, q] = A[(i·m + p), (j·m + q)]`.
//! Every reshape below is an index permutation of that view.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, ONE, ZERO};
use crate::{Error, Result};

/// A `km × km` matrix read as an element of `M_k ⊗ M_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteOperator {
    k: usize,
    m: usize,
    matrix: CMatrix,
}

impl BipartiteOperator {
    pub fn new(k: usize, m: usize, matrix: CMatrix) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::DimensionMismatch(format!(
                "local dimensions must be positive, got ({k}, {m})"
            )));
        }
        if matrix.shape() != (k * m, k * m) {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, local dimensions ({k}, {m}) need {}x{}",
                matrix.rows(),
                matrix.cols(),
                k * m,
                k * m
            )));
        }
        Ok(Self { k, m, matrix })
    }

    pub fn zeros(k: usize, m: usize) -> Self {
        Self {
            k,
            m,
            matrix: CMatrix::zeros(k * m, k * m),
        }
    }

    pub fn identity(k: usize, m: usize) -> Self {
        Self {
            k,
            m,
            matrix: CMatrix::identity(k * m),
        }
    }

    /// `C ⊗ D`.
    pub fn product(c: &CMatrix, d: &CMatrix) -> Result<Self> {
        if !c.is_square() || !d.is_square() {
            return Err(Error::DimensionMismatch("tensor factors must be square".into()));
        }
        Self::new(c.rows(), d.rows(), kron(c, d))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.k, self.m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_square_dims(&self) -> bool {
        self.k == self.m
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn norm_fro(&self) -> f64 {
        self.matrix.norm_fro()
    }

    /// Entry `A[i, p, j, q]` of the 4-index view.
    #[inline]
    pub fn tensor_entry(&self, i: usize, p: usize, j: usize, q: usize) -> Complex64 {
        self.matrix[(i * self.m + p, j * self.m + q)]
    }

    pub fn map_matrix(&self, f: impl FnOnce(&CMatrix) -> CMatrix) -> Self {
        Self {
            k: self.k,
            m: self.m,
            matrix: f(&self.matrix),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dims(), other.dims());
        self.map_matrix(|a| a + &other.matrix)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dims(), other.dims());
        self.map_matrix(|a| a - &other.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_matrix(|a| a.scale_real(s))
    }

    pub fn transpose(&self) -> Self {
        self.map_matrix(CMatrix::transpose)
    }

    /// `(V ⊗ W) A (V ⊗ W)`.
    pub fn compress(&self, v: &CMatrix, w: &CMatrix) -> Self {
        let vw = kron(v, w);
        self.map_matrix(|a| &(&vw * a) * &vw)
    }

    pub fn dist_fro(&self, other: &Self) -> f64 {
        self.matrix.dist_fro(&other.matrix)
    }
}

/// A vector of `ℂ^k ⊗ ℂ^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteVector {
    pub k: usize,
    pub m: usize,
    pub entries: Vec<Complex64>,
}

impl BipartiteVector {
    pub fn new(k: usize, m: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != k * m {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a vector of C^{k} ⊗ C^{m}",
                entries.len()
            )));
        }
        Ok(Self { k, m, entries })
    }

    /// `a ⊗ b`.
    pub fn product(a: &[Complex64], b: &[Complex64]) -> Self {
        Self {
            k: a.len(),
            m: b.len(),
            entries: kron_vec(a, b),
        }
    }

    /// `F⁻¹(v)`, the `k × m` matrix this vector vectorizes.
    pub fn unvec(&self) -> CMatrix {
        unvec_f(&self.entries, self.k, self.m)
    }

    /// `v` is Hermitian when `F⁻¹(v)` is a Hermitian matrix.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.k == self.m && self.unvec().is_hermitian(tol)
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// `F(Σ aᵢ bᵢᵗ) = Σ aᵢ ⊗ bᵢ`: the row-major flattening.
pub fn vec_f(m: &CMatrix) -> Vec<Complex64> {
    m.as_slice().to_vec()
}

/// Inverse of [`vec_f`] for a `rows × cols` matrix.
pub fn unvec_f(v: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols, "unvec_f: length mismatch");
    CMatrix::from_fn(rows, cols, |r, c| v[r * cols + c])
}

/// The flip `T = Σ eᵢeⱼᵗ ⊗ eⱼeᵢᵗ`, with `T(a ⊗ b) = b ⊗ a`.
pub fn flip(k: usize) -> BipartiteOperator {
    let mut t = CMatrix::zeros(k * k, k * k);
    for i in 0..k {
        for j in 0..k {
            t[(i * k + j, j * k + i)] = ONE;
        }
    }
    BipartiteOperator { k, m: k, matrix: t }
}

/// `u = Σ eᵢ ⊗ eᵢ`.
pub fn max_entangled_u(k: usize) -> BipartiteVector {
    let mut entries = vec![ZERO; k * k];
    for i in 0..k {
        entries[i * k + i] = ONE;
    }
    BipartiteVector { k, m: k, entries }
}

/// `uuᵗ`.
pub fn uut(k: usize) -> BipartiteOperator {
    let u = max_entangled_u(k).entries;
    let matrix = CMatrix::from_fn(k * k, k * k, |r, c| u[r] * u[c]);
    BipartiteOperator { k, m: k, matrix }
}

/// Realignment `S(A ⊗ B) = F(A) F(B)ᵗ`, so `S(a bᵗ ⊗ c dᵗ) = (a ⊗ b)(c ⊗ d)ᵗ`.
///
/// For `A ∈ M_k ⊗ M_m` the result is `k² × m²`: `S[(i·k + j), (p·m + q)] = A[i, p, j, q]`.
pub fn realign(a: &BipartiteOperator) -> CMatrix {
    let (k, m) = a.dims();
    let mut out = CMatrix::zeros(k * k, m * m);
    for i in 0..k {
        for j in 0..k {
            for p in 0..m {
                for q in 0..m {
                    out[(i * k + j, p * m + q)] = a.tensor_entry(i, p, j, q);
                }
            }
        }
    }
    out
}

/// Inverse of [`realign`]: rebuilds the operator on `ℂ^k ⊗ ℂ^m` from its `k² × m²` realignment.
pub fn unrealign(r: &CMatrix, k: usize, m: usize) -> Result<BipartiteOperator> {
    if r.shape() != (k * k, m * m) {
        return Err(Error::DimensionMismatch(format!(
            "realigned matrix is {}x{}, expected {}x{}",
            r.rows(),
            r.cols(),
            k * k,
            m * m
        )));
    }
    let mut out = CMatrix::zeros(k * m, k * m);
    for i in 0..k {
        for j in 0..k {
            for p in 0..m {
                for q in 0..m {
                    out[(i * m + p, j * m + q)] = r[(i * k + j, p * m + q)];
                }
            }
        }
    }
    BipartiteOperator::new(k, m, out)
}

/// Realignment of an operator on `M_k ⊗ M_k`, as an operator on the same space.
pub fn realign_square(a: &BipartiteOperator) -> Result<BipartiteOperator> {
    if !a.is_square_dims() {
        return Err(Error::NonSquareDims(a.k, a.m));
    }
    BipartiteOperator::new(a.k, a.k, realign(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    First,
    Second,
}

/// `A^{t₂} = Σ Aᵢ ⊗ Bᵢᵗ` (slot `Second`) or `A^{t₁} = Σ Aᵢᵗ ⊗ Bᵢ` (slot `First`).
pub fn partial_transpose(a: &BipartiteOperator, slot: Slot) -> BipartiteOperator {
    let (k, m) = a.dims();
    let mut out = CMatrix::zeros(k * m, k * m);
    for i in 0..k {
        for j in 0..k {
            for p in 0..m {
                for q in 0..m {
                    out[(i * m + p, j * m + q)] = match slot {
                        Slot::Second => a.tensor_entry(i, q, j, p),
                        Slot::First => a.tensor_entry(j, p, i, q),
                    };
                }
            }
        }
    }
    BipartiteOperator { k, m, matrix: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(k: usize, i: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; k];
        v[i] = ONE;
        v
    }

    fn outer_t(a: &[Complex64], b: &[Complex64]) -> CMatrix {
        CMatrix::from_fn(a.len(), b.len(), |r, s| a[r] * b[s])
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
    }

    #[test]
    fn kron_of_matrix_units() {
        let e11 = outer_t(&e(2, 0), &e(2, 0));
        let e22 = outer_t(&e(2, 1), &e(2, 1));
        let p = kron(&e11, &e22);
        for r in 0..4 {
            for s in 0..4 {
                let expected = if (r, s) == (1, 1) { ONE } else { ZERO };
                assert_eq!(p[(r, s)], expected);
            }
        }
    }

    #[test]
    fn vec_of_rank_one_is_tensor_product() {
        let m = outer_t(&e(3, 0), &e(3, 1));
        assert_eq!(vec_f(&m), kron_vec(&e(3, 0), &e(3, 1)));
        assert_eq!(unvec_f(&vec_f(&m), 3, 3), m);
    }

    #[test]
    fn flip_k2_swaps_middle_coordinates() {
        let t = flip(2);
        let expected = CMatrix::from_fn(4, 4, |r, s| {
            let perm = [0, 2, 1, 3];
            if perm[r] == s {
                ONE
            } else {
                ZERO
            }
        });
        assert_eq!(t.matrix(), &expected);
    }

    #[test]
    fn u_for_k2() {
        assert_eq!(max_entangled_u(2).entries, vec![ONE, ZERO, ZERO, ONE]);
    }

    #[test]
    fn realign_of_identity_is_uut() {
        for k in 1..=4 {
            let s = realign(&BipartiteOperator::identity(k, k));
            assert_eq!(&s, uut(k).matrix());
        }
    }

    #[test]
    fn realign_rank_one_rectangular() {
        let a = vec![c(1., 2.), c(-0.5, 0.)];
        let b = vec![c(0., 1.), c(3., 0.)];
        let cc = vec![c(1., 0.), c(2., -1.), c(0., 0.5)];
        let d = vec![c(-1., 0.), c(0., 0.), c(1., 1.)];
        let op = BipartiteOperator::product(&outer_t(&a, &b), &outer_t(&cc, &d)).unwrap();
        let r = realign(&op);
        assert_eq!(r.shape(), (4, 9));
        let expected = outer_t(&kron_vec(&a, &b), &kron_vec(&cc, &d));
        assert!(r.dist_fro(&expected) < 1e-15);
        assert_eq!(unrealign(&r, 2, 3).unwrap(), op);
    }

    #[test]
    fn partial_transpose_of_uut_is_flip() {
        for k in 1..=4 {
            assert_eq!(partial_transpose(&uut(k), Slot::Second), flip(k));
            assert_eq!(partial_transpose(&uut(k), Slot::First), flip(k));
        }
    }

    #[test]
    fn partial_transposes_compose_to_full_transpose() {
        let m = CMatrix::from_fn(6, 6, |r, s| c(r as f64 - s as f64 * 0.3, (r * s) as f64 * 0.1));
        let a = BipartiteOperator::new(2, 3, m).unwrap();
        let both = partial_transpose(&partial_transpose(&a, Slot::First), Slot::Second);
        assert_eq!(both, a.transpose());
    }

    #[test]
    fn hermitian_vector_predicate() {
        let h = CMatrix::from_row_major(2, 2, vec![ONE, c(0., 1.), c(0., -1.), c(2., 0.)]).unwrap();
        let v = BipartiteVector::new(2, 2, vec_f(&h)).unwrap();
        assert!(v.is_hermitian(1e-12));
        let w = BipartiteVector::new(2, 2, vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(!w.is_hermitian(1e-12));
    }

    #[test]
    fn operator_rejects_bad_shapes() {
        assert!(BipartiteOperator::new(2, 3, CMatrix::identity(5)).is_err());
        assert!(BipartiteOperator::new(0, 3, CMatrix::identity(0)).is_err());
    }
}
