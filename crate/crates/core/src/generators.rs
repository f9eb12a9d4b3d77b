//! Seeded fixture factories. Every generator validates its output with the matching classifier
//! before returning it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::classify::{is_invariant_realign, is_ppt, is_spc};
use crate::linalg::{orthonormalize, psd_check, CMatrix, ONE, ZERO};
use crate::mub::{a_alpha, Basis};
use crate::schmidt::hermitian_basis;
use crate::tensor::{flip, kron, realign_square, uut, vec_f, BipartiteOperator};
use crate::{Error, Result, Tolerances};

/// Entries `(x + iy)/√2` with `x, y` standard normal.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * s, im * s)
    })
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    gaussian_matrix(n, 1, rng).into_vec()
}

/// `X + X*` for Gaussian `X`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let x = gaussian_matrix(n, n, rng);
    &x + &x.adjoint()
}

/// `XX*` normalized to unit trace.
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMatrix {
    let x = gaussian_matrix(n, rank.max(1), rng);
    let p = &x * &x.adjoint();
    let tr = p.trace().re;
    p.scale_real(1.0 / tr)
}

/// Orthonormalized Gaussian vectors.
pub fn random_basis<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Basis {
    loop {
        let cols: Vec<Vec<Complex64>> = (0..k).map(|_| gaussian_vector(k, rng)).collect();
        let ortho = orthonormalize(&cols, 1e-8);
        if ortho.len() == k {
            return Basis { dim: k, vectors: ortho };
        }
    }
}

/// `Σ Cᵢ ⊗ Dᵢ` with Gaussian Wishart factors, normalized to unit trace.
pub fn random_separable(k: usize, m: usize, terms: usize, seed: u64) -> Result<BipartiteOperator> {
    if terms == 0 || k == 0 || m == 0 {
        return Err(Error::BadDimension(format!(
            "separable fixture needs positive dims and terms, got ({k}, {m}, {terms})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = CMatrix::zeros(k * m, k * m);
    for _ in 0..terms {
        let x = gaussian_matrix(k, k, &mut rng);
        let y = gaussian_matrix(m, m, &mut rng);
        acc += &kron(&(&x * &x.adjoint()), &(&y * &y.adjoint()));
    }
    let tr = acc.trace().re;
    let a = BipartiteOperator::new(k, m, acc.scale_real(1.0 / tr).hermitian_part())?;
    validate(is_ppt(&a, &Tolerances::default())?.holds, "random_separable", &a)
}

/// `Σ λᵢ γᵢ ⊗ γᵢ` with `γ₁ = Id/√k`, `λ₁ ∈ [1, 2]`, further orthonormal Hermitian `γᵢ` from
/// Gaussian draws and small positive `λᵢ`, accepted when positive semidefinite. After
/// `max_tries` rejections falls back to `Σ λᵢ ρᵢ ⊗ ρᵢ` with PSD `ρᵢ`.
pub fn random_spc(k: usize, seed: u64, max_tries: usize) -> Result<BipartiteOperator> {
    if k == 0 {
        return Err(Error::BadDimension("SPC fixture needs k ≥ 1".into()));
    }
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = CMatrix::identity(k).scale_real(1.0 / (k as f64).sqrt());
    for _ in 0..max_tries {
        let lambda1 = rng.random_range(1.0..=2.0);
        let extra = rng.random_range(1..=(k * k - 1).max(1));
        let mut cols = vec![vec_f(&id)];
        for _ in 0..extra {
            cols.push(vec_f(&random_hermitian(k, &mut rng)));
        }
        let ortho = orthonormalize(&cols, 1e-8);
        let budget = rng.random_range(0.2..1.6) * lambda1 / k as f64;
        let weights: Vec<f64> = (1..ortho.len()).map(|_| rng.random_range(0.05..1.0)).collect();
        let wsum: f64 = weights.iter().sum();
        let mut acc = kron(&id, &id).scale_real(lambda1);
        for (v, w) in ortho.iter().skip(1).zip(&weights) {
            let g = crate::tensor::unvec_f(v, k, k).hermitian_part();
            acc += &kron(&g, &g).scale_real(budget * w / wsum);
        }
        let a = BipartiteOperator::new(k, k, acc.hermitian_part())?;
        if psd_check(a.matrix(), tol.hermitian, tol.psd)?.psd && is_spc(&a, &tol)?.holds {
            return Ok(a);
        }
    }
    let mut acc = CMatrix::zeros(k * k, k * k);
    for _ in 0..k.max(2) {
        let rho = random_density(k, k, &mut rng);
        acc += &kron(&rho, &rho).scale_real(rng.random_range(0.5..1.5));
    }
    let a = BipartiteOperator::new(k, k, acc.hermitian_part())?;
    if is_spc(&a, &tol)?.holds {
        Ok(a)
    } else {
        Err(Error::BudgetExhausted(format!("random_spc(k = {k}, seed = {seed})")))
    }
}

/// Convex combination of `Id⊗Id + uuᵗ`, `Id⊗Id + uuᵗ − T` and one or two `A_α` for random
/// orthonormal bases `α`. Weights are drawn from `[0.1, 1]` and normalized.
pub fn random_invariant(k: usize, seed: u64) -> Result<BipartiteOperator> {
    if k < 2 {
        return Err(Error::BadDimension(format!("invariant fixture needs k ≥ 2, got {k}")));
    }
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = BipartiteOperator::identity(k, k);
    let mut terms = vec![id.add(&uut(k)), id.add(&uut(k)).sub(&flip(k))];
    let n_bases = rng.random_range(1..=2);
    for _ in 0..n_bases {
        terms.push(a_alpha(&random_basis(k, &mut rng), &tol)?);
    }
    let weights: Vec<f64> = terms.iter().map(|_| rng.random_range(0.1..=1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut a = BipartiteOperator::zeros(k, k);
    for (t, w) in terms.iter().zip(&weights) {
        a = a.add(&t.scale(w / total));
    }
    let a = a.map_matrix(CMatrix::hermitian_part);
    validate(is_invariant_realign(&a, &tol)?.holds, "random_invariant", &a)
}

/// `Σⱼ cⱼ (F(Hⱼ)F(Hⱼ)* + Hⱼᵗ ⊗ Hⱼ)` with random PSD `Hⱼ` and `cⱼ > 0`. Every output satisfies
/// both `Aᵗ = S(A)` and `TAT = S(A)`.
pub fn random_transpose_realign_fixed(k: usize, terms: usize, seed: u64) -> Result<BipartiteOperator> {
    if k == 0 || terms == 0 {
        return Err(Error::BadDimension(format!("need k ≥ 1 and terms ≥ 1, got ({k}, {terms})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = CMatrix::zeros(k * k, k * k);
    for _ in 0..terms {
        let h = random_density(k, rng.random_range(1..=k), &mut rng);
        let v = vec_f(&h);
        let c = rng.random_range(0.2..1.0);
        acc += &(&CMatrix::outer(&v, &v) + &kron(&h.transpose(), &h)).scale_real(c);
    }
    let a = BipartiteOperator::new(k, k, acc.hermitian_part())?;
    let s = realign_square(&a)?;
    let t = flip(k);
    let swapped = &(t.matrix() * a.matrix()) * t.matrix();
    let tol = 1e-12 * (1.0 + a.norm_fro());
    let ok = a.transpose().dist_fro(&s) <= tol && swapped.dist_fro(s.matrix()) <= tol;
    validate(ok, "random_transpose_realign_fixed", &a)
}

/// Named operators that are not completely reducible or otherwise serve as counterexamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name", content = "k")]
pub enum Counterexample {
    /// `uuᵗ`.
    Uut(usize),
    /// `vv* + S(v̄vᵗ)` with `v = v₁ ⊗ v̄₁ + e₃ ⊗ e₃`, `v₁ = (1, i, 0, …)/√2`; needs `k ≥ 3`.
    RealignedPair(usize),
    /// `Id⊗Id + uuᵗ − T`: invariant under realignment but not PPT for `k ≥ 3`.
    InvariantNotPpt(usize),
}

pub fn counterexample(name: Counterexample) -> Result<BipartiteOperator> {
    match name {
        Counterexample::Uut(k) => {
            if k == 0 {
                return Err(Error::BadDimension("uut needs k ≥ 1".into()));
            }
            Ok(uut(k))
        }
        Counterexample::RealignedPair(k) => {
            if k < 3 {
                return Err(Error::BadDimension(format!("needs k ≥ 3, got {k}")));
            }
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut v1 = vec![ZERO; k];
            v1[0] = Complex64::new(r, 0.0);
            v1[1] = Complex64::new(0.0, r);
            let v1bar: Vec<Complex64> = v1.iter().map(|z| z.conj()).collect();
            let mut v = crate::tensor::kron_vec(&v1, &v1bar);
            v[2 * k + 2] += ONE;
            let vbar: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
            let first = CMatrix::outer(&v, &v);
            // v̄vᵗ = v̄ (v̄)*.
            let second = realign_square(&BipartiteOperator::new(k, k, CMatrix::outer(&vbar, &vbar))?)?;
            BipartiteOperator::new(k, k, &first + second.matrix())
        }
        Counterexample::InvariantNotPpt(k) => {
            if k < 3 {
                return Err(Error::BadDimension(format!("needs k ≥ 3, got {k}")));
            }
            Ok(invariant_family(k))
        }
    }
}

/// `Id⊗Id + uuᵗ − T` for any `k ≥ 1`.
pub fn invariant_family(k: usize) -> BipartiteOperator {
    BipartiteOperator::identity(k, k).add(&uut(k)).sub(&flip(k))
}

/// Direct sum of two separable operators on orthogonal local supports: the first lives on
/// `span{e₀..e_{k₁−1}} ⊗ span{e₀..e_{m₁−1}}`, the second on the complements.
pub fn orthogonal_block_sum(k: usize, m: usize, k1: usize, m1: usize, seed: u64) -> Result<BipartiteOperator> {
    if k1 == 0 || k1 >= k || m1 == 0 || m1 >= m {
        return Err(Error::BadDimension(format!(
            "split ({k1}, {m1}) must be proper inside ({k}, {m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let embed = |x: &CMatrix, n: usize, offset: usize| {
        let mut out = CMatrix::zeros(n, n);
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                out[(offset + r, offset + c)] = x[(r, c)];
            }
        }
        out
    };
    let mut acc = CMatrix::zeros(k * m, k * m);
    for (kk, mm, ko, mo) in [(k1, m1, 0, 0), (k - k1, m - m1, k1, m1)] {
        for _ in 0..2 {
            let c = embed(&random_density(kk, kk, &mut rng), k, ko);
            let d = embed(&random_density(mm, mm, &mut rng), m, mo);
            acc += &kron(&c, &d).scale_real(rng.random_range(0.5..1.5));
        }
    }
    BipartiteOperator::new(k, m, acc.hermitian_part())
}

/// Random real-orthonormal Hermitian basis element combination, used by property tests.
pub fn random_hermitian_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let basis = hermitian_basis(n);
    let mut acc = CMatrix::zeros(n, n);
    for h in &basis {
        let c: f64 = StandardNormal.sample(rng);
        acc += &h.scale_real(c);
    }
    let norm = acc.norm_fro();
    acc.scale_real(1.0 / norm)
}

fn validate(ok: bool, what: &str, a: &BipartiteOperator) -> Result<BipartiteOperator> {
    if ok {
        Ok(a.clone())
    } else {
        Err(Error::BudgetExhausted(format!("{what} produced an operator outside its class")))
    }
}
