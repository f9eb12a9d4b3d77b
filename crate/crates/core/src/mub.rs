//! Mutually unbiased bases: the projections `A_α`, the pair test, the resolution identity for
//! complete sets, completion of `k` bases to `k + 1`, and the prime-dimension construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, vdot, vnorm, CMatrix, ONE, ZERO};
use crate::reducibility::positive_schmidt_unique_seeded;
use crate::tensor::{kron_vec, realign_square, uut, BipartiteOperator};
use crate::{Error, Result, Tolerances};

/// An ordered list of `dim` vectors of `ℂ^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    pub dim: usize,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("a basis needs at least one vector".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a basis of {dim} vectors",
                v.len()
            )));
        }
        Ok(Self { dim, vectors })
    }

    pub fn computational(k: usize) -> Self {
        let vectors = (0..k)
            .map(|i| (0..k).map(|j| if i == j { ONE } else { ZERO }).collect())
            .collect();
        Self { dim: k, vectors }
    }

    /// Columns are the basis vectors.
    pub fn from_columns(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquareInput(m.rows(), m.cols()));
        }
        Self::new((0..m.cols()).map(|c| m.col(c)).collect())
    }

    pub fn to_columns(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, v) in self.vectors.iter().enumerate() {
            m.set_col(c, v);
        }
        m
    }

    /// `max |⟨vᵢ, vⱼ⟩ − δᵢⱼ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, x) in self.vectors.iter().enumerate() {
            for (j, y) in self.vectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((vdot(x, y) - target).norm());
            }
        }
        worst
    }

    fn require_orthonormal(&self, tol: f64) -> Result<()> {
        let d = self.orthonormality_defect();
        if d > tol {
            return Err(Error::NotOrthonormal(d));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubSet {
    pub dim: usize,
    pub bases: Vec<Basis>,
}

impl MubSet {
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let dim = bases
            .first()
            .map(|b| b.dim)
            .ok_or_else(|| Error::DimensionMismatch("empty basis set".into()))?;
        if bases.iter().any(|b| b.dim != dim) {
            return Err(Error::DimensionMismatch("bases of different dimensions".into()));
        }
        Ok(Self { dim, bases })
    }

    /// The set with basis `index` removed.
    pub fn without(&self, index: usize) -> MubSet {
        let bases = self
            .bases
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, b)| b.clone())
            .collect();
        MubSet { dim: self.dim, bases }
    }
}

/// `A_α = Σ vᵢvᵢ* ⊗ v̄ᵢvᵢᵗ`, the projection onto `span{vᵢ ⊗ v̄ᵢ}`.
pub fn a_alpha(alpha: &Basis, tol: &Tolerances) -> Result<BipartiteOperator> {
    alpha.require_orthonormal(tol.mub)?;
    Ok(a_alpha_unchecked(alpha))
}

fn a_alpha_unchecked(alpha: &Basis) -> BipartiteOperator {
    let k = alpha.dim;
    let mut out = CMatrix::zeros(k * k, k * k);
    for v in &alpha.vectors {
        let vbar: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let w = kron_vec(v, &vbar);
        out += &CMatrix::outer(&w, &w);
    }
    BipartiteOperator::new(k, k, out).expect("shape is k² × k²")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub first: usize,
    pub second: usize,
    /// `max | |⟨vᵢ, wⱼ⟩|² − 1/k |`.
    pub overlap_deviation: f64,
    /// `‖A_α A_β − uuᵗ/k‖_F`.
    pub operator_deviation: f64,
    pub unbiased: bool,
    /// Both criteria gave the same answer.
    pub criteria_agree: bool,
}

/// Unbiasedness by overlaps, cross-checked against `A_α A_β = uuᵗ/k`; the pair counts as
/// unbiased only when both tests pass.
pub fn is_unbiased_pair(alpha: &Basis, beta: &Basis, tol: &Tolerances) -> Result<PairCheck> {
    if alpha.dim != beta.dim {
        return Err(Error::DimensionMismatch(format!(
            "bases of dimensions {} and {}",
            alpha.dim, beta.dim
        )));
    }
    alpha.require_orthonormal(tol.mub)?;
    beta.require_orthonormal(tol.mub)?;
    Ok(pair_check(alpha, beta, 0, 1, tol))
}

fn pair_check(alpha: &Basis, beta: &Basis, first: usize, second: usize, tol: &Tolerances) -> PairCheck {
    let k = alpha.dim;
    let target = 1.0 / k as f64;
    let mut overlap_deviation: f64 = 0.0;
    for v in &alpha.vectors {
        for w in &beta.vectors {
            overlap_deviation = overlap_deviation.max((vdot(v, w).norm_sqr() - target).abs());
        }
    }
    let prod = a_alpha_unchecked(alpha).matrix() * a_alpha_unchecked(beta).matrix();
    let operator_deviation = prod.dist_fro(&uut(k).matrix().scale_real(target));
    let by_overlap = overlap_deviation <= tol.mub;
    let by_operator = operator_deviation <= tol.mub * k as f64;
    PairCheck {
        first,
        second,
        overlap_deviation,
        operator_deviation,
        unbiased: by_overlap && by_operator,
        criteria_agree: by_overlap == by_operator,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubReport {
    pub dim: usize,
    pub basis_count: usize,
    /// Per basis `max |⟨vᵢ, vⱼ⟩ − δᵢⱼ|`.
    pub orthonormality: Vec<f64>,
    pub pairs: Vec<PairCheck>,
    /// `‖Σ A_αᵢ − Id⊗Id − uuᵗ‖_F`, present for sets of `k + 1` bases.
    pub resolution_residual: Option<f64>,
    pub valid: bool,
    pub failures: Vec<String>,
}

pub fn verify_set(ms: &MubSet, tol: &Tolerances) -> MubReport {
    let k = ms.dim;
    let mut failures = Vec::new();
    let orthonormality: Vec<f64> = ms.bases.iter().map(Basis::orthonormality_defect).collect();
    for (i, &d) in orthonormality.iter().enumerate() {
        if d > tol.mub {
            failures.push(format!("basis {i} is not orthonormal (defect {d:.3e})"));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..ms.bases.len() {
        for j in i + 1..ms.bases.len() {
            let p = pair_check(&ms.bases[i], &ms.bases[j], i, j, tol);
            if !p.unbiased {
                failures.push(format!(
                    "bases {i} and {j} are not unbiased (overlap deviation {:.3e}, operator deviation {:.3e})",
                    p.overlap_deviation, p.operator_deviation
                ));
            }
            pairs.push(p);
        }
    }
    let resolution_residual = (ms.bases.len() == k + 1).then(|| {
        let mut sum = CMatrix::zeros(k * k, k * k);
        for b in &ms.bases {
            sum += a_alpha_unchecked(b).matrix();
        }
        let target = BipartiteOperator::identity(k, k).add(&uut(k));
        sum.dist_fro(target.matrix())
    });
    if let Some(r) = resolution_residual {
        if r > tol.mub * (k * k) as f64 {
            failures.push(format!("Σ A_α differs from Id⊗Id + uuᵗ by {r:.3e}"));
        }
    }
    MubReport {
        dim: k,
        basis_count: ms.bases.len(),
        orthonormality,
        pairs,
        resolution_residual,
        valid: failures.is_empty(),
        failures,
    }
}

/// Completes `k` mutually unbiased bases of `ℂ^k` with the unique remaining basis.
///
/// `B = Id⊗Id + uuᵗ − Σ A_αᵢ` must be a rank-`k` projection fixed by realignment; its positive
/// Schmidt factors are `vᵢvᵢ*`, whose top eigenvectors form the new basis (each phase-normalized).
pub fn complete(ms: &MubSet, tol: &Tolerances, seed: u64) -> Result<Basis> {
    let k = ms.dim;
    if ms.bases.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "completion needs exactly {k} bases, got {}",
            ms.bases.len()
        )));
    }
    let report = verify_set(ms, tol);
    if !report.valid {
        return Err(Error::InputNotUnbiased(report.failures.join("; ")));
    }

    let mut b = BipartiteOperator::identity(k, k).add(&uut(k));
    for alpha in &ms.bases {
        b = b.sub(&a_alpha_unchecked(alpha));
    }
    let b = b.map_matrix(CMatrix::hermitian_part);
    let eig = hermitian_eig(b.matrix(), f64::INFINITY)?;
    let ones = eig
        .eigenvalues
        .iter()
        .filter(|&&e| (e - 1.0).abs() <= tol.spectrum_gap)
        .count();
    let zeros = eig.eigenvalues.iter().filter(|&&e| e.abs() <= tol.spectrum_gap).count();
    if ones != k || zeros != k * k - k {
        return Err(Error::SpectrumMismatch(format!(
            "expected {k} eigenvalues 1 and {} eigenvalues 0, found {ones} and {zeros}",
            k * k - k
        )));
    }
    let defect = b.dist_fro(&realign_square(&b)?);
    if defect > tol.mub * (1.0 + b.norm_fro()) {
        return Err(Error::SpectrumMismatch(format!("B is not fixed by realignment (defect {defect:.3e})")));
    }

    let dec = positive_schmidt_unique_seeded(&b, tol, seed)
        .map_err(|e| Error::ExtractionFailure(format!("positive Schmidt decomposition failed: {e}")))?;
    if dec.rank() != k {
        return Err(Error::ExtractionFailure(format!("{} factors instead of {k}", dec.rank())));
    }
    let mut vectors = Vec::with_capacity(k);
    for (i, g) in dec.gammas.iter().enumerate() {
        let e = hermitian_eig(g, f64::INFINITY)?;
        let top = e.max_eigenvalue();
        let second = if k > 1 { e.eigenvalues[k - 2] } else { 0.0 };
        if second.abs() > tol.spectrum_gap * top.abs().max(1.0) {
            return Err(Error::ExtractionFailure(format!(
                "factor {i} is not rank one (second eigenvalue {second:.3e})"
            )));
        }
        let v = e.vector(k - 1);
        let n = vnorm(&v);
        vectors.push(phase_normalize(&v.iter().map(|z| z / n).collect::<Vec<_>>()));
    }
    let basis = Basis::new(vectors)?;

    let mut extended = ms.clone();
    extended.bases.push(basis.clone());
    let check = verify_set(&extended, tol);
    if !check.valid {
        return Err(Error::ExtractionFailure(check.failures.join("; ")));
    }
    Ok(basis)
}

/// Rotates `v` so its largest-modulus entry is real positive. Entries within `1e-10` (relative)
/// of the maximum modulus count as ties and the lowest index wins.
pub fn phase_normalize(v: &[Complex64]) -> Vec<Complex64> {
    let max = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return v.to_vec();
    }
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-10))
        .copied()
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    v.iter().map(|z| z * phase).collect()
}

/// Greedy pairing of the vectors of two bases by largest `|⟨aᵢ, bⱼ⟩|`; returns
/// `(i, j, |⟨aᵢ, bⱼ⟩|)` triples in matching order.
pub fn greedy_match(a: &Basis, b: &Basis) -> Vec<(usize, usize, f64)> {
    let mut used_a = vec![false; a.dim];
    let mut used_b = vec![false; b.dim];
    let mut out = Vec::with_capacity(a.dim.min(b.dim));
    for _ in 0..a.dim.min(b.dim) {
        let mut best = (0, 0, -1.0);
        for (i, x) in a.vectors.iter().enumerate() {
            if used_a[i] {
                continue;
            }
            for (j, y) in b.vectors.iter().enumerate() {
                if used_b[j] {
                    continue;
                }
                let o = vdot(x, y).norm();
                if o > best.2 {
                    best = (i, j, o);
                }
            }
        }
        used_a[best.0] = true;
        used_b[best.1] = true;
        out.push(best);
    }
    out
}

/// Largest `‖c·aᵢ − bⱼ‖₂` over greedily matched pairs, with the unit scalar `c` chosen to align
/// each pair. Zero iff the bases agree up to order and per-vector phases.
pub fn aligned_deviation(a: &Basis, b: &Basis) -> f64 {
    if a.dim != b.dim {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (i, j, _) in greedy_match(a, b) {
        let x = &a.vectors[i];
        let y = &b.vectors[j];
        let o = vdot(x, y);
        let c = if o.norm() > 0.0 { o / o.norm() } else { ONE };
        let diff: Vec<Complex64> = x.iter().zip(y).map(|(p, q)| p * c - q).collect();
        worst = worst.max(vnorm(&diff));
    }
    worst
}

pub fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `p + 1` mutually unbiased bases of `ℂ^p`.
///
/// `p = 2`: computational, Hadamard and circular bases. Odd `p`: the computational basis and,
/// for `m = 0, …, p−1`, the basis `{ (ω^{m s² + b s}/√p)_s : b = 0, …, p−1 }` with `ω = e^{2πi/p}`.
pub fn generate_prime(p: usize) -> Result<MubSet> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let r = 1.0 / (p as f64).sqrt();
    let mut bases = vec![Basis::computational(p)];
    if p == 2 {
        let c = |re: f64, im: f64| Complex64::new(re * r, im * r);
        bases.push(Basis::new(vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)]])?);
        bases.push(Basis::new(vec![vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(0.0, -1.0)]])?);
    } else {
        let root = |e: usize| Complex64::from_polar(r, 2.0 * PI * (e % p) as f64 / p as f64);
        for m in 0..p {
            let vectors = (0..p)
                .map(|b| (0..p).map(|s| root((m * s * s + b * s) % p)).collect())
                .collect();
            bases.push(Basis::new(vectors)?);
        }
    }
    MubSet::new(bases)
}

/// `‖A_α u − u‖₂`; zero for every orthonormal basis.
pub fn a_alpha_fixes_u(alpha: &Basis) -> f64 {
    let k = alpha.dim;
    let a = a_alpha_unchecked(alpha);
    let u = crate::tensor::max_entangled_u(k).entries;
    let au = a.matrix().mul_vec(&u);
    vnorm(&au.iter().zip(&u).map(|(x, y)| x - y).collect::<Vec<_>>())
}
