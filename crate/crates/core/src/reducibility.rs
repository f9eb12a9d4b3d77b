//! Complete reducibility of `F_A ∘ G_A`: the split test, the recursive block decomposition,
//! weak irreducibility and the positive Schmidt decomposition of operators whose map has
//! spectrum in `{0, 1}`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, orthonormalize, psd_check, range_projector, rank, CMatrix};
use crate::schmidt::{hermitian_schmidt_decompose, SchmidtDecomposition};
use crate::superop::{apply_g, fg_unchecked, top_fixed_psd, SuperOperator};
use crate::tensor::{kron, unvec_f, vec_f, BipartiteOperator};
use crate::{Error, Result, Tolerances};

/// One summand `(V ⊗ W) A (V ⊗ W)` of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub v: CMatrix,
    pub w: CMatrix,
    pub rank_v: usize,
    pub rank_w: usize,
    pub block_operator: BipartiteOperator,
    /// Largest eigenvalue of `F ∘ G` restricted to the block.
    pub top_eigenvalue: f64,
    /// Set when the Perron eigenvalue is simple and its eigenvector has full rank on `V`.
    pub irreducible_certified: bool,
    /// PSD Perron eigenvector of the block, unit Frobenius norm.
    pub perron: CMatrix,
}

/// A PSD eigenvector whose induced split leaves a cross term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub gamma: CMatrix,
    pub eigenvalue: f64,
    /// `‖A − (V₁⊗W₁)A(V₁⊗W₁) − (V₁ᶜ⊗W₁ᶜ)A(V₁ᶜ⊗W₁ᶜ)‖_F`, absolute.
    pub cross_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CompletelyReducible,
    NotCompletelyReducible,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducibilityReport {
    pub k: usize,
    pub m: usize,
    pub verdict: Verdict,
    pub completely_reducible: bool,
    pub blocks: Vec<Block>,
    /// `‖A − Σ (Vᵢ⊗Wᵢ)A(Vᵢ⊗Wᵢ)‖_F`; for a negative verdict, the blocks found so far.
    pub residual_norm: f64,
    pub norm_a: f64,
    /// Largest `‖VᵢVⱼ‖_F` or `‖WᵢWⱼ‖_F` over distinct blocks.
    pub orthogonality_defect: f64,
    pub witness: Option<Witness>,
    /// Multiplicity of the largest eigenvalue of `F_A ∘ G_A`.
    pub multiplicity_top: usize,
    pub top_eigenvalue: f64,
    pub note: Option<String>,
}

/// Result of the split test for one eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub pass: bool,
    pub v1: CMatrix,
    pub w1: CMatrix,
    pub eigenvalue: f64,
    /// Absolute Frobenius norm of the cross term.
    pub cross_norm: f64,
}

/// Tests whether the eigenvector `γ` splits `A` along `V₁ = range(γ)`, `W₁ = range(G_A(γ))`.
pub fn split_check(a: &BipartiteOperator, gamma: &CMatrix, tol: &Tolerances) -> Result<SplitOutcome> {
    let (k, _) = a.dims();
    if gamma.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "eigenvector is {:?}, expected {k}x{k}",
            gamma.shape()
        )));
    }
    let l = fg_unchecked(a);
    split_with_map(a, &l, gamma, tol)
}

fn split_with_map(
    a: &BipartiteOperator,
    l: &SuperOperator,
    gamma: &CMatrix,
    tol: &Tolerances,
) -> Result<SplitOutcome> {
    let lg = l.apply(gamma);
    let gg = gamma.inner(gamma).re;
    let lambda = if gg > 0.0 { lg.inner(gamma).re / gg } else { 0.0 };
    let residual = lg.dist_fro(&gamma.scale_real(lambda));
    let floor = tol.decomposition * l.matrix.norm_fro();
    if lambda <= floor || residual > tol.decomposition.sqrt() * lambda * gg.sqrt() {
        return Err(Error::NotAnEigenvector { residual, lambda });
    }
    let (k, m) = a.dims();
    let v1 = range_projector(gamma, tol.rank)?;
    let w1 = range_projector(&apply_g(a, gamma), tol.rank)?;
    let v2 = &CMatrix::identity(k) - &v1;
    let w2 = &CMatrix::identity(m) - &w1;
    let kept = &a.compress(&v1, &w1).into_matrix() + a.compress(&v2, &w2).matrix();
    let cross_norm = a.matrix().dist_fro(&kept);
    Ok(SplitOutcome {
        pass: cross_norm <= tol.decomposition * a.norm_fro(),
        v1,
        w1,
        eigenvalue: lambda,
        cross_norm,
    })
}

enum Flow {
    Done,
    Failed(Witness),
    Unknown(String),
}

struct Ctx<'a> {
    source: &'a BipartiteOperator,
    tol: &'a Tolerances,
    rng: ChaCha8Rng,
    blocks: Vec<Block>,
    depth_cap: usize,
    zero_floor: f64,
}

/// Splits `A` recursively into blocks `(Vᵢ⊗Wᵢ)A(Vᵢ⊗Wᵢ)` with orthogonal `Vᵢ` and orthogonal `Wᵢ`.
///
/// At each level a PSD eigenvector for the top eigenvalue of `F∘G` is chosen. A simple top
/// eigenvalue gives the Perron vector directly; a degenerate one is resolved by taking the
/// leading spectral projector of a seeded random Hermitian element of the eigenspace and
/// projecting it back onto the eigenspace. A failed split is a witness against complete
/// reducibility; a degenerate eigenspace that keeps producing full-support candidates after
/// `tol.retries` fresh draws yields [`Verdict::Indeterminate`].
pub fn decompose(a: &BipartiteOperator, tol: &Tolerances, seed: u64) -> Result<ReducibilityReport> {
    let check = psd_check(a.matrix(), tol.hermitian, tol.psd)?;
    if !check.psd {
        return Err(Error::NotPsdInput(check.min_eigenvalue));
    }
    let (k, m) = a.dims();
    let norm_a = a.norm_fro();
    let herm = a.map_matrix(CMatrix::hermitian_part);
    let l = fg_unchecked(&herm);
    let eig = l.eig()?;
    let top = eig.max_eigenvalue();
    let zero_floor = (tol.decomposition * norm_a).powi(2);
    let multiplicity_top = if top > zero_floor {
        eig.top_cluster(tol.cluster).len()
    } else {
        0
    };

    let mut ctx = Ctx {
        source: &herm,
        tol,
        rng: ChaCha8Rng::seed_from_u64(seed),
        blocks: Vec::new(),
        depth_cap: k,
        zero_floor,
    };
    let flow = ctx.process(&herm, &CMatrix::identity(k), &CMatrix::identity(m), 0)?;
    let blocks = std::mem::take(&mut ctx.blocks);

    let mut recon = CMatrix::zeros(k * m, k * m);
    for b in &blocks {
        recon += b.block_operator.matrix();
    }
    let residual_norm = herm.matrix().dist_fro(&recon);
    let mut orthogonality_defect: f64 = 0.0;
    for (i, x) in blocks.iter().enumerate() {
        for y in &blocks[i + 1..] {
            orthogonality_defect = orthogonality_defect
                .max((&x.v * &y.v).norm_fro())
                .max((&x.w * &y.w).norm_fro());
        }
    }

    let mut report = ReducibilityReport {
        k,
        m,
        verdict: Verdict::CompletelyReducible,
        completely_reducible: false,
        blocks,
        residual_norm,
        norm_a,
        orthogonality_defect,
        witness: None,
        multiplicity_top,
        top_eigenvalue: top,
        note: None,
    };
    match flow {
        Flow::Failed(w) => {
            report.verdict = Verdict::NotCompletelyReducible;
            report.witness = Some(w);
        }
        Flow::Unknown(reason) => {
            report.verdict = Verdict::Indeterminate;
            report.note = Some(reason);
        }
        Flow::Done => {
            let bound = tol.decomposition * norm_a.max(f64::MIN_POSITIVE);
            if residual_norm > bound * 10.0 || orthogonality_defect > tol.decomposition.sqrt() {
                report.verdict = Verdict::Indeterminate;
                report.note = Some(format!(
                    "verification failed: residual {residual_norm:.3e}, orthogonality defect {orthogonality_defect:.3e}"
                ));
            }
        }
    }
    report.completely_reducible = report.verdict == Verdict::CompletelyReducible;
    Ok(report)
}

impl Ctx<'_> {
    fn process(&mut self, a: &BipartiteOperator, v: &CMatrix, w: &CMatrix, depth: usize) -> Result<Flow> {
        if depth > self.depth_cap {
            return Err(Error::RecursionLimit(self.depth_cap));
        }
        let tol = self.tol;
        let l = fg_unchecked(a);
        let eig = l.eig()?;
        let lambda = eig.max_eigenvalue();
        if lambda <= self.zero_floor {
            return Ok(Flow::Done);
        }
        let cluster = eig.top_cluster(tol.cluster);
        let k = a.k();
        let space = hermitian_eigenspace(&eig, &cluster, k);
        let rank_v = rank(v, tol.rank)?;

        let attempts = if space.len() > 1 { tol.retries.max(1) } else { 1 };
        for _ in 0..attempts {
            let gamma = self.candidate(&space, &l)?;
            let split = match split_with_map(a, &l, &gamma, tol) {
                Ok(s) => s,
                Err(Error::NotAnEigenvector { residual, lambda }) => {
                    return Ok(Flow::Unknown(format!(
                        "candidate eigenvector off by {residual:.3e} at eigenvalue {lambda:.3e}"
                    )))
                }
                Err(e) => return Err(e),
            };
            if !split.pass {
                return Ok(Flow::Failed(Witness {
                    gamma,
                    eigenvalue: split.eigenvalue,
                    cross_norm: split.cross_norm,
                }));
            }
            let rank_v1 = rank(&split.v1, tol.rank)?;
            if rank_v1 < rank_v {
                let v2 = range_projector(&(v - &split.v1), tol.rank)?;
                let w2 = range_projector(&(w - &split.w1), tol.rank)?;
                let a1 = self.source.compress(&split.v1, &split.w1);
                let a2 = self.source.compress(&v2, &w2);
                return match self.process(&a1, &split.v1, &split.w1, depth + 1)? {
                    Flow::Done => self.process(&a2, &v2, &w2, depth + 1),
                    other => Ok(other),
                };
            }
            if space.len() == 1 {
                let w_support = split.w1.clone();
                self.blocks.push(Block {
                    rank_v,
                    rank_w: rank(&w_support, tol.rank)?,
                    block_operator: self.source.compress(v, &w_support),
                    v: v.clone(),
                    w: w_support,
                    top_eigenvalue: lambda,
                    irreducible_certified: true,
                    perron: gamma.scale_real(1.0 / gamma.norm_fro()),
                });
                return Ok(Flow::Done);
            }
        }
        Ok(Flow::Unknown(format!(
            "top eigenvalue {lambda:.6e} has multiplicity {} and {} random candidates all had full support",
            space.len(),
            attempts
        )))
    }

    /// PSD candidate eigenvector for the top eigenvalue.
    fn candidate(&mut self, space: &[CMatrix], l: &SuperOperator) -> Result<CMatrix> {
        let tol = self.tol;
        let gamma = if space.len() == 1 {
            let g = space[0].clone();
            let tr = g.trace().re;
            let flip = if tr.abs() > 1e-8 {
                tr < 0.0
            } else {
                let e = hermitian_eig(&g, f64::INFINITY)?;
                e.max_eigenvalue().abs() < e.min_eigenvalue().abs()
            };
            if flip {
                g.scale_real(-1.0)
            } else {
                g
            }
        } else {
            let mut x = CMatrix::zeros(space[0].rows(), space[0].cols());
            for h in space {
                let c: f64 = StandardNormal.sample(&mut self.rng);
                x += &h.scale_real(c);
            }
            let ex = hermitian_eig(&x.hermitian_part(), f64::INFINITY)?;
            let p = ex.projector(ex.top_modulus_cluster(tol.cluster));
            let mut g = CMatrix::zeros(p.rows(), p.cols());
            for h in space {
                g += &h.scale(h.inner(&p).conj());
            }
            let g = g.hermitian_part();
            let n = g.norm_fro();
            if n == 0.0 {
                g
            } else {
                g.scale_real(1.0 / n)
            }
        };
        let psd = gamma.norm_fro() > 0.0 && psd_check(&gamma, f64::INFINITY, tol.psd)?.psd;
        if psd {
            return Ok(gamma);
        }
        Ok(top_fixed_psd(l, tol)?.gamma)
    }
}

/// Orthonormal Hermitian basis (as `k × k` matrices) of the eigenspace spanned by `indices`.
///
/// Every eigenvector `W` is split as `(W + W*)/2` and `(W − W*)/(2i)`; both parts stay in the
/// eigenspace because the map commutes with `*`.
fn hermitian_eigenspace(
    eig: &crate::linalg::HermitianEigenSystem,
    indices: &[usize],
    k: usize,
) -> Vec<CMatrix> {
    let mut candidates = Vec::with_capacity(2 * indices.len());
    for &i in indices {
        let w = unvec_f(&eig.vector(i), k, k);
        let wa = w.adjoint();
        let re = (&w + &wa).scale_real(0.5);
        let im = (&w - &wa).scale(Complex64::new(0.0, -0.5));
        candidates.push(vec_f(&re));
        candidates.push(vec_f(&im));
    }
    orthonormalize(&candidates, 1e-6)
        .into_iter()
        .take(indices.len())
        .map(|v| unvec_f(&v, k, k).hermitian_part())
        .collect()
}

/// Weak irreducibility test on the Hermitian Schmidt decomposition `Σ λᵢ γᵢ ⊗ δᵢ`: the top
/// coefficient must be simple and every `γᵢ` (resp. `δᵢ`) must have its range inside
/// `range(γ₁)` (resp. `range(δ₁)`).
pub fn is_weakly_irreducible(a: &BipartiteOperator, tol: &Tolerances) -> Result<bool> {
    if a.norm_fro() == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let dec = hermitian_schmidt_decompose(a, tol)?;
    weak_irreducibility_holds(&dec, tol)
}

fn weak_irreducibility_holds(dec: &SchmidtDecomposition, tol: &Tolerances) -> Result<bool> {
    if dec.rank() <= 1 {
        return Ok(true);
    }
    let l1 = dec.lambdas[0];
    if dec.lambdas[1] >= l1 * (1.0 - tol.cluster) {
        return Ok(false);
    }
    let inclusion = 1e3 * tol.decomposition;
    let pg = range_projector(&dec.gammas[0], tol.rank)?;
    let pd = range_projector(&dec.deltas[0], tol.rank)?;
    for (g, d) in dec.gammas.iter().zip(&dec.deltas).skip(1) {
        let gout = (g - &(&pg * g)).norm_fro();
        let dout = (d - &(&pd * d)).norm_fro();
        if gout > inclusion * g.norm_fro() || dout > inclusion * d.norm_fro() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The decomposition `A = Σ γᵢ ⊗ δᵢ` with PSD, orthonormal `γᵢ` and `δᵢ`, available when the
/// spectrum of `F_A ∘ G_A` lies in `{0, 1}` and the map is completely reducible.
///
/// `γᵢ` is the Perron vector of block `i` and `δᵢ = G_A(γᵢ)`.
pub fn positive_schmidt_unique(a: &BipartiteOperator, tol: &Tolerances) -> Result<SchmidtDecomposition> {
    positive_schmidt_unique_seeded(a, tol, 0)
}

pub fn positive_schmidt_unique_seeded(
    a: &BipartiteOperator,
    tol: &Tolerances,
    seed: u64,
) -> Result<SchmidtDecomposition> {
    let check = psd_check(a.matrix(), tol.hermitian, tol.psd)?;
    if !check.psd {
        return Err(Error::NotPsdInput(check.min_eigenvalue));
    }
    let (k, m) = a.dims();
    let eig = fg_unchecked(a).eig()?;
    for &e in &eig.eigenvalues {
        if e.abs() > tol.spectrum_gap && (e - 1.0).abs() > tol.spectrum_gap {
            return Err(Error::SpectrumNotZeroOne(e));
        }
    }
    let report = decompose(a, tol, seed)?;
    match report.verdict {
        Verdict::CompletelyReducible => {}
        Verdict::NotCompletelyReducible => {
            let witness = report.witness.expect("negative verdict carries a witness");
            let cross_norm = witness.cross_norm;
            return Err(Error::NotCompletelyReducible {
                witness: Box::new(witness),
                cross_norm,
            });
        }
        Verdict::Indeterminate => {
            return Err(Error::Indeterminate(report.note.unwrap_or_default()));
        }
    }

    let herm = a.map_matrix(CMatrix::hermitian_part);
    let mut out = SchmidtDecomposition {
        k,
        m,
        lambdas: Vec::new(),
        gammas: Vec::new(),
        deltas: Vec::new(),
        hermitian: true,
    };
    let mut recon = CMatrix::zeros(k * m, k * m);
    for b in &report.blocks {
        let gamma = b.perron.clone();
        let g = apply_g(&herm, &gamma).hermitian_part();
        let lambda = g.norm_fro();
        let delta = g.scale_real(1.0 / lambda);
        recon += &kron(&gamma, &delta).scale_real(lambda);
        out.lambdas.push(lambda);
        out.gammas.push(gamma);
        out.deltas.push(delta);
    }

    let loose = tol.decomposition.sqrt();
    let residual = herm.matrix().dist_fro(&recon);
    if residual > loose * a.norm_fro().max(1.0) {
        return Err(Error::Indeterminate(format!(
            "positive factors reconstruct A only to {residual:.3e}"
        )));
    }
    for (i, (g, d)) in out.gammas.iter().zip(&out.deltas).enumerate() {
        if !psd_check(g, tol.hermitian, tol.psd)?.psd || !psd_check(d, tol.hermitian, tol.psd)?.psd {
            return Err(Error::Indeterminate(format!("factor pair {i} is not positive semidefinite")));
        }
        for (g2, d2) in out.gammas.iter().zip(&out.deltas).skip(i + 1) {
            let overlap = g.inner(g2).norm().max(d.inner(d2).norm());
            if overlap > loose {
                return Err(Error::NotOrthonormal(overlap));
            }
        }
    }
    Ok(out)
}
