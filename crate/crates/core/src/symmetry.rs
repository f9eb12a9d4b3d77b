//! The action of `S₄` on `M_k ⊗ M_k` by slot permutation,
//! `L_σ(a₁a₂ᵗ ⊗ a₃a₄ᵗ) = a_{σ(1)}a_{σ(2)}ᵗ ⊗ a_{σ(3)}a_{σ(4)}ᵗ`, and the dictionary expressing each
//! `L_σ` through transpose, partial transpose, realignment and the flip.
//!
//! Composition law: `L_σ ∘ L_τ = L_{τ∘σ}`, where `(τ∘σ)(x) = τ(σ(x))`. The action is a right
//! action; the closure tests check this on random operators.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::generators::gaussian_matrix;
use crate::linalg::CMatrix;
use crate::tensor::{flip, partial_transpose, realign_square, BipartiteOperator, Slot};
use crate::{Error, Result};

/// A permutation of `{1, 2, 3, 4}` stored by its images `(σ(1), σ(2), σ(3), σ(4))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4 {
    images: [u8; 4],
}

impl Perm4 {
    pub fn new(images: [u8; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &x in &images {
            if !(1..=4).contains(&x) || seen[(x - 1) as usize] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a permutation of 1..4")));
            }
            seen[(x - 1) as usize] = true;
        }
        Ok(Self { images })
    }

    pub const fn identity() -> Self {
        Self { images: [1, 2, 3, 4] }
    }

    pub fn images(&self) -> [u8; 4] {
        self.images
    }

    /// `σ(x)` for `x ∈ 1..=4`.
    pub fn apply(&self, x: u8) -> u8 {
        self.images[(x - 1) as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        let mut images = [0; 4];
        for (s, img) in images.iter_mut().enumerate() {
            *img = self.apply(other.apply(s as u8 + 1));
        }
        Perm4 { images }
    }

    pub fn inverse(&self) -> Perm4 {
        let mut images = [0; 4];
        for s in 0..4 {
            images[(self.images[s] - 1) as usize] = s as u8 + 1;
        }
        Perm4 { images }
    }

    /// All 24 permutations in lexicographic order of their images.
    pub fn all() -> Vec<Perm4> {
        let mut out = Vec::with_capacity(24);
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                for c in 1..=4u8 {
                    for d in 1..=4u8 {
                        if let Ok(p) = Perm4::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Disjoint cycles of length ≥ 2, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let mut seen = [false; 4];
        let mut out = Vec::new();
        for start in 1..=4u8 {
            if seen[(start - 1) as usize] {
                continue;
            }
            let mut cycle = vec![start];
            seen[(start - 1) as usize] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[(x - 1) as usize] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for c in cycles {
            write!(f, "(")?;
            for x in c {
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Accepts `id`, `e`, `()`, cycle notation such as `(243)` or `(12)(34)`, and image lists
/// `[2,1,4,3]` or `2143`.
impl FromStr for Perm4 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() || t == "id" || t == "e" || t == "()" {
            return Ok(Perm4::identity());
        }
        let bad = || Error::InvalidPermutation(format!("cannot parse `{s}`"));
        if t.starts_with('(') {
            let mut p = Perm4::identity();
            let mut rest = t.as_str();
            while !rest.is_empty() {
                let body_end = rest.find(')').ok_or_else(bad)?;
                if !rest.starts_with('(') {
                    return Err(bad());
                }
                let body = &rest[1..body_end];
                let elems: Vec<u8> = body
                    .split(',')
                    .flat_map(|chunk| chunk.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect::<Vec<_>>())
                    .collect::<Option<Vec<u8>>>()
                    .ok_or_else(bad)?;
                let mut images = [1, 2, 3, 4];
                for (i, &x) in elems.iter().enumerate() {
                    if !(1..=4).contains(&x) {
                        return Err(bad());
                    }
                    images[(x - 1) as usize] = elems[(i + 1) % elems.len()];
                }
                let cycle = Perm4::new(images).map_err(|_| bad())?;
                if elems.iter().collect::<std::collections::HashSet<_>>().len() != elems.len() {
                    return Err(bad());
                }
                // Cycles are written right to left: (ab)(cd) applies (cd) first.
                p = p.compose(&cycle);
                rest = &rest[body_end + 1..];
            }
            return Ok(p);
        }
        let digits: Vec<u8> = t
            .trim_start_matches('[')
            .trim_end_matches(']')
            .chars()
            .filter(|c| *c != ',')
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<Vec<u8>>>()
            .ok_or_else(bad)?;
        if digits.len() != 4 {
            return Err(bad());
        }
        Perm4::new([digits[0], digits[1], digits[2], digits[3]])
    }
}

impl Serialize for Perm4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Perm4 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `L_σ(A)` as a permutation of the slots of `T[i₁, i₂, i₃, i₄] = A[(i₁, i₃), (i₂, i₄)]`:
/// `L_σ(A)[i] = T[j]` with `j_{σ(s)} = i_s`.
pub fn l_sigma(sigma: &Perm4, a: &BipartiteOperator) -> Result<BipartiteOperator> {
    if !a.is_square_dims() {
        return Err(Error::NonSquareDims(a.k(), a.m()));
    }
    let k = a.k();
    let src = a.matrix();
    let mut out = CMatrix::zeros(k * k, k * k);
    let slot: [usize; 4] = std::array::from_fn(|s| (sigma.images[s] - 1) as usize);
    let mut j = [0usize; 4];
    for i1 in 0..k {
        for i2 in 0..k {
            for i3 in 0..k {
                for i4 in 0..k {
                    let i = [i1, i2, i3, i4];
                    for s in 0..4 {
                        j[slot[s]] = i[s];
                    }
                    out[(i1 * k + i3, i2 * k + i4)] = src[(j[0] * k + j[2], j[1] * k + j[3])];
                }
            }
        }
    }
    BipartiteOperator::new(k, k, out)
}

/// The six coset representatives of `⟨μ, ρ⟩` in `S₄`, as maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inner {
    /// `A`
    Identity,
    /// `A^{t₂}`
    PartialTranspose,
    /// `S(A)`
    Realign,
    /// `S(A^{t₂})`
    RealignOfPartialTranspose,
    /// `S(A)^{t₂}`
    PartialTransposeOfRealign,
    /// `AT`
    FlipRight,
}

/// Elements of the Klein subgroup `{id, μ, ρ, μρ}` with `μ = (12)(34)`, `ρ = (13)(24)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outer {
    Identity,
    /// `X ↦ Xᵗ`
    Transpose,
    /// `X ↦ TXT`
    Swap,
    /// `X ↦ (TXT)ᵗ`
    TransposeSwap,
}

impl Inner {
    pub const ALL: [Inner; 6] = [
        Inner::Identity,
        Inner::PartialTranspose,
        Inner::Realign,
        Inner::RealignOfPartialTranspose,
        Inner::PartialTransposeOfRealign,
        Inner::FlipRight,
    ];

    pub fn apply(self, a: &BipartiteOperator) -> Result<BipartiteOperator> {
        Ok(match self {
            Inner::Identity => a.clone(),
            Inner::PartialTranspose => partial_transpose(a, Slot::Second),
            Inner::Realign => realign_square(a)?,
            Inner::RealignOfPartialTranspose => realign_square(&partial_transpose(a, Slot::Second))?,
            Inner::PartialTransposeOfRealign => partial_transpose(&realign_square(a)?, Slot::Second),
            Inner::FlipRight => {
                let t = flip(a.k());
                a.map_matrix(|x| x * t.matrix())
            }
        })
    }

    pub fn formula(self) -> &'static str {
        match self {
            Inner::Identity => "A",
            Inner::PartialTranspose => "A^t2",
            Inner::Realign => "S(A)",
            Inner::RealignOfPartialTranspose => "S(A^t2)",
            Inner::PartialTransposeOfRealign => "S(A)^t2",
            Inner::FlipRight => "AT",
        }
    }

    /// The coset representative this map equals.
    pub fn representative(self) -> Perm4 {
        let images = match self {
            Inner::Identity => [1, 2, 3, 4],
            Inner::PartialTranspose => [1, 2, 4, 3],
            Inner::Realign => [1, 3, 2, 4],
            Inner::RealignOfPartialTranspose => [1, 4, 2, 3],
            Inner::PartialTransposeOfRealign => [1, 3, 4, 2],
            Inner::FlipRight => [1, 4, 3, 2],
        };
        Perm4 { images }
    }
}

impl Outer {
    pub const ALL: [Outer; 4] = [Outer::Identity, Outer::Transpose, Outer::Swap, Outer::TransposeSwap];

    pub fn apply(self, a: &BipartiteOperator) -> BipartiteOperator {
        let swap = |x: &BipartiteOperator| {
            let t = flip(x.k());
            x.map_matrix(|m| &(t.matrix() * m) * t.matrix())
        };
        match self {
            Outer::Identity => a.clone(),
            Outer::Transpose => a.transpose(),
            Outer::Swap => swap(a),
            Outer::TransposeSwap => swap(a).transpose(),
        }
    }

    pub fn wrap(self, inner: &str) -> String {
        match self {
            Outer::Identity => inner.to_string(),
            Outer::Transpose => format!("({inner})^t"),
            Outer::Swap => format!("T({inner})T"),
            Outer::TransposeSwap => format!("(T({inner})T)^t"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEntry {
    pub sigma: Perm4,
    pub outer: Outer,
    pub inner: Inner,
    pub formula: String,
    /// Largest `‖L_σ(A) − outer(inner(A))‖_F / ‖A‖_F` over the sample operators.
    pub max_error: f64,
}

/// Matches each `σ ∈ S₄` against the 24 compositions `outer ∘ inner` on `samples` seeded random
/// operators of `M_k ⊗ M_k`; exactly one composition agrees to within `1e-12` relative error.
pub fn sigma_dictionary(k: usize, samples: usize, seed: u64) -> Result<Vec<SigmaEntry>> {
    if k < 2 {
        return Err(Error::BadDimension(format!("the dictionary needs k ≥ 2, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops: Vec<BipartiteOperator> = (0..samples.max(1))
        .map(|_| BipartiteOperator::new(k, k, gaussian_matrix(k * k, k * k, &mut rng)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(24);
    for sigma in Perm4::all() {
        let images: Vec<BipartiteOperator> =
            ops.iter().map(|a| l_sigma(&sigma, a)).collect::<Result<_>>()?;
        let mut found = None;
        'search: for outer in Outer::ALL {
            for inner in Inner::ALL {
                let err = composition_error(outer, inner, &ops, &images)?;
                if err <= 1e-12 {
                    found = Some((outer, inner, err));
                    break 'search;
                }
            }
        }
        let (outer, inner, max_error) = found.ok_or_else(|| {
            Error::Indeterminate(format!("no composition matches L_{sigma}"))
        })?;
        out.push(SigmaEntry {
            sigma,
            outer,
            inner,
            formula: outer.wrap(inner.formula()),
            max_error,
        });
    }
    Ok(out)
}

/// Largest relative deviation of `outer ∘ inner` from the given images; stops at the first
/// sample above `1e-12`.
fn composition_error(
    outer: Outer,
    inner: Inner,
    ops: &[BipartiteOperator],
    images: &[BipartiteOperator],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, img) in ops.iter().zip(images) {
        let cand = outer.apply(&inner.apply(a)?);
        worst = worst.max(cand.dist_fro(img) / a.norm_fro());
        if worst > 1e-12 {
            break;
        }
    }
    Ok(worst)
}
