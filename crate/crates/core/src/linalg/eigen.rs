//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{CMatrix, ONE, ZERO};
use crate::{Error, Result};

/// Off-diagonal Frobenius mass at which a sweep is considered converged, relative to `‖M‖_F`.
const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Entries this small relative to `‖M‖_F` are not worth a rotation.
const NEGLIGIBLE: f64 = 1e-17;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching unitary eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.col(i)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `Σ λᵢ vᵢ vᵢ*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.vector(i);
            for r in 0..n {
                let vr = v[r] * lambda;
                for c in 0..n {
                    out[(r, c)] += vr * v[c].conj();
                }
            }
        }
        out
    }

    /// Orthogonal projector onto the span of the eigenvectors selected by `indices`.
    pub fn projector(&self, indices: impl IntoIterator<Item = usize>) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in indices {
            let v = self.vector(i);
            out += &CMatrix::outer(&v, &v);
        }
        out
    }

    /// Indices (ascending order of eigenvalue) of the cluster containing the largest eigenvalue.
    /// Neighbouring eigenvalues closer than `rel_gap · max(|λ|)` belong to the same cluster.
    pub fn top_cluster(&self, rel_gap: f64) -> Vec<usize> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let scale = self
            .eigenvalues
            .iter()
            .fold(0.0_f64, |m, l| m.max(l.abs()));
        let gap = rel_gap * scale;
        let mut start = n - 1;
        while start > 0 && self.eigenvalues[start] - self.eigenvalues[start - 1] <= gap {
            start -= 1;
        }
        (start..n).collect()
    }

    /// Indices of the cluster whose eigenvalue has the largest modulus.
    pub fn top_modulus_cluster(&self, rel_gap: f64) -> Vec<usize> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let lo = self.eigenvalues[0];
        let hi = self.eigenvalues[n - 1];
        let scale = lo.abs().max(hi.abs());
        let gap = rel_gap * scale;
        if hi.abs() >= lo.abs() {
            self.top_cluster(rel_gap)
        } else {
            let mut end = 0;
            while end + 1 < n && self.eigenvalues[end + 1] - self.eigenvalues[end] <= gap {
                end += 1;
            }
            (0..=end).collect()
        }
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// `tol` is the relative hermiticity tolerance: the input is rejected when `‖M − M*‖_F > tol·‖M‖_F`.
pub fn hermitian_eig(m: &CMatrix, tol: f64) -> Result<HermitianEigenSystem> {
    if !m.is_square() {
        return Err(Error::NonSquareInput(m.rows(), m.cols()));
    }
    let scale = m.norm_fro();
    let defect = m.hermiticity_defect();
    if defect > tol * scale {
        return Err(Error::NonHermitianInput {
            defect,
            norm: scale,
        });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        if sweep == MAX_SWEEPS {
            break;
        }
        sweep += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= NEGLIGIBLE * scale {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate(&mut a, &mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "Jacobi eigensolver exceeded {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Rotation `(c, s, e^{-iφ})` annihilating the `(p, q)` entry of the Hermitian block
/// `[[app, apq], [conj(apq), aqq]]`. The unitary acts on columns as
/// `col_p ← c·col_p − s·e^{-iφ}·col_q`, `col_q ← s·col_p + c·e^{-iφ}·col_q`.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let mag = apq.norm();
    // conj(apq)/|apq| keeps real inputs exactly real.
    let phase = apq.conj() / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let n = a.rows();
    let cc = Complex64::new(c, 0.0);
    let ss = Complex64::new(s, 0.0);
    // A ← A U
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * cc - arq * ss * phase;
        a[(r, q)] = arp * ss + arq * cc * phase;
    }
    // A ← U* A
    let phase_c = phase.conj();
    for r in 0..n {
        let apr = a[(p, r)];
        let aqr = a[(q, r)];
        a[(p, r)] = apr * cc - aqr * ss * phase_c;
        a[(q, r)] = apr * ss + aqr * cc * phase_c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * cc - vrq * ss * phase;
        v[(r, q)] = vrp * ss + vrq * cc * phase;
    }
}

/// Orthonormalizes the columns of `basis` (modified Gram-Schmidt, two passes) and drops
/// columns whose residual norm falls below `drop_tol`.
pub fn orthonormalize(columns: &[Vec<Complex64>], drop_tol: f64) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for col in columns {
        let mut w = col.clone();
        let start = super::matrix::vnorm(&w);
        if start == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for e in &out {
                let proj = super::matrix::vdot(e, &w);
                for (wi, ei) in w.iter_mut().zip(e) {
                    *wi -= proj * ei;
                }
            }
        }
        let norm = super::matrix::vnorm(&w);
        if norm > drop_tol * start.max(1.0) {
            let inv = ONE / norm;
            out.push(w.into_iter().map(|z| z * inv).collect());
        }
    }
    out
}
