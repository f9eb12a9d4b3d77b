//! One-sided (Hestenes) Jacobi singular value decomposition.

use num_complex::Complex64;

use super::eigen::{jacobi_rotation, orthonormalize};
use super::matrix::{vdot, vnorm, CMatrix, ONE, ZERO};
use crate::{Error, Result};

const ORTHOGONALITY_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 100;

/// Thin SVD `M = Σ sᵢ xᵢ yᵢ*` with `min(rows, cols)` terms, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// Left singular vectors as columns (`rows × r`).
    pub left: CMatrix,
    /// Right singular vectors as columns (`cols × r`).
    pub right: CMatrix,
}

impl Svd {
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * smax && s > 0.0)
            .count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.left.rows(), self.right.rows());
        for (i, &s) in self.singular_values.iter().enumerate() {
            let x = self.left.col(i);
            let y = self.right.col(i);
            for r in 0..out.rows() {
                let xr = x[r] * s;
                for c in 0..out.cols() {
                    out[(r, c)] += xr * y[c].conj();
                }
            }
        }
        out
    }
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() < m.cols() {
        let t = tall_svd(&m.adjoint())?;
        return Ok(Svd {
            singular_values: t.singular_values,
            left: t.right,
            right: t.left,
        });
    }
    tall_svd(m)
}

fn tall_svd(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let mut u: Vec<Vec<Complex64>> = (0..cols).map(|c| m.col(c)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..cols)
        .map(|c| (0..cols).map(|r| if r == c { ONE } else { ZERO }).collect())
        .collect();
    let scale = m.norm_fro();
    let floor = (1e-17 * scale).powi(2);

    let mut converged = cols <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        sweep += 1;
        let mut rotated = false;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let alpha = vnorm(&u[p]).powi(2);
                let beta = vnorm(&u[q]).powi(2);
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma = vdot(&u[p], &u[q]);
                if gamma.norm() <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                rotate_pair(&mut u, p, q, c, s, phase);
                rotate_pair(&mut v, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "one-sided Jacobi SVD exceeded {MAX_SWEEPS} sweeps ({rows}x{cols})"
        )));
    }

    let mut sigma: Vec<f64> = u.iter().map(|col| vnorm(col)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            left_cols.push(u[j].iter().map(|z| z * inv).collect());
        } else {
            left_cols.push(vec![ZERO; rows]);
            missing.push(slot);
        }
    }
    if !missing.is_empty() {
        // Exact zero columns carry no direction; complete with an orthonormal complement.
        let mut candidates: Vec<Vec<Complex64>> = left_cols
            .iter()
            .enumerate()
            .filter(|(i, _)| !missing.contains(i))
            .map(|(_, c)| c.clone())
            .collect();
        let kept = candidates.len();
        for r in 0..rows {
            let mut e = vec![ZERO; rows];
            e[r] = ONE;
            candidates.push(e);
        }
        let completed = orthonormalize(&candidates, 1e-8);
        for (slot, fill) in missing.iter().zip(completed.into_iter().skip(kept)) {
            left_cols[*slot] = fill;
        }
    }

    let mut left = CMatrix::zeros(rows, cols);
    let mut right = CMatrix::zeros(cols, cols);
    for (slot, &j) in order.iter().enumerate() {
        left.set_col(slot, &left_cols[slot]);
        right.set_col(slot, &v[j]);
    }
    sigma = order.iter().map(|&j| sigma[j]).collect();
    Ok(Svd {
        singular_values: sigma,
        left,
        right,
    })
}

fn rotate_pair(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = a * c - b * s * phase;
        *y = a * s + b * c * phase;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_singular_values() {
        let s = svd(&CMatrix::identity(3)).unwrap();
        assert_eq!(s.singular_values.len(), 3);
        for v in &s.singular_values {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_outer_product() {
        // ‖a‖ = 2, ‖b‖ = 3.
        let a = vec![Complex64::new(2.0, 0.0), ZERO];
        let b = vec![ZERO, Complex64::new(0.0, 3.0), ZERO];
        let m = CMatrix::outer(&a, &b);
        let s = svd(&m).unwrap();
        assert!((s.singular_values[0] - 6.0).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
        assert_eq!(s.rank(1e-12), 1);
        assert!(s.reconstruct().dist_fro(&m) < 1e-13);
        // completed left vectors still orthonormal
        let g = &s.left.adjoint() * &s.left;
        assert!(g.dist_fro(&CMatrix::identity(2)) < 1e-13);
    }

    #[test]
    fn zero_matrix() {
        let s = svd(&CMatrix::zeros(3, 2)).unwrap();
        assert!(s.singular_values.iter().all(|&v| v == 0.0));
        let g = &s.left.adjoint() * &s.left;
        assert!(g.dist_fro(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn real_input_stays_real() {
        let m = CMatrix::from_fn(4, 3, |r, c| Complex64::new((r as f64 + 1.0) * (c as f64 - 1.3) + (r * c) as f64, 0.0));
        let s = svd(&m).unwrap();
        assert!(s.left.as_slice().iter().all(|z| z.im == 0.0));
        assert!(s.right.as_slice().iter().all(|z| z.im == 0.0));
        assert!(s.reconstruct().dist_fro(&m) < 1e-12 * m.norm_fro());
    }
}
