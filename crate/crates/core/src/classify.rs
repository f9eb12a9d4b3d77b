//! Membership tests: PPT, SPC, invariance under realignment and the `P_σ` / `I_σ` families.
//!
//! Inputs that are not positive semidefinite are legal; every class flag is then `false` and the
//! PSD diagnostic says why. The three named flags are computed independently of one another.

use serde::{Deserialize, Serialize};

use crate::linalg::{psd_check, PsdCheck};
use crate::symmetry::{l_sigma, Perm4};
use crate::tensor::{partial_transpose, realign_square, BipartiteOperator, Slot};
use crate::{Error, Result, Tolerances};

/// Outcome of one class test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub holds: bool,
    /// Whether `A` itself passed the PSD test; when `false`, `holds` is `false` regardless.
    pub input_psd: bool,
    /// The test's own diagnostic (least eigenvalue or residual).
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub k: usize,
    pub m: usize,
    pub is_psd: bool,
    pub hermitian: bool,
    pub min_eig: f64,
    pub ppt: bool,
    /// Least eigenvalue of `A^{t₂}`.
    pub min_eig_pt: f64,
    /// `false` whenever `k ≠ m`.
    pub spc: bool,
    /// Least eigenvalue of `S(A^{t₂})`; absent when `k ≠ m`.
    pub spc_min_eig: Option<f64>,
    pub invariant_realign: bool,
    /// `‖A − S(A)‖_F`; absent when `k ≠ m`.
    pub invariance_residual: Option<f64>,
}

fn psd_of(a: &BipartiteOperator, tol: &Tolerances) -> Result<PsdCheck> {
    psd_check(a.matrix(), tol.hermitian, tol.psd)
}

/// `A^{t₂}` positive semidefinite.
pub fn is_ppt(a: &BipartiteOperator, tol: &Tolerances) -> Result<ClassCheck> {
    let base = psd_of(a, tol)?;
    let pt = psd_of(&partial_transpose(a, Slot::Second), tol)?;
    Ok(ClassCheck {
        holds: base.psd && pt.psd,
        input_psd: base.psd,
        value: pt.min_eigenvalue,
    })
}

/// `A` and `S(A^{t₂})` positive semidefinite.
pub fn is_spc(a: &BipartiteOperator, tol: &Tolerances) -> Result<ClassCheck> {
    if !a.is_square_dims() {
        return Err(Error::NonSquareDims(a.k(), a.m()));
    }
    let base = psd_of(a, tol)?;
    let image = realign_square(&partial_transpose(a, Slot::Second))?;
    let img = psd_of(&image, tol)?;
    Ok(ClassCheck {
        holds: base.psd && img.psd,
        input_psd: base.psd,
        value: img.min_eigenvalue,
    })
}

/// `A` PSD and `‖A − S(A)‖_F ≤ tol·(1 + ‖A‖_F)`.
pub fn is_invariant_realign(a: &BipartiteOperator, tol: &Tolerances) -> Result<ClassCheck> {
    if !a.is_square_dims() {
        return Err(Error::NonSquareDims(a.k(), a.m()));
    }
    let base = psd_of(a, tol)?;
    let residual = a.dist_fro(&realign_square(a)?);
    Ok(ClassCheck {
        holds: base.psd && residual <= tol.decomposition * (1.0 + a.norm_fro()),
        input_psd: base.psd,
        value: residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub sigma: String,
    pub in_p_sigma: bool,
    pub in_i_sigma: bool,
    pub input_psd: bool,
    /// Least eigenvalue of the Hermitian part of `L_σ(A)`.
    pub image_min_eig: f64,
    pub image_hermitian: bool,
    /// `‖A − L_σ(A)‖_F`.
    pub fixed_residual: f64,
}

/// `A ∈ P_σ` iff `A` and `L_σ(A)` are PSD; `A ∈ I_σ` iff `A` is PSD and `A = L_σ(A)`.
pub fn membership(a: &BipartiteOperator, sigma: &Perm4, tol: &Tolerances) -> Result<MembershipResult> {
    let image = l_sigma(sigma, a)?;
    let base = psd_of(a, tol)?;
    let img = psd_of(&image, tol)?;
    let fixed_residual = a.dist_fro(&image);
    Ok(MembershipResult {
        sigma: sigma.to_string(),
        in_p_sigma: base.psd && img.psd,
        in_i_sigma: base.psd && fixed_residual <= tol.decomposition * (1.0 + a.norm_fro()),
        input_psd: base.psd,
        image_min_eig: img.min_eigenvalue,
        image_hermitian: img.hermitian,
        fixed_residual,
    })
}

pub fn classify(a: &BipartiteOperator, tol: &Tolerances) -> Result<ClassReport> {
    let base = psd_of(a, tol)?;
    let ppt = is_ppt(a, tol)?;
    let (spc, spc_min_eig, inv, invariance_residual) = if a.is_square_dims() {
        let s = is_spc(a, tol)?;
        let i = is_invariant_realign(a, tol)?;
        (s.holds, Some(s.value), i.holds, Some(i.value))
    } else {
        (false, None, false, None)
    };
    Ok(ClassReport {
        k: a.k(),
        m: a.m(),
        is_psd: base.psd,
        hermitian: base.hermitian,
        min_eig: base.min_eigenvalue,
        ppt: ppt.holds,
        min_eig_pt: ppt.value,
        spc,
        spc_min_eig,
        invariant_realign: inv,
        invariance_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::tensor::{flip, uut};

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn invariant_not_ppt(k: usize) -> BipartiteOperator {
        BipartiteOperator::identity(k, k).add(&uut(k)).sub(&flip(k))
    }

    #[test]
    fn example_not_ppt_but_invariant() {
        let a = invariant_not_ppt(3);
        let r = classify(&a, &t()).unwrap();
        assert!(r.is_psd);
        assert!(!r.ppt);
        assert!((r.min_eig_pt + 1.0).abs() < 1e-10);
        assert!(r.invariant_realign);
        assert!(!r.spc);
    }

    #[test]
    fn identity_classes() {
        let id = BipartiteOperator::identity(2, 2);
        assert!(is_ppt(&id, &t()).unwrap().holds);
        assert!(!is_invariant_realign(&id, &t()).unwrap().holds);
        assert!(is_invariant_realign(&id.add(&uut(2)), &t()).unwrap().holds);
    }

    #[test]
    fn uut_is_not_spc() {
        assert!(!is_spc(&uut(3), &t()).unwrap().holds);
    }

    #[test]
    fn gamma_tensor_gamma_is_spc() {
        let x = CMatrix::from_fn(3, 3, |r, s| num_complex::Complex64::new((r + s) as f64 * 0.3, r as f64 - s as f64));
        let g = &x * &x.adjoint();
        let g = g.scale_real(1.0 / g.norm_fro());
        let a = BipartiteOperator::product(&g, &g).unwrap();
        assert!(is_spc(&a, &t()).unwrap().holds);
    }

    #[test]
    fn non_psd_input_is_false_everywhere() {
        let r = classify(&flip(2), &t()).unwrap();
        assert!(!r.is_psd && !r.ppt && !r.spc && !r.invariant_realign);
        assert!((r.min_eig + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rectangular_dims() {
        let a = BipartiteOperator::identity(2, 3);
        assert!(matches!(is_spc(&a, &t()), Err(Error::NonSquareDims(2, 3))));
        let r = classify(&a, &t()).unwrap();
        assert!(r.ppt && r.spc_min_eig.is_none());
    }

    #[test]
    fn membership_examples() {
        let p34: Perm4 = "(34)".parse().unwrap();
        let id = BipartiteOperator::identity(2, 2);
        let r = membership(&id, &p34, &t()).unwrap();
        assert!(r.in_p_sigma && r.in_i_sigma);
        let p23: Perm4 = "(23)".parse().unwrap();
        assert!(membership(&uut(2), &p23, &t()).unwrap().in_p_sigma);
        let e = Perm4::identity();
        let r = membership(&uut(3), &e, &t()).unwrap();
        assert!(r.in_p_sigma && r.in_i_sigma);
    }
}
