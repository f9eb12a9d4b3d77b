//! Human-readable renderings; `--format json` is the stable interface.

use std::fmt::Write;

use crmaps_core::classify::ClassReport;
use crmaps_core::mub::{Basis, MubReport, MubSet};
use crmaps_core::reducibility::ReducibilityReport;
use crmaps_core::schmidt::SchmidtDecomposition;
use crmaps_core::symmetry::SigmaEntry;
use crmaps_core::{BipartiteOperator, CMatrix, Complex64};

fn z(c: Complex64) -> String {
    let re = if c.re.abs() < 5e-13 { 0.0 } else { c.re };
    let im = if c.im.abs() < 5e-13 { 0.0 } else { c.im };
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

fn matrix(out: &mut String, m: &CMatrix, indent: &str) {
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| format!("{:>20}", z(m[(r, c)]))).collect();
        let _ = writeln!(out, "{indent}{}", row.join(" "));
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"))
}

pub fn class_report(r: &ClassReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dims               ({}, {})", r.k, r.m);
    let _ = writeln!(s, "hermitian          {}", r.hermitian);
    let _ = writeln!(s, "psd                {}  (λ_min {:.6e})", r.is_psd, r.min_eig);
    let _ = writeln!(s, "ppt                {}  (λ_min(A^t2) {:.6e})", r.ppt, r.min_eig_pt);
    let _ = writeln!(s, "spc                {}  (λ_min(S(A^t2)) {})", r.spc, opt(r.spc_min_eig));
    let _ = writeln!(s, "invariant (A=S(A)) {}  (‖A−S(A)‖ {})", r.invariant_realign, opt(r.invariance_residual));
    s
}

pub fn reducibility(r: &ReducibilityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dims          ({}, {})", r.k, r.m);
    let _ = writeln!(s, "verdict       {:?}", r.verdict);
    let _ = writeln!(s, "λ_max(F∘G)    {:.6e} (multiplicity {})", r.top_eigenvalue, r.multiplicity_top);
    let _ = writeln!(s, "blocks        {}", r.blocks.len());
    let _ = writeln!(s, "residual      {:.3e} (‖A‖ = {:.6e})", r.residual_norm, r.norm_a);
    let _ = writeln!(s, "orthogonality {:.3e}", r.orthogonality_defect);
    for (i, b) in r.blocks.iter().enumerate() {
        let _ = writeln!(
            s,
            "  block {i}: rank V = {}, rank W = {}, λ_max = {:.6e}, certified irreducible = {}",
            b.rank_v, b.rank_w, b.top_eigenvalue, b.irreducible_certified
        );
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(s, "witness       eigenvalue {:.6e}, cross norm {:.6e}", w.eigenvalue, w.cross_norm);
        matrix(&mut s, &w.gamma, "    ");
    }
    if let Some(n) = &r.note {
        let _ = writeln!(s, "note          {n}");
    }
    s
}

pub fn schmidt(d: &SchmidtDecomposition) -> String {
    let mut s = String::new();
    let kind = if d.hermitian { "Hermitian " } else { "" };
    let _ = writeln!(s, "{kind}Schmidt rank {} on ({}, {})", d.lambdas.len(), d.k, d.m);
    for (i, ((l, g), h)) in d.lambdas.iter().zip(&d.gammas).zip(&d.deltas).enumerate() {
        let _ = writeln!(s, "λ_{i} = {l:.12e}");
        let _ = writeln!(s, "  γ_{i}:");
        matrix(&mut s, g, "    ");
        let _ = writeln!(s, "  δ_{i}:");
        matrix(&mut s, h, "    ");
    }
    s
}

pub fn operator(a: &BipartiteOperator) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "M_{} ⊗ M_{}", a.k(), a.m());
    matrix(&mut s, a.matrix(), "  ");
    s
}

pub fn sigma_table(t: &[SigmaEntry]) -> String {
    let mut s = String::new();
    for e in t {
        let _ = writeln!(s, "{:<12} {:<24} (err {:.1e})", e.sigma.to_string(), e.formula, e.max_error);
    }
    s
}

pub fn basis(b: &Basis) -> String {
    let mut s = String::new();
    for (i, v) in b.vectors.iter().enumerate() {
        let entries: Vec<String> = v.iter().map(|&c| z(c)).collect();
        let _ = writeln!(s, "v_{i} = ({})", entries.join(", "));
    }
    s
}

pub fn mub_set(ms: &MubSet) -> String {
    let mut s = String::new();
    for (i, b) in ms.bases.iter().enumerate() {
        let _ = writeln!(s, "basis {i}:");
        s.push_str(&basis(b));
    }
    s
}

pub fn mub_report(r: &MubReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} bases of ℂ^{}: {}", r.basis_count, r.dim, if r.valid { "valid" } else { "INVALID" });
    let worst = r.orthonormality.iter().cloned().fold(0.0, f64::max);
    let _ = writeln!(s, "orthonormality defect {worst:.3e}");
    for p in &r.pairs {
        let _ = writeln!(
            s,
            "  ({}, {}): overlap dev {:.3e}, operator dev {:.3e}, unbiased {}",
            p.first, p.second, p.overlap_deviation, p.operator_deviation, p.unbiased
        );
    }
    if let Some(x) = r.resolution_residual {
        let _ = writeln!(s, "resolution residual {x:.3e}");
    }
    for f in &r.failures {
        let _ = writeln!(s, "failure: {f}");
    }
    s
}
