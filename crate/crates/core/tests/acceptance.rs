//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.
//!
//! Run with `cargo test -p crmaps-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use crmaps_core::classify::{is_invariant_realign, is_ppt, is_spc, membership};
use crmaps_core::generators::{
    counterexample, gaussian_matrix, gaussian_vector, invariant_family, random_basis, random_invariant,
    random_separable, random_spc, Counterexample,
};
use crmaps_core::linalg::{psd_check, CMatrix};
use crmaps_core::mub::{a_alpha, aligned_deviation, complete, generate_prime, verify_set, Basis};
use crmaps_core::reducibility::{decompose, is_weakly_irreducible, positive_schmidt_unique, Verdict};
use crmaps_core::schmidt::schmidt_decompose;
use crmaps_core::superop::fg_of;
use crmaps_core::symmetry::{Inner, Perm4};
use crmaps_core::tensor::{
    flip, kron, partial_transpose, realign_square, unvec_f, uut, BipartiteOperator, Slot,
};
use crmaps_core::{Complex64, Error, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn tol() -> Tolerances {
    Tolerances::default()
}

fn op(k: usize, m: usize, x: CMatrix) -> BipartiteOperator {
    BipartiteOperator::new(k, m, x).unwrap()
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.dist_fro(b) / b.norm_fro().max(1.0)
}

/// `uuᵗ` written out entry by entry, independent of the library constructor.
fn uut_oracle(k: usize) -> CMatrix {
    CMatrix::from_fn(k * k, k * k, |r, c| {
        if r % (k + 1) == 0 && c % (k + 1) == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn c1_realignment_algebra() -> Outcome {
    let k = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let t = flip(k);
    let tm = t.matrix();
    let s = |a: &BipartiteOperator| realign_square(a).unwrap();
    let t2 = |a: &BipartiteOperator| partial_transpose(a, Slot::Second);
    let mut worst = [0.0f64; 8];
    for _ in 0..200 {
        let a = op(k, k, gaussian_matrix(9, 9, &mut rng));
        let sa = s(&a);

        let vs: Vec<_> = (0..2).map(|_| gaussian_vector(9, &mut rng)).collect();
        let ws: Vec<_> = (0..2).map(|_| gaussian_vector(9, &mut rng)).collect();
        let mut sum_vw = CMatrix::zeros(9, 9);
        let mut sum_ff = CMatrix::zeros(9, 9);
        for (v, w) in vs.iter().zip(&ws) {
            sum_vw += &CMatrix::from_fn(9, 9, |r, c| v[r] * w[c]);
            sum_ff += &kron(&unvec_f(v, k, k), &unvec_f(w, k, k));
        }
        worst[0] = worst[0].max(rel(s(&op(k, k, sum_vw)).matrix(), &sum_ff));

        worst[1] = worst[1].max(rel(s(&sa).matrix(), a.matrix()));

        let [v, w, m, n] = [0, 1, 2, 3].map(|_| gaussian_matrix(k, k, &mut rng));
        let lhs = s(&op(k, k, &(&kron(&v, &w) * a.matrix()) * &kron(&m, &n)));
        let rhs = &(&kron(&v, &m.transpose()) * sa.matrix()) * &kron(&w.transpose(), &n);
        worst[2] = worst[2].max(rel(lhs.matrix(), &rhs));

        let at = op(k, k, a.matrix() * tm);
        worst[3] = worst[3].max(rel(&(s(&at).matrix() * tm), t2(&a).matrix()));
        worst[4] = worst[4].max(rel(s(&t2(&a)).matrix(), &(sa.matrix() * tm)));
        worst[5] = worst[5].max(rel(s(&at).matrix(), t2(&sa).matrix()));
        let tat = op(k, k, &(tm * a.matrix()) * tm);
        worst[6] = worst[6].max(rel(s(&tat).matrix(), &sa.matrix().transpose()));
        worst[7] = worst[7].max(rel(s(&a.transpose()).matrix(), &(&(tm * sa.matrix()) * tm)));
    }
    let id_err = s(&BipartiteOperator::identity(k, k)).matrix().dist_fro(&uut_oracle(k));
    let flip_err = s(&t).dist_fro(&t);
    let ok = worst.iter().all(|&e| e <= 1e-12) && id_err <= 1e-14 && flip_err <= 1e-14;
    let list: Vec<String> = worst.iter().map(|e| format!("{e:.1e}")).collect();
    (
        ok,
        format!(
            "eight realignment identities, worst rel err [{}]; S(Id⊗Id)−uuᵗ {id_err:.1e}; S(T)−T {flip_err:.1e}",
            list.join(", ")
        ),
    )
}

/// Decomposition checks shared by criteria 2 and 3.
fn decomposition_suite(label: &str, fixtures: &[BipartiteOperator]) -> (bool, String) {
    let t = tol();
    let mut worst_resid: f64 = 0.0;
    let mut failures = Vec::new();
    let mut total_blocks = 0;
    for (i, a) in fixtures.iter().enumerate() {
        let r = match decompose(a, &t, i as u64) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{label}#{i}: {e}"));
                continue;
            }
        };
        if !r.completely_reducible {
            failures.push(format!("{label}#{i}: verdict {:?} {:?}", r.verdict, r.note));
            continue;
        }
        let rel_resid = r.residual_norm / r.norm_a;
        worst_resid = worst_resid.max(rel_resid);
        if rel_resid > 1e-8 {
            failures.push(format!("{label}#{i}: residual {rel_resid:.2e}"));
        }
        if r.blocks.len() < r.multiplicity_top {
            failures.push(format!("{label}#{i}: {} blocks < multiplicity {}", r.blocks.len(), r.multiplicity_top));
        }
        for (j, b) in r.blocks.iter().enumerate() {
            match is_weakly_irreducible(&b.block_operator, &t) {
                Ok(true) => {}
                Ok(false) => failures.push(format!("{label}#{i}: block {j} not weakly irreducible")),
                Err(e) => failures.push(format!("{label}#{i}: block {j}: {e}")),
            }
        }
        total_blocks += r.blocks.len();
    }
    let ok = failures.is_empty();
    let mut detail = format!(
        "{label}: {} fixtures, {total_blocks} blocks, worst residual {worst_resid:.1e}",
        fixtures.len()
    );
    if !ok {
        detail.push_str(&format!("; {} failures, first: {}", failures.len(), failures[0]));
    }
    (ok, detail)
}

fn c2_ppt_decomposes() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, m) in [(2, 2), (3, 3), (2, 4)] {
        let fixtures: Vec<_> = (0..50)
            .map(|s| random_separable(k, m, 1 + (s as usize % 4), 2000 + s).unwrap())
            .collect();
        let (o, d) = decomposition_suite(&format!("M{k}⊗M{m}"), &fixtures);
        ok &= o;
        parts.push(d);
    }
    (ok, parts.join(" | "))
}

fn c3_spc_and_invariant_decompose() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2, 3] {
        let spc: Vec<_> = (0..50).map(|s| random_spc(k, 3000 + s, 200).unwrap()).collect();
        let (o, d) = decomposition_suite(&format!("SPC k={k}"), &spc);
        ok &= o;
        parts.push(d);
        let inv: Vec<_> = (0..50).map(|s| random_invariant(k, 4000 + s).unwrap()).collect();
        let (o, d) = decomposition_suite(&format!("invariant k={k}"), &inv);
        ok &= o;
        parts.push(d);
    }
    (ok, parts.join(" | "))
}

fn c4_counterexamples() -> Outcome {
    let t = tol();
    let mut cases: Vec<(String, BipartiteOperator)> = (2..=4).map(|k| (format!("uuᵗ k={k}"), uut(k))).collect();
    for k in [3, 4] {
        cases.push((format!("vv*+S(v̄vᵗ) k={k}"), counterexample(Counterexample::RealignedPair(k)).unwrap()));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, a) in cases {
        let r = decompose(&a, &t, 0).unwrap();
        let cross = r.witness.as_ref().map(|w| w.cross_norm).unwrap_or(0.0);
        let good = r.verdict == Verdict::NotCompletelyReducible && cross > 1e-3;
        ok &= good;
        parts.push(format!("{name}: {:?} cross_norm {cross:.3}", r.verdict));
    }
    (ok, parts.join("; "))
}

fn c5_mub_completion() -> Outcome {
    let t = tol();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2usize, 3, 5, 7] {
        let start = Instant::now();
        let set = generate_prime(p).unwrap();
        let mut worst_dev: f64 = 0.0;
        let mut worst_overlap: f64 = 0.0;
        let mut worst_seed_dev: f64 = 0.0;
        let target = 1.0 / p as f64;
        for drop in 0..=p {
            let rest = set.without(drop);
            let found = match complete(&rest, &t, 11) {
                Ok(b) => b,
                Err(e) => {
                    ok = false;
                    parts.push(format!("p={p} drop {drop}: {e}"));
                    continue;
                }
            };
            worst_dev = worst_dev.max(aligned_deviation(&found, &set.bases[drop]));
            for b in &rest.bases {
                for v in &found.vectors {
                    for w in &b.vectors {
                        let o: Complex64 = v.iter().zip(w).map(|(x, y)| x.conj() * y).sum();
                        worst_overlap = worst_overlap.max((o.norm_sqr() - target).abs());
                    }
                }
            }
            let again = complete(&rest, &t, 12345).unwrap();
            worst_seed_dev = worst_seed_dev.max(aligned_deviation(&found, &again));
        }
        let good = worst_dev <= 1e-8 && worst_overlap <= 1e-10 && worst_seed_dev <= 1e-8;
        ok &= good;
        parts.push(format!(
            "p={p}: dev {worst_dev:.1e}, overlap {worst_overlap:.1e}, seeds {worst_seed_dev:.1e}, {:.2}s",
            start.elapsed().as_secs_f64()
        ));
    }
    (ok, parts.join("; "))
}

fn c6_operator_identities() -> Outcome {
    let t = tol();
    let mut worst_pair: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for p in [2usize, 3, 5, 7] {
        let set = generate_prime(p).unwrap();
        let ops: Vec<_> = set.bases.iter().map(|b| a_alpha(b, &t).unwrap()).collect();
        let u = uut_oracle(p).scale_real(1.0 / p as f64);
        for i in 0..ops.len() {
            for j in 0..ops.len() {
                if i != j {
                    worst_pair = worst_pair.max((ops[i].matrix() * ops[j].matrix()).dist_fro(&u));
                }
            }
        }
        let mut sum = CMatrix::zeros(p * p, p * p);
        for a in &ops {
            sum += a.matrix();
        }
        let target = &CMatrix::identity(p * p) + &uut_oracle(p);
        worst_sum = worst_sum.max(sum.dist_fro(&target));
        let report = verify_set(&set, &t);
        if !report.valid {
            return (false, format!("p={p}: {:?}", report.failures));
        }
    }
    (
        worst_pair <= 1e-10 && worst_sum <= 1e-10,
        format!("max ‖A_αA_β − uuᵗ/k‖ {worst_pair:.1e}; max ‖ΣA_α − Id⊗Id − uuᵗ‖ {worst_sum:.1e}"),
    )
}

fn c7_invariant_ppt() -> Outcome {
    let t = tol();
    let mut not_ppt = 0;
    let mut min_pt = f64::INFINITY;
    for s in 0..100 {
        let a = random_invariant(2, 7000 + s).unwrap();
        let r = is_ppt(&a, &t).unwrap();
        min_pt = min_pt.min(r.value);
        if !r.holds {
            not_ppt += 1;
        }
    }
    let k = 3;
    let a = counterexample(Counterexample::InvariantNotPpt(k)).unwrap();
    let inv = is_invariant_realign(&a, &t).unwrap();
    let ppt = is_ppt(&a, &t).unwrap();
    let expected = 2.0 - k as f64;
    let ok = not_ppt == 0 && inv.holds && !ppt.holds && (ppt.value - expected).abs() <= 1e-10;
    (
        ok,
        format!(
            "100 invariant k=2: {not_ppt} not PPT (least eig of A^t2 {min_pt:.2e}); k=3 example: invariant={}, ppt={}, λ_min(A^t2)={:.12}",
            inv.holds, ppt.holds, ppt.value
        ),
    )
}

/// Expected `P_σ` / `I_σ` rows indexed by the inner coset representative
/// `[id, (34), (23), (243), (234), (24)]`, derived by hand from the images
/// `A, A^t2, S(A), S(A^t2), S(A)^t2, AT` of each fixture.
fn c8_case_table() -> Outcome {
    let t = tol();
    let k = 3;
    let id = BipartiteOperator::identity(k, k);
    // uuᵗ ↦ uuᵗ, T, Id⊗Id, T, Id⊗Id, uuᵗ; Id⊗Id ↦ Id⊗Id, Id⊗Id, uuᵗ, uuᵗ, T, T.
    let expected: Vec<(&str, BipartiteOperator, [bool; 6], [bool; 6])> = vec![
        (
            "uuᵗ",
            uut(k),
            [true, false, true, false, true, true],
            [true, false, false, false, false, true],
        ),
        (
            "Id⊗Id",
            id.clone(),
            [true, true, true, true, false, false],
            [true, true, false, false, false, false],
        ),
        (
            "Id⊗Id+uuᵗ−T",
            invariant_family(k),
            [true, false, true, false, false, false],
            [true, false, true, false, false, false],
        ),
    ];
    let reps: Vec<Perm4> = Inner::ALL.iter().map(|i| i.representative()).collect();
    let coset_of = |sigma: &Perm4| -> usize {
        // ⟨μ, ρ⟩ is the normal Klein subgroup, so left and right cosets agree.
        let klein = ["id", "(12)(34)", "(13)(24)", "(14)(23)"].map(|s| s.parse::<Perm4>().unwrap());
        for (i, r) in reps.iter().enumerate() {
            for o in &klein {
                if r.compose(o) == *sigma || o.compose(r) == *sigma {
                    return i;
                }
            }
        }
        unreachable!("every permutation lies in one coset")
    };
    let mut mismatches = Vec::new();
    for (name, a, p_row, i_row) in &expected {
        for sigma in Perm4::all() {
            let r = membership(a, &sigma, &t).unwrap();
            let c = coset_of(&sigma);
            if r.in_p_sigma != p_row[c] || r.in_i_sigma != i_row[c] {
                mismatches.push(format!("{name} σ={sigma}: P={} I={}", r.in_p_sigma, r.in_i_sigma));
            }
        }
    }
    let spc = random_spc(k, 8001, 200).unwrap();
    let ppt = random_separable(k, k, 3, 8002).unwrap();
    let p34: Perm4 = "(34)".parse().unwrap();
    let p243: Perm4 = "(243)".parse().unwrap();
    let mut equivalences = 0;
    for a in [uut(k), id, invariant_family(k), spc, ppt] {
        let m34 = membership(&a, &p34, &t).unwrap().in_p_sigma;
        let m243 = membership(&a, &p243, &t).unwrap().in_p_sigma;
        if m34 != is_ppt(&a, &t).unwrap().holds {
            mismatches.push("P_(34) differs from PPT".into());
        }
        if m243 != is_spc(&a, &t).unwrap().holds {
            mismatches.push("P_(243) differs from SPC".into());
        }
        equivalences += 2;
    }
    let ok = mismatches.is_empty();
    let mut detail = format!("3 fixtures × 24 σ table rows and {equivalences} PPT/SPC equivalences checked");
    if !ok {
        detail.push_str(&format!("; {} mismatches, first: {}", mismatches.len(), mismatches[0]));
    }
    (ok, detail)
}

fn c9_positive_schmidt() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut ok = true;
    for k in [2, 3, 4] {
        let alpha: Basis = random_basis(k, &mut rng);
        let a = a_alpha(&alpha, &t).unwrap();
        let dec = match positive_schmidt_unique(&a, &t) {
            Ok(d) => d,
            Err(e) => {
                ok = false;
                parts.push(format!("k={k}: {e}"));
                continue;
            }
        };
        if dec.rank() != k {
            ok = false;
        }
        let mut recon = CMatrix::zeros(k * k, k * k);
        for (l, (g, d)) in dec.lambdas.iter().zip(dec.gammas.iter().zip(&dec.deltas)) {
            let pg = psd_check(g, 1e-10, 1e-9).unwrap();
            let e = crmaps_core::linalg::hermitian_eig(g, 1e-10).unwrap();
            let rank_one = e.eigenvalues[..k - 1].iter().all(|x| x.abs() < 1e-9);
            ok &= pg.psd && rank_one && psd_check(d, 1e-10, 1e-9).unwrap().psd;
            recon += &kron(g, d).scale_real(*l);
        }
        // Σ vᵢvᵢ* ⊗ v̄ᵢvᵢᵗ from the basis itself.
        let mut oracle = CMatrix::zeros(k * k, k * k);
        for v in &alpha.vectors {
            let p = CMatrix::from_fn(k, k, |r, c| v[r] * v[c].conj());
            oracle += &kron(&p, &p.transpose());
        }
        worst = worst.max(recon.dist_fro(&oracle)).max(a.matrix().dist_fro(&oracle));
        parts.push(format!("k={k}: {} factors", dec.rank()));
    }
    let uut_err = matches!(positive_schmidt_unique(&uut(3), &t), Err(Error::NotCompletelyReducible { .. }));
    ok &= worst <= 1e-10 && uut_err;
    (
        ok,
        format!("{}; reconstruction err {worst:.1e}; uuᵗ gives NotCompletelyReducible: {uut_err}", parts.join(", ")),
    )
}

fn c10_fg_spectrum() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(10_001);
    let mut worst: f64 = 0.0;
    let dims = [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)];
    for i in 0..100 {
        let (k, m) = dims[i % dims.len()];
        let x = gaussian_matrix(k * m, k * m, &mut rng);
        let a = op(k, m, (&x * &x.adjoint()).hermitian_part());
        let mut fg: Vec<f64> = fg_of(&a, &t).unwrap().eig().unwrap().eigenvalues;
        fg.reverse();
        let dec = schmidt_decompose(&a, &t).unwrap();
        let mut expected: Vec<f64> = dec.lambdas.iter().map(|l| l * l).collect();
        expected.resize(k * k, 0.0);
        let scale = expected[0].max(1.0);
        for (x, y) in fg.iter().zip(&expected) {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    (worst <= 1e-9, format!("100 PSD operators up to (3,3): worst |eig − λ²| {worst:.1e} (relative)"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("realignment algebra", c1_realignment_algebra, Duration::from_secs(5)),
        ("PPT fixtures decompose", c2_ppt_decomposes, Duration::from_secs(60)),
        ("SPC and invariant fixtures decompose", c3_spc_and_invariant_decompose, Duration::from_secs(120)),
        ("counterexamples carry witnesses", c4_counterexamples, Duration::from_secs(60)),
        ("MUB completion", c5_mub_completion, Duration::from_secs(120)),
        ("MUB operator identities", c6_operator_identities, Duration::from_secs(60)),
        ("invariant k=2 implies PPT; invariant non-PPT example", c7_invariant_ppt, Duration::from_secs(60)),
        ("S4 case table", c8_case_table, Duration::from_secs(60)),
        ("positive Schmidt decomposition", c9_positive_schmidt, Duration::from_secs(60)),
        ("F∘G spectrum vs Schmidt coefficients", c10_fg_spectrum, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= budget, detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {name} ({:.2}s, budget {}s): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
