use std::path::PathBuf;
use std::process::{Command, Output};

use crmaps_core::io::{parse_basis_set, parse_matrix, serialize_matrix};
use crmaps_core::tensor::uut;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn crmaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crmaps")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn classify_invariant_not_ppt() {
    let o = crmaps(&["classify", &path("invariant_not_ppt_k3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["ppt"], false);
    assert_eq!(r["invariant_realign"], true);
    assert!((r["min_eig_pt"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    for key in ["is_psd", "spc", "spc_min_eig", "invariance_residual", "min_eig"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn decompose_uut_is_negative_with_report() {
    let o = crmaps(&["decompose", &path("uut_k2.json")]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["completely_reducible"], false);
    assert!(r["witness"]["cross_norm"].as_f64().unwrap() > 1e-3);
}

#[test]
fn decompose_separable_succeeds() {
    let o = crmaps(&["decompose", &path("separable_k2_m4.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["verdict"], "completely_reducible");
    assert!(!r["blocks"].as_array().unwrap().is_empty());
}

#[test]
fn mub_complete_k2_gives_circular_basis() {
    let o = crmaps(&["mub", "complete", &path("mub_k2_two_bases.json")]);
    assert_eq!(o.status.code(), Some(0));
    let b = parse_basis_set(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let given = parse_basis_set(&std::fs::read_to_string(fixture("mub_k2_two_bases.json")).unwrap()).unwrap();
    for v in &b.bases[0].vectors {
        for basis in &given.bases {
            for w in &basis.vectors {
                let o: num_complex::Complex64 = v.iter().zip(w).map(|(x, y)| x.conj() * y).sum();
                assert!((o.norm_sqr() - 0.5).abs() < 1e-10);
            }
        }
        // Circular: entries of equal modulus with relative phase ±i.
        let ratio = v[1] / v[0];
        assert!(ratio.re.abs() < 1e-10 && (ratio.im.abs() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn mub_verify_exit_codes() {
    assert_eq!(crmaps(&["mub", "verify", &path("mub_k3.json")]).status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("crmaps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    // Computational basis twice: orthonormal but not unbiased.
    std::fs::write(&bad, r#"{"dim": 2, "bases": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[1,0],[0,0]],[[0,0],[1,0]]]]}"#).unwrap();
    let o = crmaps(&["mub", "verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn sigma_apply_realigns_identity() {
    let o = crmaps(&["sigma", "apply", "(23)", &path("identity_k3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let a = parse_matrix(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(a, uut(3));
}

#[test]
fn sigma_table_has_24_rows() {
    let o = crmaps(&["sigma", "table", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 24);
}

#[test]
fn schmidt_hermitian_on_flip() {
    let o = crmaps(&["schmidt", "--hermitian", &path("flip_k3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    let lambdas = r["lambdas"].as_array().unwrap();
    assert_eq!(lambdas.len(), 9);
    assert!(lambdas.iter().all(|l| (l.as_f64().unwrap() - 1.0).abs() < 1e-12));
}

#[test]
fn fixture_command_matches_bundled_file() {
    let o = crmaps(&["fixture", "uut", "2"]);
    assert_eq!(std::str::from_utf8(&o.stdout).unwrap(), serialize_matrix(&uut(2)));
    assert_eq!(o.stdout, std::fs::read(fixture("uut_k2.json")).unwrap());
}

#[test]
fn json_output_is_deterministic() {
    let args = ["decompose", "--seed", "3", &path("invariant_k3.json")];
    assert_eq!(crmaps(&args).stdout, crmaps(&args).stdout);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(crmaps(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(crmaps(&["classify", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(crmaps(&["mub", "generate", "4"]).status.code(), Some(2));
    assert_eq!(crmaps(&["--tol", "-1", "mub", "generate", "3"]).status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("crmaps-parse-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("short.json");
    std::fs::write(&bad, r#"{"dims": [2, 2], "data": [[1, 0]]}"#).unwrap();
    let o = crmaps(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));
}

#[test]
fn config_file_and_pretty_output() {
    let dir = std::env::temp_dir().join(format!("crmaps-config-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("tol.toml");
    std::fs::write(&cfg, "psd = 1e-6\nretries = 2\n").unwrap();
    let o = crmaps(&["--config", cfg.to_str().unwrap(), "--format", "pretty", "classify", &path("uut_k3.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("ppt"));
    std::fs::write(&cfg, "unknown_knob = 1\n").unwrap();
    assert_eq!(crmaps(&["--config", cfg.to_str().unwrap(), "classify", &path("uut_k3.json")]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("crmaps-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("mub5.json");
    let o = crmaps(&["mub", "generate", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(parse_basis_set(&std::fs::read_to_string(&out).unwrap()).unwrap().bases.len(), 6);
}
