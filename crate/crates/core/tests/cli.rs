use std::path::{Path, PathBuf};
use std::process::Command;

use derivation_lab::derlab::{MapOracle, Oracle};
use derivation_lab::matlin::random::{random_projection, random_trace_zero_skew};
use derivation_lab::matlin::{matrix_from_json, matrix_to_json, projection_spanning_basis};
use derivation_lab::{Matrix, CQ};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Run `derlab` in `dir`, returning the exit code and the parsed report.
fn derlab(dir: &Path, args: &[&str]) -> (i32, Option<Value>, String) {
    let out = tempfile::NamedTempFile::new().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_derlab"))
        .current_dir(dir)
        .args(args)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    let text = std::fs::read_to_string(out.path()).unwrap_or_default();
    let report = serde_json::from_str(&text).ok();
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned() + &String::from_utf8_lossy(&output.stderr);
    (output.status.code().unwrap(), report, stdout)
}

fn report_bytes(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = tempfile::NamedTempFile::new().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_derlab"))
        .current_dir(dir)
        .args(args)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(output.status.code().is_some());
    std::fs::read(out.path()).unwrap()
}

fn violation_ids(report: &Value) -> Vec<String> {
    report["violations"].as_array().unwrap().iter().map(|v| v["id"].as_str().unwrap().to_string()).collect()
}

#[test]
fn inner_star_builtin_certifies() {
    let (code, report, _) = derlab(&data(), &["certify", "--n", "3", "--oracle", "builtin:inner_star", "--seed", "7"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["settings"]["seed"], 7);
    assert_eq!(report["settings"]["backend"], "exact");
}

#[test]
fn worked_example_table_reconstructs() {
    let (code, report, _) = derlab(&data(), &["reconstruct", "--n", "2", "--method", "m2", "--oracle", "worked_m2.json"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    let z: Matrix<CQ> = matrix_from_json(&report["result"]["z"]).unwrap();
    assert_eq!(z, Matrix::from_literals(&[&["-1/2i", "1"], &["-1", "1/2i"]]).unwrap());
    let raw: Matrix<CQ> = matrix_from_json(&report["result"]["trace"]["raw"]).unwrap();
    assert_eq!(raw, Matrix::from_literals(&[&["-i", "1"], &["-1", "0"]]).unwrap());
}

#[test]
fn unit_violation_table_is_rejected_with_its_citation() {
    let (code, report, stdout) = derlab(&data(), &["certify", "--oracle", "unit_violation.json"]);
    assert_eq!(code, 1);
    let report = report.unwrap();
    assert_eq!(report["status"], "fail");
    assert!(violation_ids(&report).contains(&"unit_vanishes".to_string()));
    assert!(stdout.contains("Δ(1) = 0"), "{stdout}");
}

#[test]
fn missing_table_data_is_inconclusive() {
    let (code, report, _) = derlab(&data(), &["reconstruct", "--method", "m2", "--oracle", "missing_e12.json"]);
    assert_eq!(code, 1);
    assert_eq!(report.unwrap()["status"], "inconclusive");
}

#[test]
fn cross_block_table_names_the_block_pair() {
    let (code, report, _) = derlab(&data(), &["blocks", "--oracle", "cross_block.json", "--star", "--samples", "0"]);
    assert_eq!(code, 1);
    let report = report.unwrap();
    assert!(violation_ids(&report).contains(&"block_preservation".to_string()));
    let cx = report["checks"][0]["counterexample"].as_str().unwrap();
    assert!(cx.contains("block pair (1,2)"), "{cx}");
}

#[test]
fn builtin_file_with_params() {
    let (code, report, _) = derlab(&data(), &["reconstruct", "--oracle", "skew_builtin.json", "--star"]);
    assert_eq!(code, 0);
    let z: Matrix<CQ> = matrix_from_json(&report.unwrap()["result"]["z"]).unwrap();
    assert_eq!(z, Matrix::from_literals(&[&["i", "1"], &["-1", "-i"]]).unwrap());
}

#[test]
fn usage_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    std::fs::write(dir.path().join("not_skew.json"), r#"{"builtin": "inner_star", "params": {"z": [["1", "0"], ["0", "0"]]}, "n": 2}"#).unwrap();
    for args in [
        vec!["certify", "--oracle", "bad.json"],
        vec!["certify", "--oracle", "absent.json"],
        vec!["certify", "--oracle", "not_skew.json"],
        vec!["certify", "--oracle", "builtin:inner"],
        vec!["reconstruct", "--n", "3", "--oracle", "builtin:inner"],
        vec!["certify", "--n", "2", "--backend", "decimal"],
        vec!["certify", "--n", "2", "--eps", "-1"],
    ] {
        let (code, report, _) = derlab(dir.path(), &args);
        assert_eq!(code, 2, "{args:?}");
        assert!(report.is_none());
    }
}

#[test]
fn extend_measure_from_a_projection_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z = random_trace_zero_skew::<CQ, _>(3, &mut rng);
    let oracle = MapOracle::inner_star(z).unwrap();
    let mut points: Vec<Matrix<CQ>> = projection_spanning_basis::<CQ>(3).into_iter().map(|p| p.into_matrix()).collect();
    for _ in 0..5 {
        points.push(random_projection::<CQ, _>(3, &mut rng).into_matrix());
    }
    points.push(Matrix::identity(3));
    points.push(&Matrix::unit(3, 0, 0) + &Matrix::unit(3, 1, 1));
    let rows: Vec<Value> = points
        .iter()
        .map(|p| json!({"in": matrix_to_json(p), "out": matrix_to_json(&oracle.eval(p).unwrap())}))
        .collect();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("mu.json"), json!({"n": 3, "table": rows}).to_string()).unwrap();

    let (code, report, stdout) = derlab(dir.path(), &["extend-measure", "--table", "mu.json"]);
    assert_eq!(code, 0, "{stdout}");
    let report = report.unwrap();
    assert_eq!(report["result"]["G"]["grid"].as_array().unwrap().len(), 9);
    assert!(report["checks"][0]["instances"].as_u64().unwrap() >= 1);
    assert_eq!(report["flags"].as_array().unwrap().len(), 0);

    let not_projection = json!({"n": 2, "table": [{"in": [["0", "1"], ["0", "0"]], "out": [["0", "0"], ["0", "0"]]}]});
    std::fs::write(dir.path().join("bad.json"), not_projection.to_string()).unwrap();
    assert_eq!(derlab(dir.path(), &["extend-measure", "--table", "bad.json"]).0, 2);
}

#[test]
fn m2_extension_is_always_flagged() {
    for oracle in ["builtin:inner_star", "builtin:inner", "builtin:zero"] {
        let (_, report, _) = derlab(&data(), &["extend-measure", "--n", "2", "--oracle", oracle, "--samples", "10"]);
        let flags = report.unwrap()["flags"].clone();
        assert!(flags.to_string().contains("no Gleason guarantee"), "{oracle}: {flags}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let runs: [&[&str]; 5] = [
        &["certify", "--n", "3", "--oracle", "builtin:inner_star", "--seed", "7", "--star"],
        &["reconstruct", "--n", "4", "--oracle", "builtin:inner_star", "--star", "--backend", "float"],
        &["extend-measure", "--n", "3", "--oracle", "builtin:inner_star", "--samples", "20", "--backend", "float"],
        &["blocks", "--dims", "1,1,3", "--oracle", "builtin:inner_star", "--star"],
        &["certify", "--n", "2", "--oracle", "builtin:additivity_table", "--threads", "4"],
    ];
    for args in runs {
        let a = report_bytes(&data(), args);
        let b = report_bytes(&data(), args);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn golden_report() {
    let golden = data().join("golden_reconstruct_m2.json");
    let bytes = report_bytes(&data(), &["reconstruct", "--method", "m2", "--oracle", "worked_m2.json"]);
    if std::env::var_os("DERLAB_BLESS").is_some() {
        std::fs::write(&golden, &bytes).unwrap();
    }
    let expected = std::fs::read(&golden).expect("golden report present (set DERLAB_BLESS=1 to write it)");
    assert_eq!(String::from_utf8(bytes).unwrap(), String::from_utf8(expected).unwrap());
}
