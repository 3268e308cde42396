//! Drive the command-line front end in-process and print the JSON report.
//!
//! ```bash
//! cargo run --example cli_report
//! ```

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let args = [
        "derlab", "reconstruct", "--n", "3", "--oracle", "builtin:inner_star", "--star", "--seed", "7",
        "--verify-samples", "2", "--out", out.to_str().unwrap(),
    ];
    let code = derivation_lab::cli::run(args);
    println!("exit code {code}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    println!("status {}", report["status"]);
    println!("z {}", report["result"]["z_display"]);
    println!("argv {}", report["argv"]);
}
