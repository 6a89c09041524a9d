//! The `qscs` binary end to end: run verbs, exit codes and plotting.

use std::path::Path;
use std::process::{Command, Output};

fn qscs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qscs")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn crb_run_writes_csv_and_manifest_then_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let config = write_config(dir.path(), "c.json", r#"{"experiment_kind": "crb_vs_snr", "snr_db": [0, 20]}"#);
    let o = qscs(&["crb", "--config", &config, "--seed", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("crb_vs_snr.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 4);

    let svg = dir.path().join("crb.svg");
    let input = out.join("crb_vs_snr.csv");
    let o = qscs(&["plot", "--input", input.to_str().unwrap(), "--style", "crb", "--out", svg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    // the same plot from a plot config file
    let svg2 = dir.path().join("crb2.svg");
    let plot_config = write_config(
        dir.path(),
        "plot.json",
        &serde_json::json!({"input": input, "style": "crb", "output": svg2}).to_string(),
    );
    assert!(qscs(&["plot", "--config", &plot_config]).status.success());
    assert_eq!(std::fs::read(&svg).unwrap(), std::fs::read(&svg2).unwrap());
}

#[test]
fn verb_must_match_kind() {
    let o = qscs(&["mmv", "--kind", "error_vs_m"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("qscs recover"));
    assert_eq!(qscs(&["recover"]).status.code(), Some(1));
}

#[test]
fn invalid_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bad.json", r#"{"experiment_kind": "error_vs_m", "trials": 0}"#);
    let o = qscs(&["recover", "--config", &config]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
}

#[test]
fn unconverged_runs_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let config = write_config(
        dir.path(),
        "c.json",
        r#"{"experiment_kind": "error_vs_m", "trials": 2, "m_grid": [40], "snr_db": [20],
            "signal": {"type": "random", "n": 16, "k": 2}}"#,
    );
    let o = qscs(&["recover", "--config", &config, "--max-iter", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    // outputs are still written
    assert!(out.join("error_vs_m.csv").exists() && out.join("manifest.json").exists());

    let o = qscs(&["recover", "--config", &config, "--quantizer", "lloyd:2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("error_vs_m.csv")).unwrap();
    assert!(csv.contains("lloyd:2") && !csv.contains(",sign,"));
}
