//! End-to-end tests of the command-line binary: exit codes and output formats.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwa-fidelity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validity_of_stable_parameters() {
    let o = run(&["validity", "--omega-a", "1", "--omega-b", "1", "--g", "0.2"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("0.5"));
}

#[test]
fn validity_beyond_critical_coupling_exits_two() {
    let o = run(&["validity", "--g", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("critical coupling"));
}

#[test]
fn fidelity_scan_golden_header() {
    let o = run(&[
        "fidelity-scan",
        "--g",
        "0.05",
        "--tau-end",
        "2",
        "--steps",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,fidelity,bures,delta_n,r_plus,r_minus");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
}

#[test]
fn fidelity_scan_is_deterministic() {
    let args = [
        "fidelity-scan",
        "--g",
        "0.1",
        "--squeezing",
        "0.2",
        "--steps",
        "17",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn fidelity_scan_json_parses() {
    let o = run(&[
        "fidelity-scan",
        "--g",
        "0.05",
        "--steps",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn dumped_config_reloads() {
    let dir = std::env::temp_dir().join(format!("rwa-fidelity-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.json");
    let o = run(&[
        "fidelity-scan",
        "--g",
        "0.07",
        "--squeezing",
        "0.1",
        "--dump-config",
    ]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, &o.stdout).unwrap();
    let o2 = run(&[
        "fidelity-scan",
        "--config",
        path.to_str().unwrap(),
        "--dump-config",
    ]);
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(o.stdout, o2.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_config_exits_two() {
    let dir = std::env::temp_dir().join(format!("rwa-fidelity-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"params\": {\"omega_a\": 1}").unwrap();
    let o = run(&["fidelity-scan", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unwritable_output_exits_one() {
    let o = run(&[
        "fidelity-scan",
        "--g",
        "0.05",
        "--output",
        "/nonexistent-directory/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_exits_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn perturbative_compare_reports_orders() {
    let o = run(&["perturbative-compare", "--tau", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infidelity_order: 2.02"));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn oracle_check_passes() {
    let o = run(&[
        "oracle-check",
        "--g",
        "0.05",
        "--tau-end",
        "2",
        "--steps",
        "3",
        "--cutoff",
        "20",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn circuit_map_runs() {
    let o = run(&[
        "circuit-map",
        "--epsilon-a",
        "31.4",
        "--epsilon-b",
        "44.0",
        "--pump-sq-amp",
        "0.02",
        "--pump-sq-freq",
        "75.0",
        "--omega-a",
        "0.2",
        "--omega-b",
        "0.2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
