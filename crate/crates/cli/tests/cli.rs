use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmuplace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8")
}

#[test]
fn subcommands_are_deterministic() {
    let commands: &[&[&str]] = &[
        &["caseio", "dump", "case9"],
        &["netmat", "ybus", "case14", "--format", "csv"],
        &["netmat", "jacobian", "case14", "--format", "csv"],
        &["resistance", "case9", "--format", "csv"],
        &["resistance", "check", "case30"],
        &["eadj", "case14", "--format", "dot"],
        &["place", "case30", "--structure", "elec", "--format", "json"],
        &["structural", "case14"],
        &["structural", "compare", "case57"],
        &["table", "case9", "case14", "--format", "csv"],
        &["export", "case14", "--which", "lambda-elec"],
        &["export", "case14", "--which", "graph-topo"],
    ];
    for args in commands {
        let first = stdout(args);
        assert!(!first.is_empty(), "{args:?}");
        assert_eq!(first, stdout(args), "{args:?}");
    }
}

#[test]
fn table_reports_topological_counts() {
    let csv = stdout(&["table", "--format", "csv"]);
    let topo: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(topo, ["3", "4", "10", "17", "32"]);
}

#[test]
fn diff_goes_to_stderr_with_flat_start_note() {
    let out = run(&["table", "case9", "--diff"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("case9"));
    assert!(err.contains("flat start"));
}

#[test]
fn bad_case_file_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.m");
    std::fs::write(&path, "mpc.bus = [\n1 3 0 0\n];\n").unwrap();
    let out = run(&["place", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(run(&["place", "no-such-case"]).status.code(), Some(1));
}

#[test]
fn expired_budget_exits_with_two() {
    let out = run(&["place", "case118", "--budget", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.dot");
    let printed = stdout(&["export", "case9", "--which", "graph-elec"]);
    stdout(&[
        "export",
        "case9",
        "--which",
        "graph-elec",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn dumped_case_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case14.m");
    let original = stdout(&["place", "case14", "--format", "json"]);
    let text = pmuplace_text("case14");
    std::fs::write(&path, text).unwrap();
    let reloaded = stdout(&["place", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(original, reloaded);
}

#[test]
fn flat_profile_file_matches_default() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.json");
    let n = 9;
    let profile = serde_json::json!({ "v_mag": vec![1.0; n], "v_ang_deg": vec![0.0; n] });
    std::fs::write(&path, profile.to_string()).unwrap();
    let default = stdout(&["netmat", "jacobian", "case9", "--format", "csv"]);
    let explicit = stdout(&[
        "netmat",
        "jacobian",
        "case9",
        "--format",
        "csv",
        "--profile",
        path.to_str().unwrap(),
    ]);
    assert_eq!(default, explicit);

    let short = serde_json::json!({ "v_mag": [1.0], "v_ang_deg": [0.0] });
    std::fs::write(&path, short.to_string()).unwrap();
    let out = run(&[
        "netmat",
        "jacobian",
        "case9",
        "--profile",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

fn pmuplace_text(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(format!("{name}.m"));
    std::fs::read_to_string(path).unwrap()
}
