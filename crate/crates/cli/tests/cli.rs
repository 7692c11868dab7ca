use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bmcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_certificate(dir: &Path, t: &str) -> std::path::PathBuf {
    let path = dir.join("cert.json");
    let out = bmcert(&[
        "certify",
        "--t",
        t,
        "--format",
        "structured",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn fresh_certificate_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), "3");
    let out = bmcert(&["verify-cert", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("valid, certifies t"));
}

#[test]
fn perturbed_multiplier_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), "3");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let farkas = doc["cases"][0]["farkas"].as_array_mut().unwrap();
    let k = farkas.iter().position(|m| m != "0/1").unwrap();
    farkas[k] = Value::String("1000/1".into());
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = bmcert(&["verify-cert", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("INVALID"));
}

#[test]
fn edited_system_echo_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), "3");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    doc["cases"][1]["system"]["inequalities"][0]["rhs"] = Value::String("-100/1".into());
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(code(&bmcert(&["verify-cert", path.to_str().unwrap()])), 1);
}

#[test]
fn truncated_certificate_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), "3");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, &text[..text.len() / 3]).unwrap();
    let out = bmcert(&["verify-cert", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn missing_certificate_is_an_input_error() {
    assert_eq!(code(&bmcert(&["verify-cert", "/nonexistent/cert.json"])), 2);
}

#[test]
fn bad_arguments_exit_two_with_usage() {
    for args in [
        &["certify", "--t", "1/0"][..],
        &["certify", "--t", "abc"],
        &["certify", "--t", "3", "--unknown"],
        &["search", "--lo", "x"],
        &["certify", "--t", "3", "--c-policy", "1,0,0"],
        &["bounds", "--m", "5..2"],
        &["upper", "--t", "3", "--scan", "3:4:1/10"],
        &[],
    ] {
        let out = bmcert(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn guard_violations_exit_two() {
    assert_eq!(code(&bmcert(&["certify", "--t", "1"])), 2);
    assert_eq!(
        code(&bmcert(&["certify", "--t", "3", "--c-policy", "1,0,4"])),
        2
    );
    assert_eq!(code(&bmcert(&["search", "--lo", "5", "--hi", "3"])), 2);
    assert_eq!(code(&bmcert(&["upper", "--t", "5"])), 2);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&bmcert(&["--help"])), 0);
    assert_eq!(code(&bmcert(&["--version"])), 0);
}

#[test]
fn certify_exit_code_tracks_feasibility() {
    assert_eq!(code(&bmcert(&["certify", "--t", "3"])), 0);
    let out = bmcert(&["certify", "--t", "5", "--format", "csv"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("case,status\n"));
    assert!(text.contains(",feasible"));
}

#[test]
fn single_case_certificates_audit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    let out = bmcert(&[
        "certify",
        "--t",
        "3",
        "--case",
        "in0not1",
        "--format",
        "structured",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = bmcert(&["verify-cert", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("selected cases infeasible"));
}

#[test]
fn system_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = write_certificate(dir.path(), "3");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let system = dir.path().join("system.json");
    fs::write(
        &system,
        serde_json::to_string_pretty(&doc["cases"][0]["system"]).unwrap(),
    )
    .unwrap();
    let out = bmcert(&[
        "certify",
        "--system",
        system.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "status\ninfeasible\n");
    assert_eq!(
        code(&bmcert(&[
            "certify",
            "--system",
            system.to_str().unwrap(),
            "--t",
            "3"
        ])),
        2
    );
}

#[test]
fn bounds_table() {
    let out = bmcert(&["bounds", "--m", "2", "--k", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,param,value");
    assert!(lines[1].starts_with("height-m,2,4.2360679"));
    assert_eq!(lines[2], "gp-k,2,3");
}

#[test]
fn bounds_checks_pass() {
    let out = bmcert(&["bounds", "--m", "2..4", "--checks", "--digits", "12"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).matches("pass").count(), 6);
}

#[test]
fn search_report_is_structured_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("search.json");
    let out = bmcert(&[
        "search",
        "--lo",
        "3",
        "--hi",
        "5",
        "--iters",
        "6",
        "--c-policy",
        "2,1,4",
        "--variant",
        "both",
        "--format",
        "structured",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let runs = doc["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for run in runs {
        assert_eq!(run["trace"].as_array().unwrap().len(), 8);
        assert_eq!(run["policy"], "2/1,1/1,4");
    }
    assert_eq!(doc["certificates"].as_array().unwrap().len(), 4);
    assert_eq!(code(&bmcert(&["verify-cert", path.to_str().unwrap()])), 0);
}

#[test]
fn search_without_a_valid_bracket_is_not_certified() {
    assert_eq!(code(&bmcert(&["search", "--lo", "4", "--hi", "5"])), 1);
    assert_eq!(code(&bmcert(&["search", "--lo", "3", "--hi", "13/4"])), 1);
}

#[test]
fn output_is_deterministic() {
    let a = stdout(&bmcert(&[
        "dichotomy",
        "--t",
        "7/2",
        "--format",
        "structured",
    ]));
    let b = stdout(&bmcert(&[
        "dichotomy",
        "--t",
        "7/2",
        "--format",
        "structured",
    ]));
    assert_eq!(a, b);
    let doc: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["certificates"].as_array().unwrap().len(), 8);
}

#[test]
fn sweep_ranks_every_policy() {
    let out = bmcert(&[
        "sweep",
        "--iters",
        "4",
        "--format",
        "csv",
        "--variant",
        "printed",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn upper_reports() {
    let out = bmcert(&["upper", "--t", "3", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "t,normT,normS,distortion\n3/1,14/3,19/12,133/18\n"
    );

    let out = bmcert(&["upper", "--scan", "3:4:1/4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 6);

    let out = bmcert(&[
        "upper",
        "--optimize",
        "--tol",
        "1e-12",
        "--format",
        "structured",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["t"].as_str().unwrap().starts_with("3.87512979"));
}
