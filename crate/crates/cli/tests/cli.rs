//! End-to-end checks of the command-line contract: outputs, exit codes, and
//! determinism across parallelism degrees.

use std::process::{Command, Output};

fn singmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn trace_values_and_exit_codes() {
    let out = singmod(&["trace", "--level", "2", "--d", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "152");

    let out = singmod(&["trace", "--level", "1", "--d", "3"]);
    assert_eq!(stdout(&out).trim(), "-248");

    // -5 is not a square mod 8: usage error with the support condition named
    let out = singmod(&["trace", "--level", "2", "--d", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("square"), "stderr: {err}");
}

#[test]
fn verify_exit_codes() {
    let out = singmod(&["verify", "ao", "--l", "3", "--dmax", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 FAIL"));

    // l = p is a usage error
    let out = singmod(&["verify", "osburn", "--p", "3", "--l", "3", "--dmax", "20"]);
    assert_eq!(out.status.code(), Some(2));

    // even l is a usage error
    let out = singmod(&["verify", "ao", "--l", "2", "--dmax", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_json_round_trips() {
    let out = singmod(&[
        "verify", "osburn", "--p", "2", "--l", "3", "--dmax", "23", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(doc["level"], "p");
    assert_eq!(doc["p"], 2);
    assert_eq!(doc["l"], 3);
    assert_eq!(doc["fails"], 0);
    let d23 = doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["d"] == 23)
        .unwrap();
    // integer values ride as decimal strings
    assert_eq!(d23["trace"], "113643");
    assert_eq!(d23["verdict"], "PASS");
}

#[test]
fn phi_cache_file_reloads() {
    let dir = std::env::temp_dir().join("singmod-cli-test");
    let _ = std::fs::create_dir_all(&dir);
    let path = dir.join("phi2.json");
    let out = singmod(&[
        "phi",
        "--p",
        "2",
        "--qmax",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let phi = singmod::phi::PhiP::from_cache_json(&text).unwrap();
    assert_eq!(phi.extract_b(-1).unwrap(), num_bigint::BigInt::from(1));
    assert_eq!(phi.extract_b(0).unwrap(), num_bigint::BigInt::from(-2));

    // 4 is not in the genus-zero set
    let out = singmod(&["phi", "--p", "4", "--qmax", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn phi_audit_reports_class_count() {
    let dir = std::env::temp_dir().join("singmod-cli-test");
    let _ = std::fs::create_dir_all(&dir);
    let path = dir.join("phi13.json");
    let out = singmod(&[
        "phi",
        "--p",
        "13",
        "--qmax",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // p = 13 imposes 23 negative-D conditions
    let text = stdout(&out);
    assert!(
        text.contains("23 negative-D classes"),
        "audit line: {text}"
    );
}

#[test]
fn compare_levels_and_unsupported_oracle() {
    let out = singmod(&["compare", "--level", "1", "--dmax", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().all(|l| l.ends_with("ok")));

    let out = singmod(&["compare", "--p", "11", "--dmax", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_runs_are_bit_identical_across_parallelism() {
    let args = ["verify", "osburn", "--p", "2", "--l", "3", "--dmax", "15", "--format", "csv"];
    let one: Vec<u8> = {
        let mut a = args.to_vec();
        a.extend(["--jobs", "1"]);
        singmod(&a).stdout
    };
    let four: Vec<u8> = {
        let mut a = args.to_vec();
        a.extend(["--jobs", "4"]);
        singmod(&a).stdout
    };
    assert_eq!(one, four);
    assert!(!one.is_empty());
}

#[test]
fn cache_dir_round_trip() {
    let dir = std::env::temp_dir().join("singmod-cache-test");
    let _ = std::fs::remove_dir_all(&dir);
    let args = [
        "trace", "--level", "2", "--d", "23", "--cache-dir",
    ];
    let dirs = dir.to_str().unwrap();
    let first = singmod(&[&args[..], &[dirs]].concat());
    assert_eq!(first.status.code(), Some(0));
    // a cache file was written and the second run (which revalidates and
    // reuses it) agrees
    assert!(std::fs::read_dir(&dir).unwrap().count() > 0);
    let second = singmod(&[&args[..], &[dirs]].concat());
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(stdout(&first).trim(), "-94");
    // --no-cache still reconstructs to the same value
    let third = singmod(&[&args[..], &[dirs, "--no-cache"]].concat());
    assert_eq!(stdout(&third).trim(), "-94");
}

#[test]
fn table_matches_remark_column() {
    let out = singmod(&["table", "--p", "3", "--dmax", "27", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("d,trace"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(
        rows,
        vec![
            "3,-14", "8,-34", "11,22", "12,52", "15,-138", "20,-116", "23,115", "24,348",
            "27,-482"
        ]
    );
}
