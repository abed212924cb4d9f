//! End-to-end tests of the `ffmu` binary: dispatch examples, exit codes,
//! table cache flows, and output formats.

use std::path::Path;
use std::process::{Command, Output};

fn ffmu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffmu"))
        .args(args)
        .env_remove("FFMU_TABLE_DIR")
        .output()
        .expect("binary runs")
}

fn ffmu_env(args: &[&str], key: &str, value: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffmu"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn mertens_dispatch_example() {
    let out = ffmu(&["mertens", "--q", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("4/1"), "{text}");
}

#[test]
fn landau_identity_dispatch_example() {
    let out = ffmu(&["landau2-identity", "--q", "2", "--x", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("-9/16,-9/16,true"), "{text}");
}

#[test]
fn duality_dispatch_example() {
    let out = ffmu(&[
        "duality",
        "--profile",
        "d:1,S d:1,S d:2,S",
        "--f",
        "x",
        "--kmax",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().count() >= 4, "{text}");
    assert!(text.contains("1,-2/1,-2/1,true"), "{text}");
    assert!(text.contains("2,2/1,2/1,true"), "{text}");
}

#[test]
fn duality_from_polynomial_and_subset() {
    let out = ffmu(&[
        "duality", "--q", "2", "--poly", "T^4+T", "--subset", "all", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "duality");
    assert_eq!(v["pass"], true);
}

#[test]
fn unknown_subcommand_exits_two() {
    let out = ffmu(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_subset_exits_two() {
    let out = ffmu(&[
        "qsum", "--q", "2", "--subset", "ap:101:1", "--k", "1", "--n", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("irreducible"));
}

#[test]
fn ceiling_refusal_exits_two_and_force_overrides() {
    let out = ffmu(&[
        "wcount",
        "--q",
        "2",
        "--x",
        "19",
        "--method",
        "formula",
        "--ceiling",
        "4",
    ]);
    // formula path needs no enumeration, so pick an enumerating command
    assert_eq!(out.status.code(), Some(0));
    let out = ffmu(&["wcount", "--q", "2", "--x", "6", "--ceiling", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ceiling"));
    let out = ffmu(&[
        "wcount",
        "--q",
        "2",
        "--x",
        "6",
        "--ceiling",
        "4",
        "--force",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_explicit_table_exits_two() {
    let out = ffmu(&[
        "primes",
        "--q",
        "2",
        "--d",
        "3",
        "--table",
        "/nonexistent/t.tbl",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}

#[test]
fn table_build_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q2.tbl");
    let path_str = path.to_str().unwrap();
    let out = ffmu(&[
        "table", "build", "--maxdeg", "8", "--q", "2", "--table", path_str,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(path.exists());
    let out = ffmu(&["table", "verify", "--q", "2", "--table", path_str]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("8,30"), "degree-8 count: {text}");

    // other subcommands pick the cache up
    let out = ffmu(&["factor", "--q", "2", "--poly", "1001", "--table", path_str]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("11,1,1,1"), "{text}");
    assert!(text.contains("111,2,0,1"), "{text}");

    // corrupt a count line and watch verification fail
    let body = std::fs::read_to_string(&path)
        .unwrap()
        .replace("D 2 1", "D 2 2");
    std::fs::write(&path, body).unwrap();
    let out = ffmu(&["table", "verify", "--q", "2", "--table", path_str]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("count mismatch"));
}

#[test]
fn table_dir_env_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffmu_env(
        &["table", "build", "--maxdeg", "6", "--q", "2"],
        "FFMU_TABLE_DIR",
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("ffmu-q2.tbl").exists());
    // subsequent runs load rather than rebuild
    let out = ffmu_env(
        &["primes", "--q", "2", "--d", "4"],
        "FFMU_TABLE_DIR",
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("building"));
}

#[test]
fn series_csv_schema() {
    let out = ffmu(&[
        "series",
        "--q",
        "2",
        "--weight",
        "mu",
        "--x",
        "3",
        "--include-unit",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,numerator,denominator,float_value"));
    assert_eq!(lines.next(), Some("0,1,1,1.0"));
    assert_eq!(lines.next(), Some("1,0,1,0.0"));
}

#[test]
fn qsum_csv_schema() {
    let out = ffmu(&["qsum", "--q", "2", "--k", "1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("n,k,subset,sum,q_to_n,ratio\n"));
    assert!(text.contains("2,1,all,5,4,1.25"), "{text}");
}

#[test]
fn mu_subcommand() {
    let out = ffmu(&["mu", "--q", "2", "--poly", "1001"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1001,1"));
    let out = ffmu(&["mu", "--q", "2", "--poly", "100"]);
    assert!(stdout(&out).contains("100,0"));
}

#[test]
fn smooth_both_methods_and_extension_field() {
    let out = ffmu(&["smooth", "--q", "2", "--n", "5", "--m", "1", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("5,1,2,enumeration,30"), "{text}");
    assert!(text.contains("5,1,2,recurrence,30"), "{text}");

    // built-in GF(4) modulus: both routes agree there too
    let out = ffmu(&["smooth", "--q", "4", "--n", "4", "--m", "2", "--order", "1"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn ext_modulus_flag() {
    // GF(25) via an explicit modulus: x^2 + x + 1 is irreducible over GF(5)
    // (its roots would be primitive cube roots of unity, needing 3 | q - 1)
    let out = ffmu(&["primes", "--q", "25", "--ext-modulus", "1,1,1", "--d", "1"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // header plus the 25 monic linears
    assert_eq!(stdout(&out).lines().count(), 26);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let out = ffmu(&[
        "mertens",
        "--q",
        "2",
        "--n",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.contains("16/3"));
}

#[test]
fn density_stats_csv() {
    let out = ffmu(&[
        "density-stats",
        "--q",
        "2",
        "--subset",
        "list:T",
        "--maxdeg",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("d,e_s,v_s,delta,truncated_at\n"));
    assert!(text.contains("1,1/1,1/2,0/1,5"), "{text}");
}

#[test]
fn stdout_is_machine_readable_only() {
    // progress notes go to stderr; stdout carries just the report
    let out = ffmu(&["primes", "--q", "2", "--d", "4"]);
    let text = stdout(&out);
    assert!(text.starts_with("degree,ordinal,coeffs\n"), "{text}");
    assert_eq!(text.lines().count(), 4, "header plus three quartic primes");
}
