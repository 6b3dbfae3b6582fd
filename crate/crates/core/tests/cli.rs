use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use magtrace::cli::execute;
use magtrace::config::{parse_config, Format};
use magtrace::report::strip_timestamp;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn magtrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magtrace"))
        .args(args)
        .env("MAGTRACE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn run_to_file(sub: &str, config: &str, extra: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = golden(config);
    let mut args = vec![
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let result = magtrace(&args);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    std::fs::read_to_string(out).unwrap()
}

fn assert_golden_json(sub: &str, config: &str, expected: &str) {
    let got = run_to_file(sub, config, &[]);
    let want = std::fs::read_to_string(golden(expected)).unwrap();
    assert_eq!(strip_timestamp(&got), strip_timestamp(&want));
}

#[test]
fn coeffs_matches_golden() {
    assert_golden_json("coeffs", "coeffs.toml", "coeffs.json");
}

#[test]
fn kunz_matches_golden() {
    assert_golden_json("kunz", "kunz.toml", "kunz.json");
    let csv = run_to_file("kunz", "kunz.toml", &["--format", "csv"]);
    assert_eq!(csv, std::fs::read_to_string(golden("kunz.csv")).unwrap());
}

#[test]
fn verify_count_matches_golden() {
    assert_golden_json("verify", "verify_count.toml", "verify_count.json");
}

#[test]
fn model1d_csv_matches_golden() {
    let csv = run_to_file("model1d", "model1d.toml", &["--format", "csv"]);
    assert_eq!(csv, std::fs::read_to_string(golden("model1d.csv")).unwrap());
}

#[test]
fn invalid_configs_exit_with_one() {
    let bad = golden("bad_field.toml");
    let out = magtrace(&["coeffs", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inf B > 0"));

    let other = golden("coeffs.toml");
    let out = magtrace(&["kunz", "--config", other.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = magtrace(&["coeffs", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn series_cap_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("weak.toml");
    let text = std::fs::read_to_string(golden("bad_field.toml"))
        .unwrap()
        .replace("b0 = -1.0", "b0 = 0.01")
        + "\n[tolerance]\nabs_tol = 1e-10\nk_cap = 10\n";
    std::fs::write(&cfg, text).unwrap();
    let out = magtrace(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn stdout_is_used_without_an_output_path() {
    let cfg = golden("kunz.toml");
    let out = magtrace(&["kunz", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        std::fs::read_to_string(golden("kunz.csv")).unwrap()
    );
}

#[test]
fn library_execution_matches_the_binary() {
    let text = std::fs::read_to_string(golden("kunz.toml")).unwrap();
    let config = parse_config(&text).unwrap();
    let artifact = execute(&config, Some(Format::Csv)).unwrap();
    assert_eq!(
        artifact.text,
        std::fs::read_to_string(golden("kunz.csv")).unwrap()
    );
}
