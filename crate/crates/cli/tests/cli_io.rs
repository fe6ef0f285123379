//! End-to-end behavior of the binary: exit codes, config-file precedence,
//! tolerance overrides, and output artifacts.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ymloop")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("ymloop-cli-io").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn pass_exit_code_and_outputs() {
    let out = tmp("pass");
    let status = Command::new(bin())
        .args(["--out", out.to_str().unwrap(), "compact-oracle"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("compact-oracle.json").exists());
    assert!(out.join("compact-oracle.csv").exists());
    let csv = std::fs::read_to_string(out.join("compact-oracle.csv")).unwrap();
    assert!(csv.starts_with("schema_version,"));
    assert!(csv.lines().count() >= 4);
}

#[test]
fn verdict_failure_exit_code() {
    // An unreachable tolerance turns a passing check into a verdict
    // failure: exit code 2, not a runtime error.
    let out = tmp("verdict");
    let status = Command::new(bin())
        .args([
            "--out",
            out.to_str().unwrap(),
            "--tolerance",
            "compact=1e-20",
            "compact-oracle",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn runtime_error_exit_code_and_diagnostics() {
    let out = tmp("error");
    let output = Command::new(bin())
        .args(["--out", out.to_str().unwrap(), "--group", "so3", "heat-check"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("so3"), "diagnostic should name the bad value: {err}");

    // Malformed config files are reported with file and line.
    let cfg = out.join("bad.cfg");
    std::fs::write(&cfg, "steps = twelve\n").unwrap();
    let output = Command::new(bin())
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "compact-oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("bad.cfg:1"), "wanted line diagnostics, got: {err}");
}

#[test]
fn config_file_applies_and_cli_overrides() {
    let out = tmp("config");
    let cfg = out.join("exp.cfg");
    std::fs::write(
        &cfg,
        format!(
            "group = u1\nsteps = 48\nsamples = 4000\nseed = 5\nout = {}\n",
            out.join("from-file").display()
        ),
    )
    .unwrap();
    let status = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "bridge-check"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json =
        std::fs::read_to_string(out.join("from-file").join("bridge-check.json")).unwrap();
    assert!(json.contains("\"group\": \"u1\""));
    assert!(json.contains("\"steps\": 48"));

    // CLI flags take precedence over the file.
    let status = Command::new(bin())
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--group",
            "su2",
            "--out",
            out.join("cli-wins").to_str().unwrap(),
            "--samples",
            "2000",
            "bridge-check",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json = std::fs::read_to_string(out.join("cli-wins").join("bridge-check.json")).unwrap();
    assert!(json.contains("\"group\": \"su2\""));
}

#[test]
fn reduce_verify_dumps_field_ensemble() {
    let out = tmp("fields");
    let status = Command::new(bin())
        .args([
            "--out",
            out.to_str().unwrap(),
            "--group",
            "u1",
            "--steps",
            "32",
            "--samples",
            "2000",
            "reduce-verify",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let dump = std::fs::read_to_string(out.join("reduce-verify-fields.txt")).unwrap();
    assert!(dump.starts_with("# ymloop field ensemble v1"));
    // 10 fields x 32 slices x 1 component.
    let rows = dump.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 10 * 32);
}
