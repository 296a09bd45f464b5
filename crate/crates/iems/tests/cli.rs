//! Exit-code contract of the command-line binary: 0 on success, 1 on a
//! usage/configuration error, 2 on a numerical failure.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_iems"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn success_exits_zero() {
    let (code, stdout, stderr) = run(&["scheme", "--family", "wbdf", "--k", "2", "--param", "2"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("\"family\""), "stdout: {stdout}");

    let (code, stdout, _) = run(&["indicators", "--family", "bdf", "--k", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"intensity\""));
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, stderr) = run(&["scheme", "--family", "nosuch", "--k", "2"]);
    assert_eq!(code, 1, "stderr: {stderr}");

    let (code, _, _) = run(&["scheme", "--family", "wbdf", "--k", "9"]);
    assert_eq!(code, 1);

    let (code, _, _) = run(&["sweep", "--family", "wbdf", "--k", "2", "--param-grid", "bad"]);
    assert_eq!(code, 1);
}

#[test]
fn numerical_failures_exit_two() {
    // Toeplitz section size above the supported cap is a numerical-domain
    // failure, not an argument-parsing one.
    let (code, _, stderr) =
        run(&["verify-toeplitz", "--family", "bdf", "--k", "2", "--n", "100000"]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn converge_reports_slope() {
    let (code, stdout, stderr) = run(&[
        "converge",
        "--problem",
        "p1",
        "--family",
        "wbdf",
        "--k",
        "2",
        "--param",
        "2",
        "--tau",
        "0.02,0.01,0.005,0.0025",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("slope"), "stdout: {stdout}");
    assert!(stdout.contains("PASS"), "stdout: {stdout}");
}
