//! End-to-end tests of the command-line binary: file round-trips, exit
//! codes, and the gen → run → check pipeline.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperkog"));
    cmd.env_remove("HYPERKOG_TASKS");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("failed to spawn the binary")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn gen_problem(dir: &Path, name: &str, order: u32, field: &str, range: u32, seed: u64) {
    let out = run(bin().args([
        "gen",
        "--order",
        &order.to_string(),
        "--field",
        field,
        "--range",
        &range.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        dir.join(name).to_str().unwrap(),
    ]));
    assert_exit(&out, 0);
}

#[test]
fn gen_is_deterministic_and_writes_planted_values() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "a.jkog", 16, "r", 2, 7);
    gen_problem(dir.path(), "b.jkog", 16, "r", 2, 7);
    assert_eq!(
        fs::read(dir.path().join("a.jkog")).unwrap(),
        fs::read(dir.path().join("b.jkog")).unwrap()
    );
    assert_eq!(
        fs::read(dir.path().join("a.lambda")).unwrap(),
        fs::read(dir.path().join("b.lambda")).unwrap()
    );
    let lambda = fs::read_to_string(dir.path().join("a.lambda")).unwrap();
    assert_eq!(lambda.lines().count(), 16);
}

#[test]
fn gen_range_one_has_an_all_plus_sign_line() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "p.jkog", 8, "c", 1, 3);
    let text = fs::read_to_string(dir.path().join("p.jkog")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "JKOG 1 C 8");
    assert_eq!(lines.next().unwrap().split_whitespace().count(), 8);
    assert!(text.lines().nth(1).unwrap().split_whitespace().all(|t| t == "+1"));
}

#[test]
fn gen_validates_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.jkog");
    let out = run(bin().args([
        "gen", "--order", "1", "--field", "r", "--range", "1", "--seed", "0", "--out",
        out_path.to_str().unwrap(),
    ]));
    assert_exit(&out, 1);
    let out = run(bin().args([
        "gen", "--order", "4", "--field", "r", "--range", "7", "--seed", "0", "--out",
        out_path.to_str().unwrap(),
    ]));
    assert_exit(&out, 1);
    let out = run(bin().args(["gen", "--bogus-flag"]));
    assert_exit(&out, 1);
    let out = run(bin().arg("--help"));
    assert_exit(&out, 0);
}

#[test]
fn run_writes_results_and_check_accepts_them() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "g.jkog", 16, "c", 2, 42);
    let out_dir = dir.path().join("res");
    let out = run(bin().args([
        "run",
        "--input",
        dir.path().join("g.jkog").to_str().unwrap(),
        "--vectors",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 0);

    let sigma = fs::read_to_string(out_dir.join("sigma.txt")).unwrap();
    assert_eq!(sigma.lines().count(), 16);
    let stats = fs::read_to_string(out_dir.join("stats.txt")).unwrap();
    for key in ["steps=", "multisteps=", "cycles=", "off_initial=", "off_final=", "outcome=", "upsilon="] {
        assert!(stats.contains(key), "stats missing {key}: {stats}");
    }
    assert!(out_dir.join("u.jkog").exists());
    assert!(out_dir.join("v_inv.jkog").exists());

    let out = run(bin().args([
        "check",
        "--input",
        dir.path().join("g.jkog").to_str().unwrap(),
        "--result-dir",
        out_dir.to_str().unwrap(),
        "--planted",
        dir.path().join("g.lambda").to_str().unwrap(),
    ]));
    assert_exit(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("err_decomp="));
    assert!(text.contains("err_eigen="));
    assert!(text.contains("cycles="));
}

#[test]
fn run_without_vectors_skips_the_factor_files() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "g.jkog", 8, "r", 1, 5);
    let out_dir = dir.path().join("res");
    let out = run(bin().args([
        "run",
        "--input",
        dir.path().join("g.jkog").to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 0);
    assert!(out_dir.join("sigma.txt").exists());
    assert!(!out_dir.join("u.jkog").exists());
    assert!(!out_dir.join("v_inv.jkog").exists());
}

#[test]
fn conforming_diagonal_input_takes_zero_steps() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.jkog");
    fs::write(&input, "JKOG 1 R 2\n+1 +1\n2e0 0e0\n0e0 1e0\n").unwrap();
    let out_dir = dir.path().join("res");
    let out = run(bin().args([
        "run",
        "--input",
        input.to_str().unwrap(),
        "--vectors",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 0);
    let stats = fs::read_to_string(out_dir.join("stats.txt")).unwrap();
    assert!(stats.contains("steps=0"));
    assert!(stats.contains("outcome=no_candidates"));
}

#[test]
fn upsilon_is_validated_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "g.jkog", 8, "r", 2, 9);
    let input = dir.path().join("g.jkog");
    let out_dir = dir.path().join("res");
    let out = run(bin().args([
        "run",
        "--input",
        input.to_str().unwrap(),
        "--upsilon",
        "0.75",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 0);
    let stats = fs::read_to_string(out_dir.join("stats.txt")).unwrap();
    assert!(stats.contains("upsilon=7.5e-1"), "stats: {stats}");

    let out = run(bin().args([
        "run",
        "--input",
        input.to_str().unwrap(),
        "--upsilon",
        "1.5",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 1);
}

#[test]
fn exhausted_budget_exits_two_with_stats_written() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "g.jkog", 16, "c", 2, 1);
    let out_dir = dir.path().join("res");
    let out = run(bin().args([
        "run",
        "--input",
        dir.path().join("g.jkog").to_str().unwrap(),
        "--max-sweeps",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 2);
    let stats = fs::read_to_string(out_dir.join("stats.txt")).unwrap();
    assert!(stats.contains("outcome=sweep_limit"), "stats: {stats}");
}

#[test]
fn tasks_come_from_the_flag_or_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "g.jkog", 12, "c", 2, 77);
    let input = dir.path().join("g.jkog");

    let run_with = |tag: &str, setup: &dyn Fn(&mut Command)| {
        let out_dir = dir.path().join(tag);
        let mut cmd = bin();
        cmd.args([
            "run",
            "--input",
            input.to_str().unwrap(),
            "--vectors",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        setup(&mut cmd);
        assert_exit(&run(&mut cmd), 0);
        fs::read(out_dir.join("sigma.txt")).unwrap()
    };

    let flag = run_with("flag", &|cmd| {
        cmd.args(["--tasks", "3"]);
    });
    let env = run_with("env", &|cmd| {
        cmd.env("HYPERKOG_TASKS", "3");
    });
    let default = run_with("default", &|_| {});
    assert_eq!(flag, env);
    assert_eq!(flag, default);

    let out = run(bin()
        .args([
            "run",
            "--input",
            input.to_str().unwrap(),
            "--out-dir",
            dir.path().join("bad").to_str().unwrap(),
        ])
        .env("HYPERKOG_TASKS", "many"));
    assert_exit(&out, 1);
}

#[test]
fn check_distinguishes_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    gen_problem(dir.path(), "g.jkog", 8, "r", 2, 13);
    let input = dir.path().join("g.jkog");
    let out_dir = dir.path().join("res");
    let out = run(bin().args([
        "run",
        "--input",
        input.to_str().unwrap(),
        "--vectors",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 0);

    // Numerical failure: a tampered σ pushes the residual over tolerance.
    let sigma_path = out_dir.join("sigma.txt");
    let mut sigma: Vec<f64> = fs::read_to_string(&sigma_path)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    sigma[0] += 0.25;
    let tampered: String = sigma.iter().map(|v| format!("{v:e}\n")).collect();
    fs::write(&sigma_path, tampered).unwrap();
    let out = run(bin().args([
        "check",
        "--input",
        input.to_str().unwrap(),
        "--result-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert_exit(&out, 2);

    // I/O failure: the planted file does not exist.
    let out = run(bin().args([
        "check",
        "--input",
        input.to_str().unwrap(),
        "--result-dir",
        out_dir.to_str().unwrap(),
        "--planted",
        dir.path().join("missing.lambda").to_str().unwrap(),
    ]));
    assert_exit(&out, 3);

    // Validation failure: planted eigenvalue count disagrees.
    let short = dir.path().join("short.lambda");
    fs::write(&short, "5e-1\n-2.5e-1\n").unwrap();
    let out = run(bin().args([
        "check",
        "--input",
        input.to_str().unwrap(),
        "--result-dir",
        out_dir.to_str().unwrap(),
        "--planted",
        short.to_str().unwrap(),
    ]));
    assert_exit(&out, 1);
}

#[test]
fn malformed_inputs_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.jkog");
    fs::write(&input, "WRONG 1 R 2\n+1 +1\n1e0 0e0\n0e0 1e0\n").unwrap();
    let out = run(bin().args([
        "run",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().join("res").to_str().unwrap(),
    ]));
    assert_exit(&out, 1);

    let out = run(bin().args([
        "run",
        "--input",
        dir.path().join("absent.jkog").to_str().unwrap(),
        "--out-dir",
        dir.path().join("res").to_str().unwrap(),
    ]));
    assert_exit(&out, 3);
}
