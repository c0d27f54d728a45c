//! End-to-end runs of the binary against the shipped corpus: exit codes,
//! report surfaces, and determinism of the machine format.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file)
}

fn descent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descent"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn run_on(file: &str, rest: &[&str]) -> Output {
    let ws = corpus(file);
    let mut args = vec!["--workspace", ws.to_str().unwrap()];
    args.extend_from_slice(rest);
    descent(&args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn every_command_is_clean_on_the_shipped_corpus() {
    for args in [
        vec!["validate"],
        vec!["--instances", "3", "side-conditions"],
        vec!["--max-arity", "2", "transfer-dump"],
        vec!["--max-arity", "2", "linfty-check"],
        vec!["mc-check"],
        vec!["cocycle-check"],
        vec!["solve-mc"],
        vec!["--instances", "5", "main-theorem"],
        vec!["obstruction-naturality"],
    ] {
        let out = run_on("main.json", &args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?} failed:\n{}{}",
            stdout(&out),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn the_naturality_job_reports_a_vanishing_pushed_obstruction() {
    let out = run_on("naturality.json", &["obstruction-naturality"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("source problem obstructed at layer 2"), "{text}");
    assert!(text.contains("every pushed obstruction class vanishes"), "{text}");
    assert!(text.contains("target problem lifts to the full order"), "{text}");
}

#[test]
fn solve_mc_accepts_a_seed_class_and_rejects_unknown_names() {
    let out = run_on("main.json", &["solve-mc", "--seed-class", "circle-loop"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("circle-loop"));

    let out = run_on("main.json", &["solve-mc", "--seed-class", "no-such-element"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn the_corrupted_corpus_aborts_jobs_and_fails_validation() {
    let out = run_on("negative_corrupted_coface.json", &["main-theorem"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("aborted"), "{text}");
    assert!(text.contains("cosimplicial-identity"), "{text}");

    let out = run_on("negative_corrupted_coface.json", &["validate"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("cosimplicial-identity"));
}

#[test]
fn parse_errors_exit_2_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"artin_algebras\": [\n    {\"nam\": }\n").unwrap();
    let out = descent(&["--workspace", path.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");
    assert!(err.contains("column"), "{err}");

    let out = descent(&["--workspace", "/nonexistent/nowhere.json", "validate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn machine_reports_are_byte_identical_across_runs() {
    let args = [
        "main-theorem",
        "--instances",
        "8",
        "--rng-seed",
        "314",
        "--format",
        "machine",
    ];
    let first = run_on("main.json", &args);
    let second = run_on("main.json", &args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.contains("rng-seed: 314"), "{text}");
    assert!(text.lines().all(|l| {
        l.starts_with("info\t") || l.starts_with("violation\t") || l.starts_with("summary\t")
    }));
}
