//! CLI behavior: exit codes and the end-to-end pipeline including the
//! sweep subcommand (byte-level determinism is covered by the acceptance
//! suite).

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_satire-debias")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("CLI binary runs")
}

fn s(p: PathBuf) -> String {
    p.display().to_string()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["train", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    // Unknown flag.
    assert_eq!(run(&["synth", "--no-such-flag"]).status.code(), Some(1));
    // Missing required argument.
    assert_eq!(run(&["eval"]).status.code(), Some(1));
    // Invalid configuration value reaching validation.
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "train",
        "--corpus", "unused.jsonl",
        "--embeddings", "unused.txt",
        "--lambda", "-1",
        "--out-dir", &s(dir.path().join("t")),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "train",
        "--corpus", "unused.jsonl",
        "--embeddings", "unused.txt",
        "--threads", "2",
        "--out-dir", &s(dir.path().join("t")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // Nonexistent corpus file.
    let out = run(&[
        "stats",
        "--corpus", &s(dir.path().join("missing.jsonl")),
        "--out-dir", &s(dir.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn pipeline_with_sweep_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| s(dir.path().join(name));
    let ok = |args: &[&str]| {
        let out = run(args);
        assert!(
            out.status.success(),
            "command {:?} failed:\n{}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    };
    ok(&["synth", "--fixture", "A", "--seed", "11", "--out-dir", &p("synth")]);
    let corpus = p("synth/corpus.jsonl");
    ok(&["stats", "--corpus", &corpus, "--out-dir", &p("stats")]);
    ok(&[
        "pretrain", "--corpus", &corpus, "--dim", "8", "--epochs", "1",
        "--seed", "11", "--out-dir", &p("pre"),
    ]);
    let embeddings = p("pre/embeddings.txt");
    ok(&[
        "sweep", "--corpus", &corpus, "--embeddings", &embeddings,
        "--lambdas", "0.2,0.5", "--hidden", "4", "--attention", "8",
        "--lr", "0.001", "--max-epochs", "2", "--seed", "11",
        "--out-dir", &p("sweep"),
    ]);
    let report = std::fs::read_to_string(dir.path().join("sweep/sweep_report.txt")).unwrap();
    assert!(report.contains("lambda=0.2"));
    assert!(report.contains("lambda=0.5"));
    assert!(report.contains("*best*"));
    for f in [
        "model_lambda_0.2.json",
        "model_lambda_0.2.bin",
        "model_lambda_0.5.json",
        "model_lambda_0.5.bin",
        "run_manifest.json",
    ] {
        assert!(dir.path().join("sweep").join(f).exists(), "missing sweep output {f}");
    }
    ok(&[
        "eval", "--corpus", &corpus,
        "--checkpoint", &p("sweep/model_lambda_0.2"),
        "--split", "dev", "--out-dir", &p("eval"),
    ]);
    let metrics = std::fs::read_to_string(dir.path().join("eval/metrics.json")).unwrap();
    assert!(metrics.contains("satire"));
    ok(&[
        "attend", "--corpus", &corpus,
        "--checkpoints", &p("sweep/model_lambda_0.2"),
        "--ids", "regA-0000", "--format", "ansi", "--out-dir", &p("attend"),
    ]);
    assert!(dir.path().join("attend/attention.txt").exists());
}
