use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus")).join(name)
}

fn gubsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gubsc"))
        .args(args)
        .env("GUBSC_NO_COLOR", "1")
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let o = gubsc(args);
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

fn c(name: &str) -> String {
    corpus(name).display().to_string()
}

#[test]
fn parse_dumps_the_tree() {
    let (code, out, _) = run(&["parse", &c("sender.gubs")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("program\n"));
    assert!(out.contains("context [Light]"));
    assert_eq!(out.matches("dependence Normal").count(), 3);
}

#[test]
fn parse_errors_exit_one_with_a_caret() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.gubs");
    std::fs::write(&empty, "").unwrap();
    let (code, _, err) = run(&["parse", empty.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("syntax error"), "{err}");

    let bad = dir.path().join("bad.gubs");
    std::fs::write(&bad, "{\n  a => b,\n  c -> \n}").unwrap();
    let (code, _, err) = run(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("4:1"), "{err}");
    assert!(err.ends_with("}\n^\n"), "{err}");
}

#[test]
fn interpret_goldens() {
    let (_, out, _) = run(&["interpret", &c("empty.gubs")]);
    assert_eq!(out, "A(T)\n");
    let (_, out, _) = run(&["interpret", &c("sender.gubs")]);
    assert_eq!(out, include_str!("golden/sender.formula"));
    let (code, out, _) = run(&["interpret", &c("negative_circuit.gubs"), "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dependences"].as_array().unwrap().len(), 4);
}

#[test]
fn check_verdicts_and_exit_codes() {
    let (code, out, _) = run(&["check", &c("unobservable.gubs")]);
    assert_eq!((code, out.as_str()), (2, "UNOBSERVABLE\n"));
    let (code, out, _) = run(&["check", "--mode", "oracle", "--bound", "4", &c("unobservable.gubs")]);
    assert_eq!(code, 2);
    assert!(out.starts_with("UNOBSERVABLE"));
    let (code, out, _) = run(&["check", &c("sender_final.gubs")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("OBSERVABLE\n"));
}

#[test]
fn include_verdicts() {
    let (code, out, _) = run(&["include", &c("empty.gubs"), &c("sender_final.gubs")]);
    assert_eq!((code, out.as_str()), (0, "INCLUDED\n"));
    let (code, out, _) = run(&["include", &c("subnetwork.gubs"), &c("network.gubs")]);
    assert_eq!((code, out.as_str()), (0, "INCLUDED\n"));
    let (code, out, _) = run(&["include", &c("network.gubs"), &c("subnetwork.gubs")]);
    assert_eq!(code, 2);
    assert!(out.starts_with("NOT INCLUDED\ncounterexample:\n"));
    let (code, out, _) = run(&["--mode", "oracle", "include", &c("subnetwork.gubs"), &c("network.gubs")]);
    assert_eq!((code, out.as_str()), (0, "INCONCLUSIVE\n"));
}

#[test]
fn synth_writes_a_derivation_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("sender.json");
    let args = ["synth", &c("sender.gubs"), &c("band_lib.json"), "--out", d.to_str().unwrap()];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    assert!(out.starts_with("assembly: Q1, Q2, Q3\n"), "{out}");
    assert!(out.contains("VERIFIED"));
    let (code, out, _) = run(&["verify", d.to_str().unwrap(), &c("band_lib.json"), &c("sender.gubs")]);
    assert_eq!(code, 0);
    assert!(out.ends_with("VERIFIED\n"));

    let (again, _, _) = run(&args);
    assert_eq!(again, 0);
    let first = run(&["synth", &c("sender.gubs"), &c("band_lib.json"), "--format", "json"]).1;
    let second = run(&["synth", &c("sender.gubs"), &c("band_lib.json"), "--format", "json", "--jobs", "1"]).1;
    assert_eq!(first, second);
}

#[test]
fn synth_without_cover_is_negative() {
    let (code, _, err) = run(&["synth", &c("receiver.gubs"), &c("band_lib.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("no cover"), "{err}");
}

#[test]
fn verify_rejects_a_broken_derivation() {
    let (code, out, _) = run(&[
        "verify",
        &c("receiver_derivation.json"),
        &c("band_lib.json"),
        &c("receiver_parts.gubs"),
    ]);
    assert_eq!(code, 2);
    assert!(out.contains("FAIL root.2.0.0.0 Inst"), "{out}");
    assert!(out.ends_with("REJECTED\n"));
}

#[test]
fn trace_reports_divisions_and_draws_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("t.svg");
    let base = [c("low_mid_high.trace"), c("low_mid_high_chain.gubs"), "obs".to_string()];
    let base: Vec<&str> = base.iter().map(String::as_str).collect();
    let mut args = vec!["trace"];
    args.extend(&base);
    args.extend(["--division", "1,3,6,7", "--out", svg.to_str().unwrap()]);
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    assert!(out.starts_with("(1,3,6,7): CONSISTENT\n"), "{out}");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let mut args = vec!["trace"];
    args.extend(&base);
    args.extend(["--division", "1,3,7"]);
    let (code, out, _) = run(&args);
    assert_eq!((code, out.as_str()), (2, "(1,3,7): INCONSISTENT\n"));

    let mut args = vec!["trace"];
    args.extend(&base);
    args.extend(["--format", "json"]);
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["histories"].as_array().unwrap().iter().any(|h| h["division"] == serde_json::json!([1, 2, 4, 7])));
}

#[test]
fn usage_and_budget_exit_codes() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--bound", "0", "check", &c("empty.gubs")]).0, 1);
    assert_eq!(run(&["check", &c("no_such_file.gubs")]).0, 1);
    let (code, _, err) = run(&["check", "--budget", "3", &c("sender_final.gubs")]);
    assert_eq!(code, 3, "{err}");
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        vec!["interpret".to_string(), c("receiver_final.gubs")],
        vec!["check".to_string(), c("sender_final.gubs")],
        vec!["include".to_string(), c("network.gubs"), c("subnetwork.gubs")],
    ] {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(gubsc(&a).stdout, gubsc(&a).stdout, "{args:?}");
    }
}
