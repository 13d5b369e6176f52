mod common;

use common::*;
use std::path::Path;

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn c(name: &str) -> String {
    s(&corpus(name))
}

#[test]
fn corpus_checks() {
    let (code, out, err) = cli(&["check", &c("theorems_1_5.hol"), &c("symm_trans.hol")]);
    assert_eq!(code, 0, "{}", err);
    assert_eq!(out.lines().filter(|l| l.contains(": ok (")).count(), 6, "{}", out);
    assert!(out.lines().next().unwrap().ends_with("theorems_1_5.hol:4:1: ok (29 steps, 5 clauses, store depth 3)"));
}

#[test]
fn outputs_follow_input_order() {
    let files = ["symm_trans.hol", "and_definition.hol", "theorems_1_5.hol"];
    let args: Vec<String> = std::iter::once("check".to_string()).chain(files.iter().map(|f| c(f))).collect();
    let (_, out, _) = cli(&args);
    let order: Vec<usize> = out
        .lines()
        .map(|l| files.iter().position(|f| l.contains(f)).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] <= w[1]), "{}", out);
}

#[test]
fn libraries_are_checked_before_files() {
    let (code, out, err) = cli(&["--lib", &c("full_library.hol"), "check", &c("theorem5_lib.hol")]);
    assert_eq!(code, 0, "{}", err);
    assert!(out.contains("assoc_inst: ok"));
    assert!(out.contains("theorem5_lib.hol:2:1: ok"));
}

#[test]
fn library_names_need_their_library() {
    let (code, _, err) = cli(&["check", &c("theorem5_lib.hol")]);
    assert_eq!(code, 2);
    assert!(err.contains("undeclared constant `"), "{}", err);
}

#[test]
fn misordered_library_fails_at_trans() {
    let (code, out, err) = cli(&["check", &c("trans_before_symm.hol")]);
    assert_eq!(code, 1);
    assert!(out.contains("trans: FAILED"));
    assert!(err.contains("note: it uses `symm`"), "{}", err);
    let (code, _, err) = cli(&["--lib", &c("trans_before_symm.hol"), "check", &c("and_definition.hol")]);
    assert_eq!(code, 1, "{}", err);
}

#[test]
fn quiet_success_prints_nothing() {
    let (code, out, err) = cli(&["--trace", "quiet", "check", &c("theorems_1_5.hol")]);
    assert_eq!((code, out.as_str(), err.as_str()), (0, "", ""));
}

#[test]
fn trace_lists_the_goal_stack() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.hol");
    std::fs::write(&f, mutations()[0].src.as_str()).unwrap();
    let (code, _, err) = cli(&["--trace", "trace", "check", &s(&f)]);
    assert_eq!(code, 1);
    assert!(err.contains("  1. "), "{}", err);
    assert!(err.contains("could not prove: proves (congr"), "{}", err);
}

#[test]
fn budget_exhaustion_exits_3() {
    let (code, _, err) = cli(&["--budget", "50", "check", &c("theorems_1_5.hol")]);
    assert_eq!(code, 3);
    assert!(err.contains("budget"), "{}", err);
    let (code, _, _) = cli(&["--budget", "0", "check", &c("theorems_1_5.hol")]);
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.hol");
    std::fs::write(&f, "proves refl\n  (eq intty nope nope).").unwrap();
    let (code, _, err) = cli(&["check", &s(&f)]);
    assert_eq!(code, 2);
    assert!(err.starts_with(&format!("{}:2:", s(&f))), "{}", err);
}

#[test]
fn missing_file_is_an_error() {
    let (code, _, err) = cli(&["stats", "/nonexistent/x.hol"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
}

#[test]
fn expand_writes_a_checkable_lemma_free_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.hol");
    let (code, _, _) = cli(&["expand", &c("theorems_1_5.hol")]);
    assert_eq!(code, 2, "-o is required");
    let (code, _, err) = cli(&["expand", &c("theorems_1_5.hol"), "-o", &s(&out)]);
    assert_eq!(code, 0, "{}", err);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains("lemma_pf"));
    assert_eq!(cli(&["check", &s(&out)]).0, 0);
}

#[test]
fn several_outputs_go_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fmt", &c("symm_trans.hol"), &c("and_definition.hol"), "-o", &s(&dir.path().join("x"))];
    assert_eq!(cli(&args).0, 2);
    let (code, _, err) = cli(&["fmt", &c("symm_trans.hol"), &c("and_definition.hol"), "-o", &s(dir.path())]);
    assert_eq!(code, 0, "{}", err);
    assert!(dir.path().join("symm_trans.hol").exists());
    assert!(dir.path().join("and_definition.hol").exists());
}

#[test]
fn fmt_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.hol"), dir.path().join("b.hol"));
    for name in ["theorems_1_5.hol", "symm_assoc_library.hol", "full_library.hol", "theorem7_altdef.hol"] {
        assert_eq!(cli(&["fmt", &c(name), "-o", &s(&a)]).0, 0);
        assert_eq!(cli(&["fmt", &s(&a), "-o", &s(&b)]).0, 0);
        assert_eq!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap(), "{}", name);
    }
}

#[test]
fn package_needs_no_library_afterwards() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.hol");
    let (code, _, err) = cli(&["--lib", &c("full_library.hol"), "package", &c("theorem5_lib.hol"), "-o", &s(&out)]);
    assert_eq!(code, 0, "{}", err);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("def_pf") && text.contains("lemma_pf"));
    let (code, out, err) = cli(&["check", &s(&out)]);
    assert_eq!(code, 0, "{}{}", out, err);
}

#[test]
fn package_keeps_file_entries_out_of_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.hol");
    let mut text = read_corpus("symm_assoc_library.hol");
    text.push_str(&read_corpus("theorem3_lib.hol"));
    std::fs::write(&src, text).unwrap();
    let out = dir.path().join("p.hol");
    let (code, _, err) = cli(&["package", &s(&src), "-o", &s(&out)]);
    assert_eq!(code, 0, "{}", err);
    let packed = std::fs::read_to_string(&out).unwrap();
    assert!(!packed.lines().any(|l| l.starts_with("def_lemma") || l.starts_with("type symm")), "{}", packed);
    assert_eq!(cli(&["check", &s(&out)]).0, 0);
}

#[test]
fn stats_reports_each_statement() {
    let (code, out, _) = cli(&["stats", &c("theorems_1_5.hol")]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].ends_with("nodes 26 (tree 26), lemmas 0, definitions 0, depth 13"));
    assert!(lines[4].contains("lemmas 5, definitions 1"));
}

#[test]
fn duplicate_library_entries_are_rejected() {
    let (code, _, err) = cli(&["--lib", &c("full_library.hol"), "check", &c("symm_then_trans.hol")]);
    assert_eq!(code, 2);
    assert!(err.contains("already in the library"));
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("check"));
}
