mod common;

use std::process::Command;

use common::*;
use schematic::checker::{default_pool, soundness_harness, ReplayReason};
use schematic::engine::{ProofTree, Step};
use schematic::frontend::session::{Session, SessionError};
use schematic::tactics::TacticError;

fn read(file: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(file)).unwrap()
}

fn batch(file: &str) -> Session {
    let mut s = Session::new(corpus_dir());
    s.load_file(&corpus_dir().join(file)).unwrap();
    s
}

/// Feeds the file one line at a time, as the REPL does.
fn interactive(file: &str) -> Session {
    let mut s = Session::new(corpus_dir());
    let mut buffer = String::new();
    for line in read(file).lines() {
        buffer.push_str(line);
        buffer.push('\n');
        let code = line.split('%').next().unwrap_or("").trim_end();
        if code.ends_with('.') {
            s.exec(&std::mem::take(&mut buffer)).unwrap();
        }
    }
    if s.pending.is_some() {
        s.exec("Qed.").unwrap();
    }
    s
}

#[test]
fn batch_and_interactive_loading_agree() {
    for file in ["gappend.thm", "lists.thm", "spec_append.thm"] {
        assert_eq!(batch(file).summary(), interactive(file).summary(), "{file}");
    }
}

fn drop_case(tree: &mut ProofTree) -> bool {
    if matches!(tree.step, Step::DefL { .. }) && tree.children.len() >= 2 {
        tree.children.pop();
        if tree.cases.len() > tree.children.len() {
            tree.cases.pop();
        }
        return true;
    }
    tree.children.iter_mut().any(drop_case)
}

#[test]
fn replay_rejects_a_proof_missing_a_case() {
    let s = batch("gappend.thm");
    let mut proof = s.theorems["append_det"].proof.clone();
    assert!(drop_case(&mut proof));
    let report = soundness_harness(&s.sig, &s.lemmas, &s.proved_lemmas(), "append_det", &proof, &default_pool());
    assert!(!report.ok());
    for a in &report.assignments {
        let err = a.result.as_ref().unwrap_err();
        assert!(matches!(err.reason, ReplayReason::CaseCount { expected: 2, found: 1 }), "{err}");
    }
}

#[test]
fn replay_rejects_admitted_proofs() {
    let mut s = Session::new(corpus_dir());
    s.load_text(&read("gappend.thm").replace("apply IH to H3 H4. case H5. search.", "skip.")).unwrap();
    assert!(s.theorems["append_det"].admitted());
    let report = &s.replay_all(&default_pool())[0];
    assert!(report.assignments.iter().all(|a| matches!(a.result.as_ref().unwrap_err().reason, ReplayReason::Admitted)));
}

#[test]
fn batch_loading_requires_complete_proofs() {
    let mut s = Session::new(corpus_dir());
    let text = read("gappend.thm").replace("case H5. search.\nQed.", "");
    assert!(matches!(s.load_text(&text), Err(SessionError::Incomplete(n)) if n == "append_det"));
}

#[test]
fn interactive_errors() {
    let mut s = Session::new(corpus_dir());
    assert!(matches!(s.exec("intros."), Err(SessionError::NoTheorem)));
    s.exec("Kind i type. Theorem t : forall (x : i), x = x.").unwrap();
    assert!(matches!(s.undo(), Err(SessionError::Tactic { error: TacticError::NothingToUndo, .. })));
    s.exec("intros. search.").unwrap();
    assert!(matches!(s.exec("search."), Err(SessionError::Tactic { error: TacticError::NoOpenGoals, .. })));
    assert_eq!(s.exec("Qed.").unwrap(), "t proved.\n");
    assert!(matches!(s.exec("Theorem t : true."), Err(SessionError::DuplicateTheorem { .. })));
}

#[test]
fn unify_text_reports_bindings() {
    let mut s = Session::default();
    s.load_text(FO_DECLS).unwrap();
    let b = s.unify_text("f X (g Y)", "f (g a) Z").unwrap();
    let shown: Vec<String> = b.iter().map(|(x, t)| format!("{x} := {t}")).collect();
    assert_eq!(shown, ["X := g a", "Y := Y", "Z := g Y"]);
    assert!(s.unify_text("f X X", "f a b").is_err());
    assert!(s.unify_text("X", "g X").is_err());
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_schematic")).args(args).current_dir(corpus_dir()).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let (code, out) = cli(&["check", "gappend.thm", "--replay-types", "i, list i, i -> i"]);
    assert_eq!(code, 0);
    assert!(out.contains("append_det: 3/3 replay(s) ok"), "{out}");
    assert_eq!(cli(&["check", "keq.thm"]).0, 1);
    assert_eq!(cli(&["check", "disjunction.thm"]).0, 1);
    let wf = wf_dir().join("negative_occurrence.thm");
    assert_eq!(cli(&["check", wf.to_str().unwrap()]).0, 2);
}

#[test]
fn cli_check_json() {
    let (code, out) = cli(&["check", "lists.thm", "--json", "--replay-types", "i"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["theorems"].as_array().unwrap().len(), 12);
}

#[test]
fn cli_run_spec_and_unify() {
    let (code, out) = cli(&["run-spec", "append", "--query", "append (a :: nil) (b :: nil) L"]);
    assert_eq!((code, out.as_str()), (0, "yes\nL = a :: b :: nil\n"));
    let (code, out) = cli(&["run-spec", "member.mod", "--query", "member c (a :: b :: nil)"]);
    assert_eq!((code, out.as_str()), (1, "no (depth 10)\n"));
    let (code, out) = cli(&["unify", "cons X nil", "cons Y L", "--file", "lists.thm"]);
    assert_eq!((code, out.as_str()), (0, "X := Y\nY := Y\nL := nil\n"));
    let (code, _) = cli(&["unify", "cons X nil", "nil", "--file", "lists.thm"]);
    assert_eq!(code, 1);
}

#[test]
fn repl_transcript() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_schematic"))
        .arg("repl")
        .current_dir(corpus_dir())
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"Kind i type.\nTheorem t : forall (x : i),\n  x = x.\nundo.\nintros.\nundo.\nintros. search.\nsearch.\nQed.\n")
        .unwrap();
    let out = String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap();
    assert!(out.contains("nothing to undo"), "{out}");
    assert!(out.contains("Proof completed."), "{out}");
    assert!(out.contains("no open subgoals"), "{out}");
    assert!(out.ends_with("t proved.\n"), "{out}");
}
