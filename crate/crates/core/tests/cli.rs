mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::*;
use fofkit::analysis::smoke_parse_dot;

fn fofkit(args: &[&str]) -> Output {
    fofkit_env(args, &[])
}

fn fofkit_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fofkit"));
    cmd.args(args).current_dir(env!("CARGO_MANIFEST_DIR"));
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// `(id, status)` from `id<TAB>status<TAB>seconds` lines.
fn verdicts(o: &Output) -> Vec<(String, String)> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with("summary\t"))
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 3, "{l}");
            assert!(cols[2].parse::<f64>().is_ok(), "{l}");
            (cols[0].to_owned(), cols[1].to_owned())
        })
        .collect()
}

fn no_machine_lines_on_stderr(o: &Output) {
    for l in stderr(o).lines() {
        assert!(l.split('\t').count() < 3, "machine line on stderr: {l}");
    }
}

#[test]
fn tautologies_check() {
    let o = fofkit(&["check", "tests/fixtures/tautologies.p"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = verdicts(&o);
    assert_eq!(v.len(), 2);
    assert!(v.iter().all(|(_, s)| s == "Proved"));
    assert!(stdout(&o).contains("summary\tproved=2\tfailed=0\tnot_attempted=0\tskipped=0"));
    no_machine_lines_on_stderr(&o);
}

#[test]
fn stop_on_failure_leaves_the_rest_unattempted() {
    let o = fofkit(&["check", "tests/fixtures/unprovable.p", "--stop-on-failure", "--timeout", "2"]);
    assert_eq!(code(&o), 1);
    let v = verdicts(&o);
    assert_eq!(v[0].0, "l1");
    assert_ne!(v[0].1, "Proved");
    assert_eq!(v[1..], [("l2".into(), "NotAttempted".into()), ("l3".into(), "NotAttempted".into())]);
    no_machine_lines_on_stderr(&o);
}

#[test]
fn failure_without_stop_still_proves_independent_lemmas() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("indep.p");
    fs::write(
        &script,
        format!("{}tpi(r, restrict_premises, l2 => [ax]).\n", read_fixture("unprovable.p")),
    )
    .unwrap();
    let status = |o: &Output, id: &str| verdicts(o).into_iter().find(|(i, _)| i == id).unwrap().1;
    let o = fofkit(&["check", script.to_str().unwrap(), "--timeout", "2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(status(&o, "l2"), "Proved");
    // l3 needs l1, which failed
    assert_eq!(status(&o, "l3"), "NotAttempted");
    let o = fofkit(&["check", script.to_str().unwrap(), "--timeout", "2", "--stop-on-failure"]);
    assert_eq!(status(&o, "l2"), "NotAttempted");
}

#[test]
fn from_limits_the_tasks() {
    let o = fofkit(&["check", "tests/fixtures/three_lemmas.p", "--from", "l2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ids: Vec<String> = verdicts(&o).into_iter().map(|(i, _)| i).collect();
    assert_eq!(ids, ["l2", "l3"]);
    assert!(stdout(&o).contains("skipped=1"));
    let bad = fofkit(&["check", "tests/fixtures/three_lemmas.p", "--from", "nope"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.p");
    fs::write(&broken, "fof(a, axiom, p &).\n").unwrap();
    let o = fofkit(&["check", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("1:"), "{}", stderr(&o));
    assert_eq!(code(&fofkit(&["check", "tests/fixtures/missing.p"])), 2);
    assert_eq!(code(&fofkit(&["frobnicate"])), 2);
    assert_eq!(code(&fofkit(&["gen-spec", "-n", "1"])), 2);
    assert_eq!(code(&fofkit(&["gen-run", "-n", "2", "-k", "2", "--schedule", "1,3"])), 2);
    assert_eq!(code(&fofkit(&["gen-run", "-n", "2", "-k", "3", "--schedule", "1,2"])), 2);
    assert_eq!(code(&fofkit(&["check", "tests/fixtures/tautologies.p", "--backend", "nope"])), 2);
}

fn assert_same_dir(got: &Path, golden: &Path) {
    let mut names: Vec<_> = fs::read_dir(golden).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut got_names: Vec<_> = fs::read_dir(got).unwrap().map(|e| e.unwrap().file_name()).collect();
    got_names.sort();
    assert_eq!(got_names, names);
    for n in names {
        assert_eq!(
            fs::read_to_string(got.join(&n)).unwrap(),
            fs::read_to_string(golden.join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn export_matches_golden_and_tasks_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tasks");
    let o = fofkit(&["export", "tests/fixtures/pipeline.p", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_same_dir(&out, &fixture_dir().join("golden/pipeline"));
    for task in ["l1.p", "l2.p"] {
        let o = fofkit(&["check", out.join(task).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{task}: {}", stderr(&o));
        assert_eq!(verdicts(&o).len(), 1);
    }
    let from = dir.path().join("from");
    let o = fofkit(&["export", "--from", "l2", "tests/fixtures/pipeline.p", from.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_same_dir(&from, &fixture_dir().join("golden/pipeline_from_l2"));
}

#[test]
fn export_to_unwritable_place_exits_2() {
    let o = fofkit(&["export", "tests/fixtures/pipeline.p", "tests/fixtures/pipeline.p/inside"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot write"), "{}", stderr(&o));
}

#[test]
fn plan_lists_premises() {
    let o = fofkit(&["plan", "tests/fixtures/pipeline.p"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "l1\tax_rule,ax_a,def_r\t\nl2\tdef_r,l1,ax_a\tl1\n");
}

#[test]
fn viz_modes() {
    let o = fofkit(&["viz", "--mode", "overview", "tests/fixtures/derivations/pipeline", "--script", "tests/fixtures/pipeline.p"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dot = smoke_parse_dot(&stdout(&o)).unwrap();
    assert!(dot.edges.contains(&("l1".into(), "l2".into())));
    let o = fofkit(&["viz", "corpus/derivation_e.tstp"]);
    assert_eq!(code(&o), 0);
    assert_eq!(smoke_parse_dot(&stdout(&o)).unwrap().edges.len(), 7);
    assert!(stderr(&o).contains("skipped 4"));
    let o = fofkit(&["viz", "--mode", "detail", "tests/fixtures/derivations/pipeline"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unused_buckets() {
    let o = fofkit(&["unused", "--script", "tests/fixtures/pipeline.p", "tests/fixtures/derivations/pipeline/l2.tstp"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "base\tax_rule\n");
    let o = fofkit(&["unused", "--script", "tests/fixtures/pipeline.p"]);
    assert_eq!(stdout(&o), "lemma\tdef_r\nlemma\tl1\nlemma\tl2\nbase\tax_rule\nbase\tax_a\n");
    assert!(stderr(&o).contains("no derivations"));
}

#[test]
fn expand_prints_the_transformed_script() {
    let o = fofkit(&["expand", "tests/fixtures/expand.p"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("fof(l1, checked_lemma, q(a) | s(a))."));
    assert!(!stdout(&o).contains("expand_definitions_in"));
    let o = fofkit(&["expand", "tests/fixtures/expand.p", "--def", "nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn generated_spec_checks_and_run_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.p");
    let o = fofkit(&["gen-spec", "-n", "2", "--invariant", "tests/fixtures/invariant_n2.p", "-o", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = fofkit(&["check", spec.to_str().unwrap(), "-j", "4", "--timeout", "30"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("skipped=3"));

    let run = dir.path().join("run.model");
    let o = fofkit(&["gen-run", "-n", "2", "-k", "12", "--schedule", "1,2,1,2,1,2,1,2,1,2,1,2", "-o", run.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&run).unwrap(), read_fixture("run_n2_k12.model"));
    let o = fofkit(&["eval", "--spec", spec.to_str().unwrap(), "--model", run.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "false: 0"));

    // a run where turn names a location falsifies range_turn
    let text = fs::read_to_string(&run).unwrap().replace("fun turn(t3) = a1", "fun turn(t3) = loc_remainder");
    let bad = dir.path().join("bad.model");
    fs::write(&bad, text).unwrap();
    let o = fofkit(&["eval", "--spec", spec.to_str().unwrap(), "--model", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("false\trange_turn"));

    let o = fofkit(&["eval", "--model", run.to_str().unwrap(), "--formula", "safe_for(next_moment(next_moment(initial)),a1,a2)"]);
    assert_eq!((code(&o), stdout(&o)), (0, "true\n".to_owned()));
}

#[test]
fn external_backend_from_config() {
    let cfg = "tests/fixtures/fake_backends.tsv";
    let o = fofkit(&["check", "tests/fixtures/tautologies.p", "--backend-config", cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = fofkit_env(
        &["check", "tests/fixtures/tautologies.p", "--backend-config", cfg, "--backend", "fake"],
        &[("FAKE_STATUS", "CounterSatisfiable")],
    );
    assert_eq!(code(&o), 1);
    assert_eq!(
        verdicts(&o),
        [("excluded_middle".into(), "Refuted".into()), ("contraposition".into(), "NotAttempted".into())]
    );
    no_machine_lines_on_stderr(&o);
}

#[test]
fn parallel_summary_is_in_script_order() {
    let o = fofkit(&["check", "tests/fixtures/three_lemmas.p", "-j", "3"]);
    assert_eq!(code(&o), 0);
    let err = stderr(&o);
    let table: Vec<&str> = err
        .lines()
        .skip_while(|l| !l.starts_with("task "))
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(table, ["l1", "l2", "l3"]);
}
