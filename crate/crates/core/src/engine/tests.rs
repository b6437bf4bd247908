use std::path::Path;
use std::time::Duration;

use super::*;
use crate::prover::{Builtin, Status};
use crate::syntax::{parse_formula, parse_script, Formula};

fn script(text: &str) -> ProofScript {
    parse_script(text, Path::new(".")).unwrap()
}

fn planned(text: &str) -> Plan {
    plan(&script(text)).unwrap()
}

fn premises<'p>(p: &'p Plan, id: &str) -> Vec<&'p str> {
    p.task(id).unwrap().premise_names()
}

const PIPELINE: &str = "
fof(a, axiom, p(c)).
fof(l1, checked_lemma, ?[X]: p(X)).
fof(l2, checked_lemma, p(c) | q).
";

#[test]
fn lemmas_accumulate_in_the_pool() {
    let p = planned(PIPELINE);
    assert_eq!(p.task_ids(), ["l1", "l2"]);
    assert_eq!(premises(&p, "l1"), ["a"]);
    assert_eq!(premises(&p, "l2"), ["a", "l1"]);
    assert!(p.tasks.iter().flat_map(|t| &t.premises).all(|s| s.role == Role::Axiom));
    assert_eq!(p.task("l2").unwrap().conjecture.role, Role::Conjecture);
    assert_eq!(p.task("l2").unwrap().depends_on, ["l1"]);
}

const SAFETY: &str = "fof(define_safety_for, checked_definition, ![T,A1,A2]: (safe_for(T,A1,A2)<=>((active_state(T,A1)=criticalSection & active_state(T,A2)=criticalSection) => A1=A2))).";

fn safety_script(extra: &str) -> String {
    format!(
        "fof(sig, axiom, ![T,A]: (active_state(T,A) = criticalSection | active_state(T,A) != criticalSection)).\n{SAFETY}\n{extra}"
    )
}

#[test]
fn definitions_join_the_pool_without_a_task() {
    let p = planned(&safety_script("fof(l, checked_lemma, ![T,A]: safe_for(T,A,A)).\n"));
    assert_eq!(p.task_ids(), ["l"]);
    assert_eq!(premises(&p, "l"), ["sig", "define_safety_for"]);
    assert!(p.symbol_table.contains_name("safe_for"));
}

#[test]
fn redefinition_is_rejected_with_position() {
    let text = format!("{}\nfof(again, checked_definition, ![T,A1,A2]: (safe_for(T,A1,A2) <=> $true)).", safety_script(""));
    let err = plan(&script(&text)).unwrap_err();
    assert!(matches!(err, PlanError::Definition { source: DefinitionError::HeadKnown { .. }, .. }), "{err}");
    assert!(err.to_string().starts_with("4:1: "), "{err}");
}

#[test]
fn assume_valid_skips_earlier_lemmas_only() {
    let p = planned(
        "fof(a, axiom, p).
         fof(l1, checked_lemma, p).
         tpi(av, assume_previous_valid, all).
         fof(l2, checked_lemma, p | q).",
    );
    assert_eq!(p.task_ids(), ["l2"]);
    assert_eq!(p.skipped, ["l1"]);
    assert_eq!(premises(&p, "l2"), ["a", "l1"]);
    assert!(p.task("l2").unwrap().depends_on.is_empty());
}

#[test]
fn assume_valid_edge_cases() {
    let first = planned("tpi(av, assume_previous_valid, all).\nfof(a, axiom, p).\nfof(l1, checked_lemma, p).");
    assert_eq!(first.task_ids(), ["l1"]);
    assert!(first.skipped.is_empty());
    let twice = planned(
        "fof(l1, checked_lemma, $true).
         tpi(av1, assume_previous_valid, all).
         tpi(av2, assume_previous_valid, all).
         fof(l2, checked_lemma, $true).",
    );
    assert_eq!(twice.skipped, ["l1"]);
    assert_eq!(twice.task_ids(), ["l2"]);
}

#[test]
fn assume_valid_leaves_later_premises_alone() {
    let base = planned(PIPELINE);
    let with = planned(&PIPELINE.replace("fof(l2", "tpi(av, assume_previous_valid, all).\nfof(l2"));
    assert_eq!(with.task("l2").unwrap().premises, base.task("l2").unwrap().premises);
}

#[test]
fn from_acts_as_assume_before_the_lemma() {
    let text = format!("{PIPELINE}fof(l3, checked_lemma, q | ~q).\n");
    let p = plan_with(&script(&text), &PlanOptions { from: Some("l2".into()) }).unwrap();
    assert_eq!(p.task_ids(), ["l2", "l3"]);
    assert_eq!(p.skipped, ["l1"]);
    let bad = plan_with(&script(&text), &PlanOptions { from: Some("a".into()) });
    assert!(matches!(bad, Err(PlanError::UnknownFrom(_))));
}

#[test]
fn restriction_replaces_the_pool() {
    let p = planned(&format!("{PIPELINE}tpi(r, restrict_premises, l2 => [a]).\n"));
    assert_eq!(premises(&p, "l2"), ["a"]);
    assert_eq!(premises(&p, "l1"), ["a"]);
    assert!(p.task("l2").unwrap().depends_on.is_empty());
}

#[test]
fn restriction_to_the_full_pool_changes_nothing() {
    let base = planned(PIPELINE);
    let full = planned(&format!("{PIPELINE}tpi(r, restrict_premises, l2 => [a, l1]).\n"));
    assert_eq!(base.tasks, full.tasks);
}

#[test]
fn restriction_errors() {
    let early = plan(&script(&format!("{PIPELINE}tpi(r, restrict_premises, l1 => [l1]).\n"))).unwrap_err();
    assert!(matches!(&early, PlanError::PremiseNotAvailable { premise, .. } if premise == "l1"), "{early}");
    assert!(early.to_string().contains("not yet available"));
    let later = plan(&script(&format!("{PIPELINE}tpi(r, restrict_premises, l1 => [l2]).\n"))).unwrap_err();
    assert!(matches!(later, PlanError::PremiseNotAvailable { .. }));
    let unknown = plan(&script(&format!("{PIPELINE}tpi(r, restrict_premises, nope => [a]).\n"))).unwrap_err();
    assert!(matches!(unknown, PlanError::UnknownName { .. }));
    let axiom = plan(&script(&format!("{PIPELINE}tpi(r, restrict_premises, a => []).\n"))).unwrap_err();
    assert!(matches!(axiom, PlanError::NotALemma { .. }));
}

#[test]
fn expansion_rewrites_before_tasking() {
    let p = planned(&safety_script(
        "fof(l, checked_lemma, ![T,A,B]: (safe_for(T,A,B) | ~safe_for(T,A,B))).\n\
         tpi(x, expand_definitions_in, l => [define_safety_for]).\n",
    ));
    let conj = p.task("l").unwrap().conjecture.formula.to_string();
    assert!(!conj.contains("safe_for"), "{conj}");
    assert!(conj.contains("active_state(T,A) = criticalSection"), "{conj}");
    let pooled = p.pool.iter().find(|s| s.name == "l").unwrap();
    assert!(!pooled.formula.to_string().contains("safe_for"));
}

#[test]
fn expansion_edge_cases() {
    let lemma = "fof(l, checked_lemma, ![T,A]: safe_for(T,A,A)).\n";
    let noop = planned(&safety_script(&format!("{lemma}tpi(x, expand_definitions_in, l => []).\n")));
    assert_eq!(noop.tasks, planned(&safety_script(lemma)).tasks);
    let err = plan(&script(&safety_script(&format!("{lemma}tpi(x, expand_definitions_in, l => [sig]).\n")))).unwrap_err();
    assert!(matches!(err, PlanError::NotADefinition { .. }), "{err}");
}

const CASES_EXAMPLE: &str = include_str!("../../corpus/add_cases.p");
const GENERATED_CASE: &str = include_str!("../../corpus/generated_case.p");

#[test]
fn add_cases_example_expands_to_three_cases_and_a_recombination() {
    let p = planned(CASES_EXAMPLE);
    assert_eq!(
        p.task_ids(),
        [
            "safety_conditions_local_cases",
            "safety_conditions_local_simplified_case_1",
            "safety_conditions_local_simplified_case_2",
            "safety_conditions_local_simplified_case_3",
            "safety_conditions_local_simplified",
        ]
    );
    let generated = script(GENERATED_CASE);
    let expected = &generated.statements().next().unwrap().formula;
    assert_eq!(&p.task("safety_conditions_local_simplified_case_1").unwrap().conjecture.formula, expected);
    let recombination = p.task("safety_conditions_local_simplified").unwrap();
    assert_eq!(
        recombination.premise_names(),
        [
            "safety_conditions_local_cases",
            "safety_conditions_local_simplified_case_1",
            "safety_conditions_local_simplified_case_2",
            "safety_conditions_local_simplified_case_3",
        ]
    );
    assert_eq!(recombination.depends_on.len(), 4);
    assert_eq!(premises(&p, "safety_conditions_local_simplified_case_2"), ["safety_conditions_local_cases"]);
}

fn stmt(name: &str, text: &str) -> AnnotatedStatement {
    AnnotatedStatement::new(name, Role::CheckedLemma, parse_formula(text).unwrap())
}

#[test]
fn single_case_strengthens_the_target() {
    let cases = stmt("c", "![X]: p(X)");
    let target = stmt("t", "![X]: (q(X) => r(X))");
    let out = expand_cases(&cases, &target).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].name, "t_case_1");
    assert_eq!(out[0].formula, parse_formula("![X]: ((q(X) & p(X)) => r(X))").unwrap());
    let bare = expand_cases(&cases, &stmt("g", "![X]: r(X)")).unwrap();
    assert_eq!(bare[0].formula, parse_formula("![X]: (p(X) => r(X))").unwrap());
}

#[test]
fn case_prefix_is_a_subsequence() {
    let cases = stmt("c", "![T,A]: (p(T,A) | ~p(T,A))");
    let target = stmt("t", "![T,A,B]: r(T,A,B)");
    let out = expand_cases(&cases, &target).unwrap();
    assert_eq!(out[1].formula, parse_formula("![T,A,B]: (~p(T,A) => r(T,A,B))").unwrap());
    let swapped = stmt("s", "![A,T]: (p(T,A) | q)");
    let err = expand_cases(&swapped, &target).unwrap_err();
    assert!(err.to_string().contains("[A,T]") && err.to_string().contains("[T,A,B]"), "{err}");
    let extra = stmt("e", "![T,C]: (p(T,C) | q)");
    let err = expand_cases(&extra, &target).unwrap_err();
    assert!(err.to_string().contains("missing from target: C"), "{err}");
}

#[test]
fn cases_must_precede_the_target() {
    let text = "fof(t, checked_lemma, p | ~p).\nfof(c, checked_lemma, q | ~q).\ntpi(ca, add_cases, c => t).";
    let err = plan(&script(text)).unwrap_err();
    assert!(matches!(err, PlanError::CasesNotPooled { .. }), "{err}");
}

#[test]
fn split_marker_tasks_each_conjunct() {
    let p = planned(
        "fof(a, axiom, ![X]: p(X)).
         fof(l_split, checked_lemma, ![X,Y]: (p(X) & p(Y) & (q | ~q))).
         fof(after, checked_lemma, p(c)).
         fof(whole, checked_lemma, p(c) & p(d)).",
    );
    assert_eq!(p.task_ids(), ["l_split_part_1", "l_split_part_2", "l_split_part_3", "after", "whole"]);
    assert_eq!(p.task("l_split_part_3").unwrap().conjecture.formula, parse_formula("q | ~q").unwrap());
    assert_eq!(p.task("after").unwrap().depends_on, ["l_split_part_1", "l_split_part_2", "l_split_part_3"]);
}

#[test]
fn conjectures_are_tasked_but_not_pooled() {
    let p = planned("fof(a, axiom, p).\nfof(g, conjecture, p).\nfof(l, checked_lemma, p).");
    assert_eq!(p.task_ids(), ["g", "l"]);
    assert_eq!(premises(&p, "l"), ["a"]);
}

#[test]
fn derivation_roles_are_rejected() {
    let err = plan(&script("fof(x, plain, p).")).unwrap_err();
    assert!(matches!(err, PlanError::UnsupportedRole { role: Role::Plain, .. }));
}

#[test]
fn planning_is_deterministic() {
    let a = planned(CASES_EXAMPLE);
    let b = planned(CASES_EXAMPLE);
    let text = |p: &Plan| p.tasks.iter().map(ProverTask::to_tptp).collect::<String>();
    assert_eq!(text(&a), text(&b));
}

fn opts(stop: bool, parallel: usize) -> RunOptions {
    RunOptions {
        timeout: Duration::from_secs(5),
        parallel,
        stop_on_failure: stop,
    }
}

#[test]
fn tautologies_run_green() {
    let p = planned("fof(l1, checked_lemma, p | ~p).\nfof(l2, checked_lemma, (p => q) | (q => p)).");
    let mut seen = Vec::new();
    let report = run(&p, &Builtin::default(), &opts(false, 2), |r| seen.push(r.id.clone()));
    assert!(report.success());
    assert_eq!(report.count(Status::Proved), 2);
    seen.sort();
    assert_eq!(seen, ["l1", "l2"]);
    assert!(report.lines().starts_with("l1\tProved\t"));
}

#[test]
fn failure_stops_dependents() {
    let p = planned(
        "fof(a, axiom, p(a)).
         fof(bad, checked_lemma, p(b)).
         fof(ok, checked_lemma, p(a) | q).
         fof(uses_bad, checked_lemma, p(b) | q).",
    );
    let stop = run(&p, &Builtin::default(), &opts(true, 1), |_| {});
    assert!(!stop.success());
    assert_eq!(stop.status("bad"), Some(Status::Refuted));
    assert_eq!(stop.status("ok"), Some(Status::NotAttempted));
    assert_eq!(stop.status("uses_bad"), Some(Status::NotAttempted));
    let go_on = run(&p, &Builtin::default(), &opts(false, 1), |_| {});
    assert_eq!(go_on.status("ok"), Some(Status::NotAttempted), "ok has bad among its premises");
    let restricted = planned(
        "fof(a, axiom, p(a)).
         fof(bad, checked_lemma, p(b)).
         fof(ok, checked_lemma, p(a) | q).
         tpi(r, restrict_premises, ok => [a]).",
    );
    let go_on = run(&restricted, &Builtin::default(), &opts(false, 1), |_| {});
    assert_eq!(go_on.status("ok"), Some(Status::Proved));
}

#[test]
fn empty_plan_succeeds() {
    let report = run(&Plan::default(), &Builtin::default(), &opts(true, 4), |_| panic!("no tasks"));
    assert!(report.success());
    assert!(report.results.is_empty());
}

#[test]
fn export_writes_tasks_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let p = planned("fof(a, axiom, p).\nfof(l1, checked_lemma, p | q).\nfof(l2, checked_lemma, p & (p | q)).");
    let m = export_tasks(&p, dir.path()).unwrap();
    assert_eq!(m.edge_count(), 1);
    let text = std::fs::read_to_string(dir.path().join("manifest.tsv")).unwrap();
    assert_eq!(text, "l1\tl1.p\t\nl2\tl2.p\tl1\n");
    assert_eq!(Manifest::parse(&text).unwrap(), m);
    let reimported = crate::syntax::parse_script_file(&dir.path().join("l2.p"), None).unwrap();
    let again = plan(&reimported).unwrap();
    assert_eq!(again.tasks.len(), 1);
    let (orig, back) = (p.task("l2").unwrap(), &again.tasks[0]);
    assert_eq!((&orig.conjecture, &orig.premises), (&back.conjecture, &back.premises));
}

#[test]
fn unwritable_export_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let err = export_tasks(&planned(PIPELINE), &blocker.join("sub")).unwrap_err();
    assert!(err.path.ends_with("sub"));
}

#[test]
fn recombination_is_provable() {
    let p = planned(CASES_EXAMPLE);
    let task = p.task("safety_conditions_local_simplified").unwrap();
    let v = crate::prover::Backend::prove(&Builtin::default(), &task.problem(), Duration::from_secs(5));
    assert_eq!(v.status, Status::Proved, "{:?}", v.note);
    let _ = Formula::True;
}

#[test]
fn expand_script_applies_instructions_and_flags() {
    let text = "fof(ax, axiom, q(a)).
fof(d, checked_definition, ![X]: (p(X) <=> q(X))).
fof(l1, checked_lemma, p(a)).
fof(l2, checked_lemma, ![Y]: (p(Y) => q(Y))).
tpi(e1, expand_definitions_in, l1 => [d]).
";
    let script = parse_script(text, Path::new(".")).unwrap();
    let out = expand_script(&script, &[]).unwrap();
    assert_eq!(out.items.len(), 4);
    assert_eq!(out.statement("l1").unwrap().formula, parse_formula("q(a)").unwrap());
    assert_eq!(out.statement("l2").unwrap().formula, script.statement("l2").unwrap().formula);

    let all = expand_script(&script, &["d".to_owned()]).unwrap();
    assert_eq!(all.statement("l2").unwrap().formula, parse_formula("![Y]: (q(Y) => q(Y))").unwrap());
    assert_eq!(all.statement("d").unwrap().formula, script.statement("d").unwrap().formula);

    let err = expand_script(&script, &["nope".to_owned()]).unwrap_err();
    assert!(err.to_string().contains("nope"), "{err}");
}
