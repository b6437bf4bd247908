//! One timed check per acceptance criterion. Each writes a PASS/FAIL line;
//! the test fails if any criterion does.

mod common;

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use fofkit::analysis::{parse_derivation, smoke_parse_dot, to_dot, unused_lemmas, DerivationGraph, DotMode};
use fofkit::dijkstra::{agent, generate_run, generate_spec_text, moment, DEFINED_NAMES};
use fofkit::engine::{export_tasks, plan, plan_with, Plan, PlanOptions};
use fofkit::model::{brute_force_validity, check_axioms, evaluate_closed, evaluate_relativized, satisfies, TruthValue, Validity};
use fofkit::prover::{builtin_prove, run_external, Backend, BackendConfig, Builtin, Limits, Status};
use fofkit::syntax::{parse_formula, parse_items, Connective, parse_script, parse_script_file, Formula, ParseOptions, Role};
use proptest::test_runner::{Config, TestRunner};

fn script_plan(text: &str) -> Plan {
    plan(&parse_script(text, Path::new(".")).unwrap()).unwrap()
}

fn premises(p: &Plan, id: &str) -> Vec<String> {
    p.task(id).unwrap().premise_names().into_iter().map(str::to_owned).collect()
}

fn format_fidelity() {
    let files = corpus_files();
    assert!(files.len() >= 8);
    for file in &files {
        let opts = ParseOptions { allow_cnf: file.derivation };
        let first = parse_file(file);
        assert!(!first.is_empty(), "{}", file.name);
        let printed = print_items(&first);
        let second = parse_items(&printed, opts).unwrap_or_else(|e| panic!("{}: {e}", file.name));
        assert_eq!(first, second, "{}: round trip", file.name);
        assert_eq!(print_items(&second), printed, "{}: idempotence", file.name);
    }
}

fn pipeline_semantics() {
    let text = read_fixture("pipeline.p");
    let script = parse_script(&text, Path::new(".")).unwrap();
    assert_eq!(script.statements().count(), 5);
    let p = plan(&script).unwrap();
    assert_eq!(p.task_ids(), ["l1", "l2"]);
    assert_eq!(premises(&p, "l1"), ["ax_rule", "ax_a", "def_r"]);
    // restrict_premises replaces the accumulated pool
    assert_eq!(premises(&p, "l2"), ["def_r", "l1", "ax_a"]);

    let dir = tempfile::tempdir().unwrap();
    export_tasks(&p, dir.path()).unwrap();
    assert_dir_matches(dir.path(), &fixture_dir().join("golden/pipeline"));

    let unrestricted = script_plan(&text.replace("tpi(r2", "% tpi(r2"));
    assert_eq!(premises(&unrestricted, "l2"), ["ax_rule", "ax_a", "def_r", "l1"]);

    let assumed = script_plan(&text.replace("fof(l2", "tpi(av, assume_previous_valid, all).\nfof(l2"));
    assert_eq!(assumed.task_ids(), ["l2"]);
    assert_eq!(assumed.skipped, ["l1"]);
    assert_eq!(premises(&assumed, "l2"), ["def_r", "l1", "ax_a"]);
    assert!(assumed.task("l2").unwrap().depends_on.is_empty());

    let from = plan_with(&script, &PlanOptions { from: Some("l2".into()) }).unwrap();
    assert_eq!(from.task_ids(), ["l2"]);
    assert_eq!(from.skipped, ["l1"]);
    let out = dir.path().join("from");
    export_tasks(&from, &out).unwrap();
    assert_dir_matches(&out, &fixture_dir().join("golden/pipeline_from_l2"));
}

fn assert_dir_matches(got: &Path, golden: &Path) {
    let listing = |d: &Path| {
        let mut v: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_file()).collect();
        v.sort();
        v
    };
    let want = listing(golden);
    assert_eq!(listing(got).len(), want.len());
    for path in want {
        let name = path.file_name().unwrap();
        assert_eq!(fs::read_to_string(got.join(name)).unwrap(), fs::read_to_string(&path).unwrap(), "{name:?}");
    }
}

fn case_analysis() {
    let p = script_plan(&read_corpus("add_cases.p"));
    let cases: Vec<&str> = p.task_ids().into_iter().filter(|id| id.contains("_case_")).collect();
    assert_eq!(cases.len(), 3, "{cases:?}");
    let generated = parse_script(&read_corpus("generated_case.p"), Path::new(".")).unwrap();
    let shown = &generated.statements().next().unwrap().formula;
    assert_eq!(&p.task(cases[0]).unwrap().conjecture.formula, shown);
    let hypothesis = parse_formula("~passed(T,A,B)").unwrap();
    let Formula::Quant(_, _, body) = shown else { panic!() };
    let Formula::Binary(_, lhs, _) = &**body else { panic!() };
    assert_eq!(lhs.flatten(Connective::And).last().copied(), Some(&hypothesis));

    let recombination = p.task("safety_conditions_local_simplified").unwrap();
    assert_eq!(recombination.depends_on.len(), 4);
    let t = Instant::now();
    let v = Builtin::default().prove(&recombination.problem(), Duration::from_secs(5));
    assert_eq!(v.status, Status::Proved, "{:?}", v.note);
    assert!(t.elapsed() < Duration::from_secs(5));
}

fn prover_soundness() {
    let limits = Limits {
        max_clauses: 20_000,
        max_seconds: 3.0,
    };
    let load = |f: &str| parse_script_file(&fixture_dir().join("prover").join(f), None).unwrap();
    let valid = load("valid.p");
    let valid: Vec<_> = valid.statements().collect();
    assert_eq!(valid.len(), 20);
    assert!(valid.iter().any(|s| s.name == "cases_tautology"));
    for s in valid {
        assert!(brute_force_validity(&s.formula, 3).unwrap().is_valid(), "{}", s.name);
        assert_eq!(builtin_prove(&[], &s.formula, &limits).status, Status::Proved, "{}", s.name);
    }
    let invalid = load("invalid.p");
    let invalid: Vec<_> = invalid.statements().collect();
    assert_eq!(invalid.len(), 10);
    for s in invalid {
        match brute_force_validity(&s.formula, 3).unwrap() {
            Validity::Countermodel(m) => assert!(m.size() <= 3 && !satisfies(&s.formula, &m, &mut Vec::new())),
            v => panic!("{}: {v:?}", s.name),
        }
        assert_ne!(builtin_prove(&[], &s.formula, &limits).status, Status::Proved, "{}", s.name);
    }
}

fn three_valued_evaluation() {
    let differential = Cell::new(0);
    let mut runner = TestRunner::new(cases(1000));
    runner
        .run(&(formula(4), model_parts()), |(f, (n, e))| {
            let f = close(f);
            let m = total_model(n, &e);
            let classical = satisfies(&f, &m, &mut Vec::new());
            assert_eq!(evaluate_closed(&f, &m), if classical { TruthValue::True } else { TruthValue::False }, "{f}");
            differential.set(differential.get() + 1);
            Ok(())
        })
        .unwrap();
    assert!(differential.get() >= 1000);

    let monotone = Cell::new(0);
    let mut runner = TestRunner::new(cases(500));
    let masks = proptest::collection::vec((proptest::bool::ANY, proptest::bool::ANY), 1..20);
    runner
        .run(&(formula(4), model_parts(), masks), |(f, (n, e), masks)| {
            let f = close(f);
            let total = total_model(n, &e);
            let small = forget(&total, &masks.iter().map(|(a, b)| *a || *b).collect::<Vec<_>>());
            let large = forget(&total, &masks.iter().map(|(a, _)| *a).collect::<Vec<_>>());
            assert!(small.is_extended_by(&large));
            for (lo, hi) in [(&small, &large), (&large, &total), (&small, &total)] {
                let v = evaluate_closed(&f, lo);
                if v != TruthValue::Unknown {
                    assert_eq!(v, evaluate_closed(&f, hi), "{f}");
                }
            }
            monotone.set(monotone.get() + 1);
            Ok(())
        })
        .unwrap();
    assert!(monotone.get() >= 500);
}

fn cases(n: u32) -> Config {
    Config {
        cases: n,
        failure_persistence: None,
        ..Config::default()
    }
}

fn fixture_schedules() -> Vec<Vec<usize>> {
    read_fixture("schedules_n2.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.trim().parse().unwrap()).collect())
        .collect()
}

fn dijkstra_end_to_end() {
    let spec = parse_script(&generate_spec_text(2, None).unwrap(), Path::new(".")).unwrap();
    let p = plan(&spec).unwrap();
    let mut defined: Vec<String> = spec
        .statements()
        .filter(|s| p.pool_roles.get(&s.name) == Some(&Role::CheckedDefinition))
        .map(|s| match s.formula.strip_forall().1 {
            Formula::Binary(Connective::Iff, lhs, _) => match &**lhs {
                Formula::Atom(name, _) => name.clone(),
                f => panic!("{}: {f}", s.name),
            },
            f => panic!("{}: {f}", s.name),
        })
        .collect();
    defined.sort();
    let mut expected = DEFINED_NAMES.map(str::to_owned).to_vec();
    expected.sort();
    assert_eq!(defined, expected);
    let closure = parse_formula("![T,A1,A2]: safe_for(T,A1,A2)").unwrap();
    let schedules = fixture_schedules();
    assert!(schedules.iter().filter(|s| s.len() == 12).count() >= 4);
    for s in schedules {
        let k = s.len();
        let m = generate_run(2, k, &s).unwrap();
        if k == 12 {
            let report = check_axioms(&spec, &m);
            assert!(report.false_.is_empty(), "{s:?}: {:?}", report.false_);
        }
        let moments: Vec<usize> = (0..=k).map(|i| m.element(&moment(i)).unwrap()).collect();
        let agents: Vec<usize> = (1..=2).map(|i| m.element(&agent(i)).unwrap()).collect();
        let range = |v: &str| Some(if v == "T" { moments.clone() } else { agents.clone() });
        assert_eq!(evaluate_relativized(&closure, &m, &range), TruthValue::True, "{s:?}");
    }
}

fn derivation(path: &Path) -> DerivationGraph {
    parse_derivation(&fs::read_to_string(path).unwrap()).unwrap()
}

fn analysis_tooling() {
    let derivations = fixture_dir().join("derivations/pipeline");
    let graphs = [
        (corpus_dir().join("derivation_e.tstp"), 8, 7),
        (derivations.join("l1.tstp"), 9, 8),
        (derivations.join("l2.tstp"), 12, 11),
    ];
    for (path, nodes, edges) in &graphs {
        let g = derivation(path);
        assert_eq!((g.nodes.len(), g.edges.len()), (*nodes, *edges), "{path:?}");
        let detail = smoke_parse_dot(&to_dot(&g, DotMode::Detail)).unwrap();
        assert_eq!((detail.node_statements, detail.edges.len()), (*nodes, *edges));
        smoke_parse_dot(&to_dot(&g, DotMode::Overview)).unwrap();
    }

    let p = script_plan(&read_fixture("pipeline.p"));
    let l1 = derivation(&derivations.join("l1.tstp"));
    let l2 = derivation(&derivations.join("l2.tstp"));
    let both = BTreeMap::from([("l1".to_owned(), l1.clone()), ("l2".to_owned(), l2)]);
    let r = unused_lemmas(&p, &both);
    assert!(r.lemmas.is_empty() && r.base_axioms.is_empty() && !r.no_evidence, "{r:?}");
    let r = unused_lemmas(&p, &BTreeMap::from([("l1".to_owned(), l1)]));
    assert_eq!(r.lemmas, ["def_r", "l2"]);
    assert!(r.base_axioms.is_empty());
    let r = unused_lemmas(&p, &BTreeMap::new());
    assert!(r.no_evidence);
    assert_eq!(r.lemmas, ["def_r", "l1", "l2"]);
    assert_eq!(r.base_axioms, ["ax_rule", "ax_a"]);
}

fn szs_contract() {
    let script = fixture_dir().join("fake_prover.sh");
    let cfg = BackendConfig::new("fake", format!("sh {} {{file}}", script.display())).unwrap();
    let task = script_plan("fof(l, checked_lemma, p | ~p).").task("l").unwrap().to_tptp();
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("Theorem", 0, Status::Proved),
        ("Unsatisfiable", 0, Status::Proved),
        ("CounterSatisfiable", 0, Status::Refuted),
        ("Satisfiable", 0, Status::Refuted),
        ("GaveUp", 0, Status::Unknown),
        ("none", 0, Status::Unknown),
        ("Timeout", 0, Status::Timeout),
        ("Theorem", 5, Status::Timeout),
    ];
    for (i, (word, sleep, expected)) in cases.into_iter().enumerate() {
        let file = dir.path().join(format!("task_{i}.p"));
        fs::write(&file, format!("% FAKE_STATUS: {word}\n% FAKE_SLEEP: {sleep}\n{task}")).unwrap();
        let limit = Duration::from_secs(1);
        let t = Instant::now();
        let v = run_external(&file, &cfg, limit);
        assert_eq!(v.status, expected, "{word}/{sleep}: {:?}", v.note);
        assert!(t.elapsed() < limit + Duration::from_secs(1), "{word}/{sleep}: {:?}", t.elapsed());
    }
}

#[test]
fn acceptance_criteria() {
    type Criterion = (&'static str, fn(), Duration);
    let criteria: [Criterion; 8] = [
        ("1 format fidelity", format_fidelity, Duration::from_secs(5)),
        ("2 pipeline semantics", pipeline_semantics, Duration::from_secs(1)),
        ("3 case analysis", case_analysis, Duration::from_secs(5)),
        ("4 prover soundness", prover_soundness, Duration::from_secs(60)),
        ("5 three-valued evaluation", three_valued_evaluation, Duration::from_secs(60)),
        ("6 dijkstra end to end", dijkstra_end_to_end, Duration::from_secs(10)),
        ("7 analysis tooling", analysis_tooling, Duration::from_secs(1)),
        ("8 szs contract", szs_contract, Duration::from_secs(15)),
    ];
    let mut failed = Vec::new();
    for (name, check, limit) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let took = t.elapsed();
        let problem = match outcome {
            Err(e) => Some(
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default(),
            ),
            Ok(()) if took > limit => Some(format!("over the {limit:?} limit")),
            Ok(()) => None,
        };
        // written to the handle directly so the lines survive output capture
        let line = match problem {
            None => format!("PASS  {name}  ({:.2}s)", took.as_secs_f64()),
            Some(why) => {
                failed.push(name);
                format!("FAIL  {name}  ({:.2}s): {}", took.as_secs_f64(), why.lines().next().unwrap_or(""))
            }
        };
        writeln!(std::io::stderr(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
