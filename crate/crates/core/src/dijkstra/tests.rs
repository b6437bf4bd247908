use std::collections::{BTreeSet, HashSet, VecDeque};

use super::*;
use crate::engine::plan;
use crate::formula_ops::{formula_symbols, free_variables, Symbol};
use crate::model::{check_axioms, check_axioms_relativized, evaluate_relativized, PartialModel, TruthValue};
use crate::syntax::{parse_script, Formula, Role};

fn moment_or_agent_ranges(m: &PartialModel, moments: usize, n: usize) -> impl Fn(&str) -> Option<Vec<usize>> + '_ {
    let ts: Vec<usize> = (0..moments).map(|i| m.element(&moment(i)).unwrap()).collect();
    let ags: Vec<usize> = (1..=n).map(|i| m.element(&agent(i)).unwrap()).collect();
    move |v: &str| if v.starts_with('T') { Some(ts.clone()) } else { Some(ags.clone()) }
}

fn protocol_signature(n: usize) -> BTreeSet<Symbol> {
    let mut s: BTreeSet<Symbol> = [
        ("active_state", 2),
        ("counter", 2),
        ("turn", 1),
        ("active_agent", 1),
        ("next_moment", 1),
        ("outside", 2),
        ("stealable", 2),
    ]
    .into_iter()
    .map(|(f, k)| Symbol::function(f, k))
    .collect();
    let constants = ["initial", BTRUE, BFALSE]
        .into_iter()
        .map(str::to_owned)
        .chain(Loc::ALL.iter().map(|l| l.constant().to_owned()))
        .chain((1..=n).map(agent))
        .chain((0..=n).map(counter_value));
    s.extend(constants.map(|c| Symbol::function(c, 0)));
    s
}

#[test]
fn spec_plans_and_defines_exactly_four_names() {
    for n in [2, 3] {
        let script = generate_spec(n).unwrap();
        let p = plan(&script).unwrap();
        let mut expected = protocol_signature(n);
        expected.insert(Symbol::predicate("safe_for", 3));
        expected.insert(Symbol::predicate("passed", 3));
        expected.insert(Symbol::predicate("passed_in_critical_for", 2));
        expected.insert(Symbol::predicate("passed_exclusive_for", 3));
        let got: BTreeSet<Symbol> = p.symbol_table.iter().cloned().collect();
        assert_eq!(got, expected, "n = {n}");
    }
}

#[test]
fn agent_count_is_bounded() {
    assert_eq!(generate_spec(1).unwrap_err(), GenError::AgentCount(1));
    assert_eq!(generate_spec(10).unwrap_err(), GenError::AgentCount(10));
    assert!(generate_spec(9).is_ok());
}

#[test]
fn safety_definition_matches_the_corpus() {
    let corpus = parse_script(include_str!("../../corpus/define_safety_for.p"), std::path::Path::new(".")).unwrap();
    let spec = generate_spec(2).unwrap();
    let ours = spec.statement("define_safety_for").unwrap();
    let theirs = corpus.statement("define_safety_for").unwrap();
    assert_eq!(ours.to_string(), theirs.to_string());
}

#[test]
fn spec_reprints_stably() {
    let spec = generate_spec(3).unwrap();
    let printed = spec.to_string();
    let again = parse_script(&printed, std::path::Path::new(".")).unwrap();
    assert_eq!(again, spec);
    assert_eq!(again.to_string(), printed);
}

#[test]
fn scaffold_lemmas_are_closed_over_the_signature() {
    let n = 2;
    let spec = generate_spec(n).unwrap();
    let mut allowed = protocol_signature(n);
    for name in DEFINED_NAMES {
        allowed.extend(spec.statements().flat_map(|s| formula_symbols(&s.formula)).filter(|s| s.name == name));
    }
    for s in spec.statements().filter(|s| s.role == Role::CheckedLemma) {
        assert!(free_variables(&s.formula).is_empty(), "{}", s.name);
        for sym in formula_symbols(&s.formula) {
            assert!(allowed.contains(&sym), "{} uses {sym}", s.name);
        }
    }
}

#[test]
fn schedule_validation() {
    assert_eq!(
        generate_run(2, 3, &[1, 2]).unwrap_err(),
        GenError::ScheduleLength { expected: 3, got: 2 }
    );
    assert_eq!(
        generate_run(2, 2, &[1, 3]).unwrap_err(),
        GenError::ScheduleEntry { entry: 3, position: 1, n: 2 }
    );
}

#[test]
fn empty_run_is_the_initial_snapshot() {
    let m = generate_run(2, 0, &[]).unwrap();
    let spec = generate_spec(2).unwrap();
    let initial = spec.statement("initial_agents").unwrap();
    assert_eq!(crate::model::evaluate_closed(&initial.formula, &m), TruthValue::True);
    assert_eq!(m.function("next_moment", &[m.element("t0").unwrap()]), None);
}

#[test]
fn lone_agent_reaches_the_critical_section() {
    let trace = simulate(2, &[1; 12]).unwrap();
    let first = trace.snapshots.iter().position(|s| s.state[0] == Loc::CriticalSection);
    assert_eq!(first, Some(8));
    assert!(trace.snapshots.iter().all(|s| (0..2).all(|a| (0..2).all(|b| s.safe_for(a, b)))));
}

#[test]
fn only_the_scheduled_agent_changes() {
    let schedule = [1, 2, 2, 1, 2, 1, 1, 2, 1, 2, 2, 2, 1, 1, 1, 1, 2, 2, 1, 1];
    let trace = simulate(2, &schedule).unwrap();
    for (m, w) in trace.snapshots.windows(2).enumerate() {
        let other = 2 - schedule[m];
        assert_eq!(w[0].state[other], w[1].state[other]);
        assert_eq!(w[0].counter[other], w[1].counter[other]);
        assert_eq!(w[0].outside[other], w[1].outside[other]);
        assert_eq!(w[0].stealable[other], w[1].stealable[other]);
        if w[0].turn != w[1].turn {
            assert_eq!(w[1].turn, schedule[m] - 1);
        }
    }
}

fn all_schedules(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(k as u32)).map(move |mut code| {
        (0..k)
            .map(|_| {
                let a = code % n + 1;
                code /= n;
                a
            })
            .collect()
    })
}

#[test]
fn mutual_exclusion_on_every_short_schedule() {
    let mut reached_cs = false;
    for s in all_schedules(2, 14) {
        let trace = simulate(2, &s).unwrap();
        for snap in &trace.snapshots {
            assert!(snap.safe_for(0, 1), "schedule {s:?}");
            reached_cs |= snap.state.contains(&Loc::CriticalSection);
        }
    }
    assert!(reached_cs);
}

const SCHEDULES: [[usize; 12]; 4] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2],
    [2, 2, 2, 1, 1, 1, 2, 2, 2, 1, 1, 1],
    [1, 1, 2, 2, 1, 1, 1, 1, 2, 1, 1, 1],
];

#[test]
fn runs_validate_against_the_spec() {
    let spec = generate_spec(2).unwrap();
    for s in SCHEDULES {
        let m = generate_run(2, 12, &s).unwrap();
        let report = check_axioms(&spec, &m);
        assert!(report.false_.is_empty(), "{s:?}: {:?}", report.false_);
        // every instance at a moment with a successor is decided
        let ranges = moment_or_agent_ranges(&m, 12, 2);
        let rel = check_axioms_relativized(&spec, &m, &ranges);
        let open: Vec<&String> = rel.unknown.iter().filter(|n| !n.starts_with("define_passed_in")).collect();
        assert!(rel.false_.is_empty() && open.is_empty(), "{s:?}: false {:?} unknown {open:?}", rel.false_);
    }
}

#[test]
fn safety_closure_holds_at_every_moment() {
    let spec = generate_spec(2).unwrap();
    let closure = Formula::forall(["T", "A1", "A2"], crate::syntax::parse_formula("safe_for(T,A1,A2)").unwrap());
    for s in SCHEDULES {
        let m = generate_run(2, 12, &s).unwrap();
        let ranges = moment_or_agent_ranges(&m, 13, 2);
        assert_eq!(evaluate_relativized(&closure, &m, &ranges), TruthValue::True);
        let body = &spec.statement("define_safety_for").unwrap().formula;
        assert_eq!(evaluate_relativized(body, &m, &ranges), TruthValue::True);
    }
}

#[test]
fn turn_outside_the_agents_breaks_the_range_axiom() {
    let spec = generate_spec(2).unwrap();
    let mut m = generate_run(2, 2, &[1, 2]).unwrap();
    let t1 = m.element("t1").unwrap();
    let bogus = m.element("c0").unwrap();
    m.unset_function("turn", &[t1]);
    m.set_function("turn", &[t1], bogus).unwrap();
    let report = check_axioms(&spec, &m);
    assert!(report.false_.contains(&"range_turn".to_owned()), "{report:?}");
}

#[test]
fn default_invariant_holds_on_reachable_states() {
    let inv = default_invariant(2);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([Snapshot::initial(2)]);
    while let Some(s) = queue.pop_front() {
        if !seen.insert(s.clone()) {
            continue;
        }
        for i in 0..2 {
            queue.push_back(s.step(i));
        }
    }
    assert!(seen.len() > 50);
    for s in seen.iter().take(200) {
        let trace = RunTrace {
            n: 2,
            schedule: vec![],
            snapshots: vec![s.clone()],
        };
        let m = run_model(&trace);
        let ranges = moment_or_agent_ranges(&m, 1, 2);
        assert_eq!(evaluate_relativized(&inv, &m, &ranges), TruthValue::True, "{s:?}");
    }
}

#[test]
fn invariant_fixture_shape() {
    let script = parse_script("fof(inv, hypothesis, ![T]: p(T)).", std::path::Path::new(".")).unwrap();
    assert!(invariant_from_script(&script).is_ok());
    let open = parse_script("fof(inv, hypothesis, ![T]: p(T,X)).", std::path::Path::new(".")).unwrap();
    assert!(matches!(invariant_from_script(&open), Err(GenError::Invariant(_))));
}

#[test]
fn spec_tasks_after_the_scaffold_are_proved() {
    use crate::engine::{run, RunOptions};
    use crate::prover::{Builtin, Status};
    let p = plan(&generate_spec(2).unwrap()).unwrap();
    assert!(!p.skipped.is_empty());
    let opts = RunOptions {
        timeout: std::time::Duration::from_secs(20),
        parallel: 4,
        stop_on_failure: false,
    };
    let report = run(&p, &Builtin::default(), &opts, |_| {});
    for r in &report.results {
        assert_eq!(r.verdict.status, Status::Proved, "{}: {:?}", r.id, r.verdict);
    }
}
