use std::path::Path;

use super::{agent, check_agents, counter_value, GenError, Loc, BFALSE, BTRUE};
use crate::formula_ops::{free_variables, substitute, Subst};
use crate::syntax::{parse_formula, parse_script, Formula, ProofScript, Role, Term};

/// Names introduced by the generated checked definitions.
pub const DEFINED_NAMES: [&str; 4] = ["safe_for", "passed", "passed_in_critical_for", "passed_exclusive_for"];

const SAFE_FOR: &str = "fof(define_safety_for, checked_definition,
      ![T,A1,A2]: (safe_for(T,A1,A2)<=>(
         (active_state(T,A1)=criticalSection
           & active_state(T,A2)=criticalSection)
         => A1=A2))).";

const CASES: &str = "fof(safety_conditions_local_cases, checked_lemma,
  ![T,A,B]:( ~passed(T,A,B)
    | (passed(T,A,B) & ~passed(T,B,A))
    | (passed(T,A,B) & passed(T,B,A)))).";

const SIMPLIFIED: &str = "fof(safety_conditions_local_simplified,
  checked_lemma,
  ![T,A,B]:
  ((passed_exclusive_for(T,A,B) & A!=B
      & passed_in_critical_for(T,A)
      & passed_in_critical_for(T,B)) =>
      (active_state(T,A)!=criticalSection
      | active_state(T,B)!=criticalSection))).";

fn join(parts: impl IntoIterator<Item = String>, op: &str) -> String {
    let parts: Vec<String> = parts.into_iter().collect();
    match parts.len() {
        0 if op == "&" => "$true".to_owned(),
        0 => "$false".to_owned(),
        1 => parts.into_iter().next().expect("one"),
        _ => format!("({})", parts.join(&format!(" {op} "))),
    }
}

fn or(parts: impl IntoIterator<Item = String>) -> String {
    join(parts, "|")
}

fn and(parts: impl IntoIterator<Item = String>) -> String {
    join(parts, "&")
}

fn distinct(names: &[String]) -> String {
    let mut pairs = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            pairs.push(format!("{a} != {b}"));
        }
    }
    and(pairs)
}

fn agents(n: usize) -> Vec<String> {
    (1..=n).map(agent).collect()
}

fn is_agent(var: &str, n: usize) -> String {
    or(agents(n).into_iter().map(|a| format!("{var} = {a}")))
}

fn one_of(term: &str, values: &[String]) -> String {
    or(values.iter().map(|v| format!("{term} = {v}")))
}

#[derive(Default)]
struct Effect {
    state: Option<String>,
    counter: Option<String>,
    outside: Option<&'static str>,
    stealable: Option<&'static str>,
    turn: Option<&'static str>,
}

impl Effect {
    fn to(loc: Loc) -> Self {
        Effect {
            state: Some(loc.constant().to_owned()),
            ..Effect::default()
        }
    }

    /// Every variable of the moving agent, and `turn`, at the next moment.
    fn render(&self) -> String {
        let per_agent = |f: &str, v: Option<&str>| match v {
            Some(v) => format!("{f}(next_moment(T),A) = {v}"),
            None => format!("{f}(next_moment(T),A) = {f}(T,A)"),
        };
        and([
            per_agent("active_state", self.state.as_deref()),
            per_agent("counter", self.counter.as_deref()),
            per_agent("outside", self.outside),
            per_agent("stealable", self.stealable),
            match self.turn {
                Some(v) => format!("turn(next_moment(T)) = {v}"),
                None => "turn(next_moment(T)) = turn(T)".to_owned(),
            },
        ])
    }
}

fn transition(n: usize, loc: Loc) -> Vec<(Option<String>, Effect)> {
    let always = |e: Effect| vec![(None, e)];
    match loc {
        Loc::StealableFalse => always(Effect {
            stealable: Some(BFALSE),
            ..Effect::to(Loc::CheckTurn)
        }),
        Loc::CheckTurn => vec![
            (Some("turn(T) != A".into()), Effect::to(Loc::OutsideTrue)),
            (Some("turn(T) = A".into()), Effect::to(Loc::OutsideFalse)),
        ],
        Loc::OutsideTrue => always(Effect {
            outside: Some(BTRUE),
            ..Effect::to(Loc::CheckStealable)
        }),
        Loc::CheckStealable => vec![
            (Some(format!("stealable(T,turn(T)) = {BTRUE}")), Effect::to(Loc::TakeTurn)),
            (Some(format!("stealable(T,turn(T)) = {BFALSE}")), Effect::to(Loc::CheckTurn)),
        ],
        Loc::TakeTurn => always(Effect {
            turn: Some("A"),
            ..Effect::to(Loc::CheckTurn)
        }),
        Loc::OutsideFalse => always(Effect {
            outside: Some(BFALSE),
            ..Effect::to(Loc::ForInit)
        }),
        Loc::ForInit => always(Effect {
            counter: Some(counter_value(1)),
            ..Effect::to(Loc::ForTest)
        }),
        Loc::ForTest => {
            let mut cases = vec![(Some(format!("counter(T,A) = {}", counter_value(0))), Effect::to(Loc::ForNext))];
            for k in 1..=n {
                let (c, a) = (counter_value(k), agent(k));
                cases.push((Some(format!("(counter(T,A) = {c} & A = {a})")), Effect::to(Loc::ForNext)));
                cases.push((
                    Some(format!("(counter(T,A) = {c} & A != {a} & outside(T,{a}) = {BFALSE})")),
                    Effect::to(Loc::CheckTurn),
                ));
                cases.push((
                    Some(format!("(counter(T,A) = {c} & A != {a} & outside(T,{a}) = {BTRUE})")),
                    Effect::to(Loc::ForNext),
                ));
            }
            cases
        }
        Loc::ForNext => {
            let mut cases: Vec<_> = (0..n)
                .map(|k| {
                    let e = Effect {
                        counter: Some(counter_value(k + 1)),
                        ..Effect::to(Loc::ForTest)
                    };
                    (Some(format!("counter(T,A) = {}", counter_value(k))), e)
                })
                .collect();
            cases.push((Some(format!("counter(T,A) = {}", counter_value(n))), Effect::to(Loc::CriticalSection)));
            cases
        }
        Loc::CriticalSection => always(Effect::to(Loc::ExitOutside)),
        Loc::ExitOutside => always(Effect {
            outside: Some(BTRUE),
            ..Effect::to(Loc::ExitStealable)
        }),
        Loc::ExitStealable => always(Effect {
            stealable: Some(BTRUE),
            ..Effect::to(Loc::Remainder)
        }),
        Loc::Remainder => always(Effect::to(Loc::StealableFalse)),
    }
}

/// `B` has not been checked yet by `A`'s loop: its index is at least
/// (`strict == false`) or above the loop counter.
fn pending(n: usize, strict: bool) -> String {
    or((1..=n).map(|k| {
        let upto = if strict { k } else { k + 1 };
        let cs: Vec<String> = (0..upto).map(counter_value).collect();
        format!("(B = {} & {})", agent(k), one_of("counter(T,A)", &cs))
    }))
}

fn state_is(loc: Loc) -> String {
    format!("active_state(T,A) = {}", loc.constant())
}

/// The invariant used by the scaffold when none is supplied: pairwise
/// exclusivity of `passed` and the critical-section condition, with `T` free.
pub fn default_invariant(n: usize) -> Formula {
    let text = format!(
        "(![A,B]: (({} & {} & A != B) => passed_exclusive_for(T,A,B))) & (![A]: ({} => passed_in_critical_for(T,A)))",
        is_agent("A", n),
        is_agent("B", n),
        is_agent("A", n)
    );
    parse_formula(&text).expect("generated invariant parses")
}

/// Reads an invariant from a script: the first hypothesis or axiom, which
/// must be `![T]: Body` with only `T` free in `Body`.
pub fn invariant_from_script(script: &ProofScript) -> Result<Formula, GenError> {
    let stmt = script
        .statements()
        .find(|s| matches!(s.role, Role::Hypothesis | Role::Axiom))
        .ok_or_else(|| GenError::Invariant("no hypothesis statement found".into()))?;
    match &stmt.formula {
        Formula::Quant(crate::syntax::Quantifier::Forall, vs, body) if vs.len() == 1 && vs[0] == "T" => {
            let free = free_variables(body);
            if free.iter().all(|v| v == "T") {
                Ok((**body).clone())
            } else {
                Err(GenError::Invariant(format!("`{}` has free variables besides T", stmt.name)))
            }
        }
        _ => Err(GenError::Invariant(format!("`{}` is not of the form ![T]: Body", stmt.name))),
    }
}

fn at(inv: &Formula, t: Term) -> Formula {
    let map: Subst = [("T".to_owned(), t)].into();
    substitute(inv, &map)
}

pub fn generate_spec(n: usize) -> Result<ProofScript, GenError> {
    generate_spec_with(n, None)
}

pub fn generate_spec_with(n: usize, invariant: Option<&Formula>) -> Result<ProofScript, GenError> {
    let text = generate_spec_text(n, invariant)?;
    Ok(parse_script(&text, Path::new(".")).expect("generated script parses"))
}

/// The specification as commented TPTP text.
pub fn generate_spec_text(n: usize, invariant: Option<&Formula>) -> Result<String, GenError> {
    check_agents(n)?;
    let default;
    let inv = match invariant {
        Some(f) => f,
        None => {
            default = default_invariant(n);
            &default
        }
    };
    let ag = agents(n);
    let locs: Vec<String> = Loc::ALL.iter().map(|l| l.constant().to_owned()).collect();
    let counters: Vec<String> = (0..=n).map(counter_value).collect();
    let bools = vec![BTRUE.to_owned(), BFALSE.to_owned()];
    let guard = is_agent("A", n);
    let mut out = String::new();
    let mut put = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    put(format!("% Dijkstra's mutual exclusion protocol, {n} agents, single CPU interleaving."));
    put("% One location constant per program point; booleans are btrue/bfalse,".into());
    put(format!("% counter values c0..c{n}."));
    put(String::new());
    put("% Distinct names and variable ranges".into());
    put(format!("fof(distinct_agents, axiom, {}).", distinct(&ag)));
    put(format!("fof(distinct_locations, axiom, {}).", distinct(&locs)));
    put(format!("fof(distinct_counters, axiom, {}).", distinct(&counters)));
    put(format!("fof(distinct_booleans, axiom, {}).", distinct(&bools)));
    put(format!("fof(range_active_agent, axiom, ![T]: {}).", one_of("active_agent(T)", &ag)));
    put(format!("fof(range_turn, axiom, ![T]: {}).", one_of("turn(T)", &ag)));
    for (name, f, values) in [
        ("range_active_state", "active_state", &locs),
        ("range_counter", "counter", &counters),
        ("range_outside", "outside", &bools),
        ("range_stealable", "stealable", &bools),
    ] {
        put(format!("fof({name}, axiom, ![T,A]: ({guard} => {})).", one_of(&format!("{f}(T,A)"), values)));
    }
    put(String::new());
    put("% Initial moment".into());
    put(format!(
        "fof(initial_agents, axiom, ![A]: ({guard} => {})).",
        and([
            format!("active_state(initial,A) = {}", Loc::StealableFalse.constant()),
            format!("stealable(initial,A) = {BTRUE}"),
            format!("outside(initial,A) = {BTRUE}"),
            format!("counter(initial,A) = {}", counter_value(0)),
        ])
    ));
    put(format!("fof(initial_turn, axiom, turn(initial) = {}).", agent(1)));
    put(String::new());
    put("% One step of the active agent per location".into());
    for loc in Loc::ALL {
        let cases = transition(n, loc);
        let body = match cases.as_slice() {
            [(None, e)] => e.render(),
            _ => and(cases.iter().map(|(c, e)| format!("({} => {})", c.as_deref().unwrap_or("$true"), e.render()))),
        };
        let name = format!("transition_{}", loc.constant().trim_start_matches("loc_"));
        put(format!(
            "fof({}, axiom, ![T,A]: ((active_agent(T) = A & {}) => {body})).",
            name.to_lowercase(),
            state_is(loc)
        ));
    }
    put(format!(
        "fof(frame_inactive, axiom, ![T,A]: (({guard} & active_agent(T) != A) => {})).",
        and(["active_state", "counter", "outside", "stealable"]
            .into_iter()
            .map(|f| format!("{f}(next_moment(T),A) = {f}(T,A)")))
    ));
    put(String::new());
    put("% Safety of a pair of agents at a moment".into());
    put(SAFE_FOR.to_owned());
    put("% passed(T,A,B): A has declared its intent (outside is false) and its".into());
    put("% checking loop is already past B. Reconstructed from its informal description.".into());
    put(format!(
        "fof(define_passed, checked_definition, ![T,A,B]: (passed(T,A,B) <=> (outside(T,A) = {BFALSE} & ((({}) & ~{}) | ({} & ~{}))))).",
        state_is(Loc::ForTest),
        pending(n, false),
        or([Loc::ForNext, Loc::CriticalSection, Loc::ExitOutside].map(state_is)),
        pending(n, true),
    ));
    put(format!(
        "fof(define_passed_in_critical_for, checked_definition, ![T,A]: (passed_in_critical_for(T,A) <=> ({} => ![B]: (A != B => passed(T,A,B))))).",
        state_is(Loc::CriticalSection)
    ));
    put("fof(define_passed_exclusive_for, checked_definition, ![T,A,B]: (passed_exclusive_for(T,A,B) <=> ~(passed(T,A,B) & passed(T,B,A)))).".into());
    put(String::new());
    put("% Inductive step scaffold over the invariant; the invariant is research material".into());
    let next = Term::app("next_moment", vec![Term::var("T")]);
    put(format!("fof(invariant_initially, checked_lemma, {}).", at(inv, Term::constant("initial"))));
    put(format!("fof(invariant_step, checked_lemma, ![T]: (({inv}) => ({}))).", at(inv, next)));
    put(format!(
        "fof(invariant_implies_safety, checked_lemma, ![T,A1,A2]: ((({inv}) & {} & {}) => safe_for(T,A1,A2))).",
        is_agent("A1", n),
        is_agent("A2", n)
    ));
    put("tpi(research_lemmas, assume_previous_valid, scaffold).".into());
    put(String::new());
    put("% Case analysis on passed".into());
    put(CASES.to_owned());
    put(SIMPLIFIED.to_owned());
    put("tpi(cases_premises, restrict_premises, safety_conditions_local_cases => []).".into());
    put("tpi(simplified_premises, restrict_premises, safety_conditions_local_simplified => [define_passed_in_critical_for, define_passed_exclusive_for]).".into());
    put("tpi(ca_safety_conditions_local, add_cases,\n  safety_conditions_local_cases =>\n    safety_conditions_local_simplified).".into());
    Ok(out)
}
