use super::{agent, boolean, check_agents, counter_value, moment, GenError, Loc, BFALSE, BTRUE};
use crate::model::PartialModel;

/// Every protocol variable at one moment. Agents are 0-based here; agent
/// `i` is the constant `a{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub state: Vec<Loc>,
    /// Counter value index: `c{k}`.
    pub counter: Vec<usize>,
    pub outside: Vec<bool>,
    pub stealable: Vec<bool>,
    pub turn: usize,
}

impl Snapshot {
    pub fn initial(n: usize) -> Self {
        Snapshot {
            state: vec![Loc::StealableFalse; n],
            counter: vec![0; n],
            outside: vec![true; n],
            stealable: vec![true; n],
            turn: 0,
        }
    }

    pub fn agents(&self) -> usize {
        self.state.len()
    }

    /// One step of agent `i`. Counter 0 names no agent, so a `ForTest` there
    /// checks nothing.
    pub fn step(&self, i: usize) -> Snapshot {
        let n = self.agents();
        let mut s = self.clone();
        s.state[i] = match self.state[i] {
            Loc::StealableFalse => {
                s.stealable[i] = false;
                Loc::CheckTurn
            }
            Loc::CheckTurn if self.turn != i => Loc::OutsideTrue,
            Loc::CheckTurn => Loc::OutsideFalse,
            Loc::OutsideTrue => {
                s.outside[i] = true;
                Loc::CheckStealable
            }
            Loc::CheckStealable if self.stealable[self.turn] => Loc::TakeTurn,
            Loc::CheckStealable => Loc::CheckTurn,
            Loc::TakeTurn => {
                s.turn = i;
                Loc::CheckTurn
            }
            Loc::OutsideFalse => {
                s.outside[i] = false;
                Loc::ForInit
            }
            Loc::ForInit => {
                s.counter[i] = 1;
                Loc::ForTest
            }
            Loc::ForTest => match self.counter[i] {
                0 => Loc::ForNext,
                k if k - 1 == i => Loc::ForNext,
                k if !self.outside[k - 1] => Loc::CheckTurn,
                _ => Loc::ForNext,
            },
            Loc::ForNext if self.counter[i] >= n => Loc::CriticalSection,
            Loc::ForNext => {
                s.counter[i] += 1;
                Loc::ForTest
            }
            Loc::CriticalSection => Loc::ExitOutside,
            Loc::ExitOutside => {
                s.outside[i] = true;
                Loc::ExitStealable
            }
            Loc::ExitStealable => {
                s.stealable[i] = true;
                Loc::Remainder
            }
            Loc::Remainder => Loc::StealableFalse,
        };
        s
    }

    /// Agent `a` has declared intent and already checked agent `b`.
    pub fn passed(&self, a: usize, b: usize) -> bool {
        let c = self.counter[a];
        let idx = b + 1;
        !self.outside[a]
            && match self.state[a] {
                Loc::ForTest => idx < c,
                Loc::ForNext | Loc::CriticalSection | Loc::ExitOutside => idx <= c,
                _ => false,
            }
    }

    pub fn passed_in_critical_for(&self, a: usize) -> bool {
        self.state[a] != Loc::CriticalSection || (0..self.agents()).all(|b| b == a || self.passed(a, b))
    }

    pub fn passed_exclusive_for(&self, a: usize, b: usize) -> bool {
        !(self.passed(a, b) && self.passed(b, a))
    }

    pub fn safe_for(&self, a: usize, b: usize) -> bool {
        !(self.state[a] == Loc::CriticalSection && self.state[b] == Loc::CriticalSection) || a == b
    }
}

/// A simulated run: `snapshots[m]` is the state at moment `m`, and
/// `schedule[m]` (1-based) the agent that moves from `m` to `m + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub n: usize,
    pub schedule: Vec<usize>,
    pub snapshots: Vec<Snapshot>,
}

impl RunTrace {
    pub fn moments(&self) -> usize {
        self.snapshots.len()
    }
}

pub fn simulate(n: usize, schedule: &[usize]) -> Result<RunTrace, GenError> {
    check_agents(n)?;
    for (position, &entry) in schedule.iter().enumerate() {
        if entry == 0 || entry > n {
            return Err(GenError::ScheduleEntry { entry, position, n });
        }
    }
    let mut snapshots = vec![Snapshot::initial(n)];
    for &who in schedule {
        let next = snapshots.last().expect("nonempty").step(who - 1);
        snapshots.push(next);
    }
    Ok(RunTrace {
        n,
        schedule: schedule.to_vec(),
        snapshots,
    })
}

/// Simulates `schedule` for `k` moments and returns the run as a model.
pub fn generate_run(n: usize, k: usize, schedule: &[usize]) -> Result<PartialModel, GenError> {
    if schedule.len() != k {
        return Err(GenError::ScheduleLength {
            expected: k,
            got: schedule.len(),
        });
    }
    Ok(run_model(&simulate(n, schedule)?))
}

/// The model of a trace: domain `t0..tk`, agents, locations, booleans and
/// counter values. `next_moment` and `active_agent` are undefined at the last
/// moment. The four defined predicates are tabulated on moments and agents.
pub fn run_model(trace: &RunTrace) -> PartialModel {
    let n = trace.n;
    let k = trace.moments() - 1;
    let mut domain: Vec<String> = (0..=k).map(moment).collect();
    domain.extend((1..=n).map(agent));
    domain.extend(Loc::ALL.iter().map(|l| l.constant().to_owned()));
    domain.extend([BTRUE.to_owned(), BFALSE.to_owned()]);
    domain.extend((0..=n).map(counter_value));
    let mut m = PartialModel::new(domain.clone()).expect("generated names are distinct");
    let el = |name: &str| domain.iter().position(|d| d == name).expect("generated element");
    let t: Vec<usize> = (0..=k).map(|i| el(&moment(i))).collect();
    let a: Vec<usize> = (1..=n).map(|i| el(&agent(i))).collect();
    let loc = |l: Loc| el(l.constant());
    let c: Vec<usize> = (0..=n).map(|i| el(&counter_value(i))).collect();
    let b = |v: bool| el(boolean(v));
    fn set(m: &mut PartialModel, f: &str, args: &[usize], v: usize) {
        m.set_function(f, args, v).expect("consistent arity")
    }
    for (i, name) in domain.iter().enumerate().skip(k + 1) {
        set(&mut m, name, &[], i);
    }
    set(&mut m, "initial", &[], t[0]);
    for (i, snap) in trace.snapshots.iter().enumerate() {
        if i < k {
            set(&mut m, "next_moment", &[t[i]], t[i + 1]);
            set(&mut m, "active_agent", &[t[i]], a[trace.schedule[i] - 1]);
        }
        set(&mut m, "turn", &[t[i]], a[snap.turn]);
        for x in 0..n {
            let args = [t[i], a[x]];
            set(&mut m, "active_state", &args, loc(snap.state[x]));
            set(&mut m, "counter", &args, c[snap.counter[x]]);
            set(&mut m, "outside", &args, b(snap.outside[x]));
            set(&mut m, "stealable", &args, b(snap.stealable[x]));
            m.set_predicate("passed_in_critical_for", &args, snap.passed_in_critical_for(x)).expect("arity");
            for y in 0..n {
                let args = [t[i], a[x], a[y]];
                m.set_predicate("passed", &args, snap.passed(x, y)).expect("arity");
                m.set_predicate("passed_exclusive_for", &args, snap.passed_exclusive_for(x, y)).expect("arity");
                m.set_predicate("safe_for", &args, snap.safe_for(x, y)).expect("arity");
            }
        }
    }
    m
}
