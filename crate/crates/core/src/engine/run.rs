use std::fmt::Write as _;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use super::Plan;
use crate::prover::{Backend, Status, Verdict};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub timeout: Duration,
    /// Maximum number of tasks in flight; 0 is treated as 1.
    pub parallel: usize,
    pub stop_on_failure: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            timeout: Duration::from_secs(10),
            parallel: 1,
            stop_on_failure: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TaskReport {
    pub id: String,
    pub verdict: Verdict,
    pub backend: String,
}

impl TaskReport {
    /// `id<TAB>verdict<TAB>seconds`
    pub fn line(&self) -> String {
        format!("{}\t{}\t{:.3}", self.id, self.verdict.status, self.verdict.wall_seconds)
    }
}

/// Verdicts in plan order.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub results: Vec<TaskReport>,
    pub skipped: Vec<String>,
}

impl Report {
    pub fn success(&self) -> bool {
        self.results.iter().all(|r| r.verdict.is_proved())
    }

    pub fn get(&self, id: &str) -> Option<&TaskReport> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn status(&self, id: &str) -> Option<Status> {
        self.get(id).map(|r| r.verdict.status)
    }

    pub fn count(&self, status: Status) -> usize {
        self.results.iter().filter(|r| r.verdict.status == status).count()
    }

    pub fn lines(&self) -> String {
        self.results.iter().map(|r| r.line() + "\n").collect()
    }

    pub fn table(&self) -> String {
        let width = self.results.iter().map(|r| r.id.len()).max().unwrap_or(4).max(4);
        let mut out = format!("{:<width$}  {:<12}  {:>8}  backend\n", "task", "verdict", "seconds");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<width$}  {:<12}  {:>8.3}  {}",
                r.id,
                r.verdict.status.as_str(),
                r.verdict.wall_seconds,
                r.backend
            );
        }
        for s in &self.skipped {
            let _ = writeln!(out, "{s:<width$}  {:<12}", "skipped");
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum State {
    Pending,
    Running,
    Done,
}

/// Runs every task once its dependencies are proved, at most
/// `opts.parallel` at a time. `on_done` sees each verdict in completion
/// order, always from the calling thread.
pub fn run(plan: &Plan, backend: &dyn Backend, opts: &RunOptions, mut on_done: impl FnMut(&TaskReport)) -> Report {
    let tasks = &plan.tasks;
    let index = |id: &str| tasks.iter().position(|t| t.id == id);
    let deps: Vec<Vec<usize>> = tasks.iter().map(|t| t.depends_on.iter().filter_map(|d| index(d)).collect()).collect();
    let mut state = vec![State::Pending; tasks.len()];
    let mut results: Vec<Option<TaskReport>> = vec![None; tasks.len()];
    let parallel = opts.parallel.max(1);
    let mut failed = false;
    thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Verdict)>();
        let mut running = 0;
        loop {
            for i in 0..tasks.len() {
                if state[i] != State::Pending {
                    continue;
                }
                let blocked = deps[i]
                    .iter()
                    .any(|&d| state[d] == State::Done && !results[d].as_ref().is_some_and(|r| r.verdict.is_proved()));
                if blocked || (failed && opts.stop_on_failure) {
                    let why = if blocked { "a premise task failed" } else { "stopped after an earlier failure" };
                    let report = TaskReport {
                        id: tasks[i].id.clone(),
                        verdict: Verdict::new(Status::NotAttempted).with_note(why),
                        backend: backend.name().to_owned(),
                    };
                    on_done(&report);
                    results[i] = Some(report);
                    state[i] = State::Done;
                    continue;
                }
                let ready = deps[i].iter().all(|&d| state[d] == State::Done);
                if ready && running < parallel {
                    state[i] = State::Running;
                    running += 1;
                    let tx = tx.clone();
                    let task = &tasks[i];
                    let timeout = opts.timeout;
                    scope.spawn(move || {
                        let verdict = backend.prove(&task.problem(), timeout);
                        let _ = tx.send((i, verdict));
                    });
                }
            }
            if running == 0 {
                break;
            }
            let Ok((i, verdict)) = rx.recv() else { break };
            running -= 1;
            failed |= !verdict.is_proved();
            let report = TaskReport {
                id: tasks[i].id.clone(),
                verdict,
                backend: backend.name().to_owned(),
            };
            on_done(&report);
            results[i] = Some(report);
            state[i] = State::Done;
        }
    });
    Report {
        results: results.into_iter().flatten().collect(),
        skipped: plan.skipped.clone(),
    }
}
