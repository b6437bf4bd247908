use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use super::{parse_szs, BackendConfig, Status, Verdict};

/// Grace period for collecting output after the process group is killed.
const DRAIN: Duration = Duration::from_millis(500);

fn reader(mut pipe: impl Read + Send + 'static) -> mpsc::Receiver<String> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = pipe.read_to_end(&mut buf);
        let _ = tx.send(String::from_utf8_lossy(&buf).into_owned());
    });
    rx
}

/// Runs the configured prover on `task_file`, killing its whole process
/// group once `timeout` elapses.
pub fn run_external(task_file: &Path, cfg: &BackendConfig, timeout: Duration) -> Verdict {
    let start = Instant::now();
    let argv = cfg.argv(task_file, timeout.as_secs_f64().ceil().max(1.0) as u64);
    let finish = |mut v: Verdict| {
        v.wall_seconds = start.elapsed().as_secs_f64();
        v
    };
    let Some((program, args)) = argv.split_first() else {
        return finish(Verdict::new(Status::BackendError).with_note("empty command"));
    };
    let spawned = Command::new(program)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => return finish(Verdict::new(Status::BackendError).with_note(format!("cannot run {program}: {e}"))),
    };
    let out = reader(child.stdout.take().expect("piped"));
    let err = reader(child.stderr.take().expect("piped"));
    let deadline = start + timeout;
    let exit = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if Instant::now() >= deadline => break None,
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => {
                kill_group(child.id());
                let _ = child.wait();
                return finish(Verdict::new(Status::BackendError).with_note(format!("wait failed: {e}")));
            }
        }
    };
    if exit.is_none() {
        kill_group(child.id());
        let _ = child.wait();
    } else {
        // stray descendants may still hold the pipes open
        kill_group(child.id());
    }
    let stdout = out.recv_timeout(DRAIN).unwrap_or_default();
    let stderr = err.recv_timeout(DRAIN).unwrap_or_default();
    let word = parse_szs(&stdout).map(str::to_owned);
    let mut v = match (exit, &word) {
        (None, _) => Verdict::new(Status::Timeout).with_note(format!("killed after {:.1}s", timeout.as_secs_f64())),
        (Some(_), Some(w)) if cfg.success_statuses.contains(w) => Verdict::new(Status::Proved),
        (Some(_), Some(w)) if cfg.failure_statuses.contains(w) => Verdict::new(Status::Refuted),
        (Some(_), Some(w)) if w == "Timeout" => Verdict::new(Status::Timeout).with_note("prover reported Timeout"),
        (Some(_), Some(w)) => Verdict::new(Status::Unknown).with_note(format!("status {w}")),
        (Some(code), None) => {
            let tail: String = stderr.lines().last().unwrap_or("").chars().take(200).collect();
            Verdict::new(Status::Unknown).with_note(format!("no SZS status line ({code}){}", if tail.is_empty() { String::new() } else { format!(": {tail}") }))
        }
    };
    v.szs_word = word;
    v.derivation_text = Some(stdout);
    finish(v)
}

fn kill_group(pid: u32) {
    // SAFETY: kill(2) with a negative pid signals the process group we created.
    unsafe {
        libc::kill(-(pid as libc::pid_t), libc::SIGKILL);
    }
}
