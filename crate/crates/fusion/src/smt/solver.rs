//! One long-lived solver process speaking SMT-LIB2 over pipes.
//!
//! Every query runs between `push` and `pop` and ends with an `echo` of a
//! fresh marker, so responses are delimited without parsing. A reader thread
//! forwards stdout lines over a channel; a query that outlives its deadline
//! kills the process, and the next query starts a new one.

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use fusion_core::oracle::Verdict;

use super::emit::{Query, LOGIC};
use crate::sexp::{self, Sexp};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("cannot start solver `{command}`: {source}")]
    Spawn { command: String, source: std::io::Error },
    #[error("solver `{command}` did not answer a trivial query: {detail}")]
    Handshake { command: String, detail: String },
}

/// How to run the solver. A bare program name gets z3's `-in -smt2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl SolverConfig {
    pub fn from_command(command: &str, timeout: Duration) -> Self {
        let mut words = command.split_whitespace().map(str::to_owned);
        let program = words.next().unwrap_or_else(|| "z3".into());
        let mut args: Vec<String> = words.collect();
        if args.is_empty() {
            args = vec!["-in".into(), "-smt2".into()];
        }
        SolverConfig { program, args, timeout }
    }

    pub fn command_line(&self) -> String {
        std::iter::once(self.program.as_str()).chain(self.args.iter().map(String::as_str)).collect::<Vec<_>>().join(" ")
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_command("z3", Duration::from_secs(10))
    }
}

pub struct Solver {
    config: SolverConfig,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    /// The last [`STDERR_TAIL`] bytes the process wrote to stderr.
    stderr: Arc<Mutex<Vec<u8>>>,
    stderr_reader: Option<JoinHandle<()>>,
    marker: u64,
}

const STDERR_TAIL: usize = 4096;

/// Grace period beyond the solver's own timeout before the process is
/// presumed stuck.
const GRACE: Duration = Duration::from_secs(2);

enum Reply {
    Lines(Vec<String>),
    Dead(String),
}

impl Solver {
    pub fn spawn(config: &SolverConfig) -> Result<Solver, SolverError> {
        let spawn_err = |source| SolverError::Spawn { command: config.command_line(), source };
        let mut child = Command::new(&config.program)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(spawn_err)?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = child.stdout.take().expect("piped");
        let mut err_pipe = child.stderr.take().expect("piped");
        let stderr = Arc::new(Mutex::new(Vec::new()));
        let sink = stderr.clone();
        let stderr_reader = thread::spawn(move || {
            let mut buf = [0u8; 1024];
            while let Ok(n @ 1..) = err_pipe.read(&mut buf) {
                let mut tail = sink.lock().unwrap_or_else(|e| e.into_inner());
                tail.extend_from_slice(&buf[..n]);
                let excess = tail.len().saturating_sub(STDERR_TAIL);
                tail.drain(..excess);
            }
        });
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(l) = line else { break };
                if tx.send(l).is_err() {
                    break;
                }
            }
        });
        let mut s = Solver {
            config: config.clone(),
            child,
            stdin,
            lines,
            stderr,
            stderr_reader: Some(stderr_reader),
            marker: 0,
        };
        let ms = config.timeout.as_millis().max(1);
        let prelude = format!(
            "(set-option :print-success false)\n(set-option :produce-models true)\n(set-option :timeout {ms})\n(set-logic {LOGIC})\n"
        );
        let handshake = |detail: String| SolverError::Handshake { command: config.command_line(), detail };
        match s.exchange(&format!("{prelude}(push 1)\n(assert false)\n(check-sat)\n(pop 1)\n")) {
            Reply::Lines(ls) if ls.iter().any(|l| l.trim() == "unsat") => Ok(s),
            Reply::Lines(ls) => Err(handshake(ls.join(" "))),
            Reply::Dead(why) => Err(handshake(why)),
        }
    }

    /// Sends `commands`, then waits for the lines printed before the marker.
    fn exchange(&mut self, commands: &str) -> Reply {
        self.marker += 1;
        let marker = format!("sync!{}", self.marker);
        let script = format!("{commands}(echo \"{marker}\")\n");
        if let Err(e) = self.stdin.write_all(script.as_bytes()).and_then(|()| self.stdin.flush()) {
            return self.dead(format!("write failed: {e}"));
        }
        let deadline = Instant::now() + self.config.timeout + GRACE;
        let mut out = Vec::new();
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(l) if l.contains(&marker) => return Reply::Lines(out),
                Ok(l) => out.push(l),
                Err(RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return self.dead(format!("no answer within {:?}", self.config.timeout));
                }
                Err(RecvTimeoutError::Disconnected) => return self.dead("solver exited".into()),
            }
        }
    }

    /// A failure message with the exit status and whatever the process
    /// last wrote to stderr.
    fn dead(&mut self, why: String) -> Reply {
        // Closing stdout usually means the process is exiting; give it a
        // moment to finish writing stderr. The pipe may also be held by a
        // grandchild, so every wait here is bounded.
        let deadline = Instant::now() + Duration::from_millis(500);
        let mut status = None;
        while status.is_none() && Instant::now() < deadline {
            match self.child.try_wait() {
                Ok(Some(st)) => status = Some(st),
                Ok(None) => thread::sleep(Duration::from_millis(5)),
                Err(_) => break,
            }
        }
        if status.is_none() {
            let _ = self.child.kill();
            status = self.child.wait().ok();
        }
        while self.stderr_reader.as_ref().is_some_and(|h| !h.is_finished()) && Instant::now() < deadline {
            thread::sleep(Duration::from_millis(5));
        }
        if self.stderr_reader.as_ref().is_some_and(JoinHandle::is_finished) {
            let _ = self.stderr_reader.take().map(JoinHandle::join);
        }
        let mut msg = why;
        if let Some(st) = status.filter(|st| !st.success()) {
            msg.push_str(&format!(" ({st})"));
        }
        let tail = self.stderr.lock().unwrap_or_else(|e| e.into_inner());
        let text = String::from_utf8_lossy(&tail);
        if !text.trim().is_empty() {
            msg.push_str(&format!("; stderr: {}", text.trim()));
        }
        Reply::Dead(msg)
    }

    /// The verdict on the validity of `q`. `Err` means the process must be
    /// replaced; the message describes why.
    pub fn check(&mut self, q: &Query) -> Result<Verdict, String> {
        let lines = match self.exchange(&format!("(push 1)\n{}(check-sat)\n", q.commands())) {
            Reply::Lines(ls) => ls,
            Reply::Dead(why) => return Err(why),
        };
        let verdict = if let Some(e) = lines.iter().find(|l| l.trim_start().starts_with("(error")) {
            Verdict::Unknown(e.trim().to_owned())
        } else {
            match lines.iter().map(|l| l.trim()).find(|l| !l.is_empty()) {
                Some("unsat") => Verdict::Valid,
                Some("sat") => match self.exchange("(get-model)\n") {
                    Reply::Lines(ls) => Verdict::Invalid(Some(render_model(&ls.join("\n")))),
                    Reply::Dead(why) => return Err(why),
                },
                Some("unknown") | Some("timeout") => Verdict::Unknown("solver returned unknown".into()),
                other => Verdict::Unknown(format!("unexpected solver output {:?}", other.unwrap_or(""))),
            }
        };
        match self.exchange("(pop 1)\n") {
            Reply::Lines(_) => Ok(verdict),
            Reply::Dead(why) => Err(why),
        }
    }
}

impl Drop for Solver {
    fn drop(&mut self) {
        let _ = self.stdin.write_all(b"(exit)\n");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// `x = 3, y = -1` from a `get-model` response; the raw text when it has an
/// unfamiliar shape. Solver-internal abbreviations are left out.
pub fn render_model(text: &str) -> String {
    fn value(s: &Sexp) -> String {
        match s {
            Sexp::List(xs) if xs.len() == 2 && xs[0].atom() == Some("-") => format!("-{}", value(&xs[1])),
            other => other.to_string(),
        }
    }
    let Ok(forms) = sexp::parse_all(text) else { return text.trim().to_owned() };
    let defs: &[Sexp] = match forms.as_slice() {
        [Sexp::List(xs)] if xs.first().and_then(Sexp::atom) == Some("model") => &xs[1..],
        [Sexp::List(xs)] => xs,
        _ => return text.trim().to_owned(),
    };
    let mut out = Vec::new();
    for d in defs {
        match d.list() {
            Some([head, name, params, _, v]) if head.atom() == Some("define-fun") => {
                let name = name.atom().unwrap_or("?");
                if params.list().is_some_and(|p| p.is_empty()) && !name.starts_with("share!") && name != "unit" {
                    out.push(format!("{name} = {}", value(v)));
                }
            }
            _ => {}
        }
    }
    out.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_are_rendered_as_bindings() {
        let m = "(\n  (define-fun |x#2| () Int\n    (- 1))\n  (define-fun share!0 () Bool true)\n  (define-fun y () Int 4)\n)";
        assert_eq!(render_model(m), "x#2 = -1, y = 4");
    }

    #[test]
    fn bare_commands_get_z3_flags() {
        let c = SolverConfig::from_command("z3", Duration::from_secs(1));
        assert_eq!(c.command_line(), "z3 -in -smt2");
        let c = SolverConfig::from_command("cvc5 --lang smt2 --incremental", Duration::from_secs(1));
        assert_eq!(c.args, ["--lang", "smt2", "--incremental"]);
    }

    #[test]
    fn stderr_of_a_failed_solver_is_reported() {
        let c = SolverConfig::from_command("sh -c exec>&2;echo${IFS}bad${IFS}flag;exit${IFS}3", Duration::from_secs(1));
        match Solver::spawn(&c) {
            Err(SolverError::Handshake { detail, .. }) => {
                assert!(detail.contains("stderr: bad flag"), "{detail}");
                assert!(detail.contains('3'), "{detail}");
            }
            other => panic!("{:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn missing_programs_are_reported() {
        let c = SolverConfig::from_command("/nonexistent/solver", Duration::from_secs(1));
        assert!(matches!(Solver::spawn(&c), Err(SolverError::Spawn { .. })));
    }
}
