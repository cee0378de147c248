use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{parse_model, Backend, BackendVerdict, UnknownReason};
use crate::ast::Formula;
use crate::smtlib::print_script;

const POLL_INTERVAL: Duration = Duration::from_millis(2);

/// An external SMT solver reading a script on stdin. Each call spawns a
/// fresh process.
#[derive(Debug, Clone)]
pub struct ProcessSolver {
    name: String,
    command: Vec<String>,
    logics: Vec<String>,
}

impl ProcessSolver {
    /// `command` is the program followed by its arguments; `logics` lists the
    /// accepted logic names (empty accepts any).
    pub fn new(name: impl Into<String>, command: Vec<String>, logics: Vec<String>) -> Self {
        ProcessSolver { name: name.into(), command, logics }
    }

    pub fn command(&self) -> &[String] {
        &self.command
    }

    pub fn accepts(&self, logic: &str) -> bool {
        self.logics.is_empty() || self.logics.iter().any(|l| l == logic)
    }
}

fn failure(message: impl Into<String>) -> BackendVerdict {
    BackendVerdict::Unknown(UnknownReason::BackendFailure(message.into()))
}

impl Backend for ProcessSolver {
    fn name(&self) -> &str {
        &self.name
    }

    fn check_sat(&mut self, formula: &Formula, logic: &str, timeout: Option<Duration>) -> BackendVerdict {
        if !self.accepts(logic) {
            return BackendVerdict::Unknown(UnknownReason::Unsupported(format!("{} does not accept {logic}", self.name)));
        }
        let Some((program, args)) = self.command.split_first() else {
            return failure("empty command line");
        };
        let mut child = match Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
        {
            Ok(child) => child,
            Err(e) => return failure(format!("cannot start {program}: {e}")),
        };
        let script = print_script(formula, logic);
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let mut stdout = child.stdout.take().expect("stdout is piped");
        let reader = thread::spawn(move || {
            let mut out = String::new();
            stdout.read_to_string(&mut out).map(|_| out)
        });
        // a solver that dies early closes its end; the exit status tells the rest
        let _ = stdin.write_all(script.as_bytes());
        drop(stdin);

        let deadline = timeout.map(|t| Instant::now() + t);
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) if deadline.is_some_and(|d| Instant::now() >= d) => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return BackendVerdict::Unknown(UnknownReason::Timeout);
                }
                Ok(None) => thread::sleep(POLL_INTERVAL),
                Err(e) => return failure(format!("waiting for {program}: {e}")),
            }
        };
        let output = match reader.join() {
            Ok(Ok(out)) => out,
            _ => return failure(format!("unreadable output from {program}")),
        };
        let mut lines = output.splitn(2, '\n');
        let first = lines.next().unwrap_or("").trim();
        let rest = lines.next().unwrap_or("");
        match first {
            "sat" => match parse_model(rest, formula) {
                Ok(model) => BackendVerdict::Sat { model, raw: Some(rest.trim().to_string()) },
                Err(e) => failure(format!("bad model from {program}: {e}")),
            },
            "unsat" => BackendVerdict::Unsat,
            "unknown" => BackendVerdict::Unknown(UnknownReason::Incomplete),
            _ if !status.success() => failure(format!("{program} exited with {status}")),
            other => failure(format!("unexpected answer from {program}: {other}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smtlib::parse_script;

    #[test]
    fn missing_executable() {
        let mut solver = ProcessSolver::new("ghost", vec!["/nonexistent/solver".into()], vec![]);
        let f = parse_script("(declare-fun b () Bool) (assert b)").unwrap().formula;
        assert!(matches!(
            solver.check_sat(&f, "QF_FP", None),
            BackendVerdict::Unknown(UnknownReason::BackendFailure(_))
        ));
    }

    #[test]
    fn logic_filter() {
        let mut solver = ProcessSolver::new("bv-only", vec!["true".into()], vec!["QF_BV".into()]);
        assert!(matches!(
            solver.check_sat(&Formula::default(), "QF_FP", None),
            BackendVerdict::Unknown(UnknownReason::Unsupported(_))
        ));
    }

    #[test]
    fn scripted_answers() {
        let f = parse_script("(declare-fun b () Bool) (assert b)").unwrap().formula;
        let mut sat = ProcessSolver::new(
            "echo",
            vec!["sh".into(), "-c".into(), "cat >/dev/null; printf 'sat\\n((define-fun b () Bool true))\\n'".into()],
            vec![],
        );
        let BackendVerdict::Sat { model, raw } = sat.check_sat(&f, "QF_FP", None) else { panic!("expected sat") };
        assert_eq!(model.value_of(&f, "b"), Some(&crate::Value::Bool(true)));
        assert!(raw.unwrap().contains("define-fun"));
        let mut slow = ProcessSolver::new("slow", vec!["sh".into(), "-c".into(), "sleep 5".into()], vec![]);
        let started = Instant::now();
        assert_eq!(
            slow.check_sat(&f, "QF_FP", Some(Duration::from_millis(100))),
            BackendVerdict::Unknown(UnknownReason::Timeout)
        );
        assert!(started.elapsed() < Duration::from_secs(4));
    }
}
