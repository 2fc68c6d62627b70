//! Subprocess execution of candidate code.
//!
//! Each instance runs in a fresh interpreter started with the runner shim.
//! The child gets its own process group so a timeout kills anything it
//! spawned, and both output pipes are drained on threads with a byte cap.

use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use wait_timeout::ChildExt;

use crate::error::{Error, Result};
use crate::metrics::{self, Prediction};
use crate::par;
use crate::task::{canonical_instance_bytes, Answer, GroundTruth, TaskInstance, TaskKind};

/// Source of the bundled runner shim.
pub const SHIM_SOURCE: &str = include_str!("../shim/runner.py");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExecLimits {
    pub timeout_s: f64,
    pub max_output_bytes: usize,
    /// Address-space cap for the interpreter, in MiB.
    pub memory_mb: Option<u64>,
}

impl Default for ExecLimits {
    fn default() -> Self {
        ExecLimits {
            timeout_s: 50.0,
            max_output_bytes: 1 << 20,
            memory_mb: None,
        }
    }
}

impl ExecLimits {
    pub fn with_timeout(timeout_s: f64) -> Self {
        ExecLimits {
            timeout_s,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return Err(Error::Config(format!("timeout must be positive, got {}", self.timeout_s)));
        }
        if self.max_output_bytes == 0 {
            return Err(Error::Config("max_output_bytes must be positive".into()));
        }
        Ok(())
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Protocol,
    Exception,
    NonzeroExit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExecOutcome {
    Ok { value: Answer },
    Error { kind: ErrorKind, message: String },
    Timeout { limit_s: f64 },
}

impl ExecOutcome {
    pub fn value(&self) -> Option<&Answer> {
        match self {
            ExecOutcome::Ok { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, ExecOutcome::Ok { .. })
    }

    /// Text fed back to the model for failed runs.
    pub fn error_message(&self) -> Option<String> {
        match self {
            ExecOutcome::Ok { .. } => None,
            ExecOutcome::Error { message, .. } => Some(message.clone()),
            ExecOutcome::Timeout { limit_s } => Some(format!(
                "TimeoutError: the function did not return within {limit_s} seconds"
            )),
        }
    }

    pub fn to_prediction(&self) -> Prediction {
        match self {
            ExecOutcome::Ok { value } => Ok(value.clone()),
            other => Err(other.error_message().unwrap_or_default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteScore {
    pub accuracy: f64,
    pub feasible_rate: Option<f64>,
    pub approximation_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub outcomes: Vec<ExecOutcome>,
    pub all_pass: bool,
    pub first_error: Option<String>,
    pub score: SuiteScore,
}

impl SuiteReport {
    /// Scores outcomes against truths. Polynomial tasks pass only with every
    /// answer exact; NP-complete tasks pass when every answer is present and
    /// feasible.
    pub fn evaluate(task: TaskKind, outcomes: Vec<ExecOutcome>, truths: &[Answer]) -> Result<Self> {
        let preds: Vec<Option<Answer>> = outcomes.iter().map(|o| o.value().cloned()).collect();
        let accuracy = metrics::accuracy(&preds, truths)?;
        let (feasible_rate, approximation_ratio, all_pass) = if task.is_np_complete() {
            let fr = metrics::feasible_rate(task, &preds, truths)?;
            let ar = metrics::approximation_ratio(&preds, truths)?;
            (Some(fr), ar, fr == 1.0)
        } else {
            (None, None, accuracy == 1.0)
        };
        let first_error = outcomes.iter().find_map(ExecOutcome::error_message);
        Ok(SuiteReport {
            outcomes,
            all_pass,
            first_error,
            score: SuiteScore {
                accuracy,
                feasible_rate,
                approximation_ratio,
            },
        })
    }

    /// Message for the repair turn: the first runtime error, or a description
    /// of the first wrong or infeasible answer.
    pub fn feedback(&self, task: TaskKind, truths: &[Answer]) -> Option<String> {
        if self.all_pass {
            return None;
        }
        if let Some(e) = &self.first_error {
            return Some(e.clone());
        }
        self.outcomes.iter().zip(truths).enumerate().find_map(|(i, (o, t))| {
            let v = o.value()?;
            let bad = if task.is_np_complete() {
                !metrics::is_feasible(task, v, t).unwrap_or(false)
            } else {
                !v.matches(t)
            };
            bad.then(|| {
                format!("AssertionError: test case {} returned {v}, which is not a correct answer", i + 1)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShimSource {
    Embedded,
    Path(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Sandbox {
    pub interpreter: PathBuf,
    pub shim: ShimSource,
    pub limits: ExecLimits,
    pub workers: usize,
}

impl Default for Sandbox {
    fn default() -> Self {
        Sandbox {
            interpreter: PathBuf::from("python3"),
            shim: ShimSource::Embedded,
            limits: ExecLimits::default(),
            workers: 1,
        }
    }
}

struct Capture {
    bytes: Vec<u8>,
    overflow: bool,
}

fn drain<R: Read + Send + 'static>(mut pipe: R, cap: usize) -> JoinHandle<Capture> {
    std::thread::spawn(move || {
        let mut bytes = Vec::new();
        let mut overflow = false;
        let mut chunk = [0u8; 8192];
        loop {
            match pipe.read(&mut chunk) {
                Ok(0) | Err(_) => break,
                Ok(k) => {
                    let room = cap.saturating_sub(bytes.len());
                    if k > room {
                        overflow = true;
                    }
                    bytes.extend_from_slice(&chunk[..k.min(room)]);
                }
            }
        }
        Capture { bytes, overflow }
    })
}

fn kill_group(pid: u32) {
    // SAFETY: plain syscall; the child leads its own process group.
    unsafe {
        libc::kill(-(pid as i32), libc::SIGKILL);
    }
}

fn tail(text: &str, max_chars: usize) -> &str {
    let count = text.chars().count();
    if count <= max_chars {
        return text;
    }
    let skip = text.char_indices().nth(count - max_chars).map_or(0, |(i, _)| i);
    &text[skip..]
}

fn parse_value(task: TaskKind, value: &Value) -> Option<Answer> {
    match task {
        TaskKind::Cn => {
            let items = value.as_array()?;
            let nodes: Option<Vec<usize>> = items
                .iter()
                .map(|x| x.as_u64().and_then(|x| usize::try_from(x).ok()))
                .collect();
            Some(Answer::list(nodes?))
        }
        _ => value.as_i64().map(Answer::Int),
    }
}

fn classify(task: TaskKind, stdout: &str) -> ExecOutcome {
    let protocol = |message: String| ExecOutcome::Error {
        kind: ErrorKind::Protocol,
        message,
    };
    let Some(line) = stdout.lines().rev().find(|l| !l.trim().is_empty()) else {
        return protocol("runner produced no result line".into());
    };
    let Ok(reply) = serde_json::from_str::<Value>(line) else {
        return protocol(format!("unparseable runner output: {}", tail(line, 200)));
    };
    match reply.get("status").and_then(Value::as_str) {
        Some("ok") => match reply.get("value").and_then(|v| parse_value(task, v)) {
            Some(value) => ExecOutcome::Ok { value },
            None => protocol(format!("result has the wrong shape for {task}: {}", tail(line, 200))),
        },
        Some("error") => {
            let kind = match reply.get("type").and_then(Value::as_str) {
                Some("exception") => ErrorKind::Exception,
                _ => ErrorKind::Protocol,
            };
            let message = reply
                .get("message")
                .and_then(Value::as_str)
                .filter(|m| !m.is_empty())
                .unwrap_or("unspecified error")
                .to_string();
            ExecOutcome::Error { kind, message }
        }
        _ => protocol(format!("unrecognized runner reply: {}", tail(line, 200))),
    }
}

/// Request bytes with `code` first and the canonical instance verbatim.
pub fn shim_request(code: &str, instance: &TaskInstance) -> Vec<u8> {
    let encoded = base64::engine::general_purpose::STANDARD.encode(code.as_bytes());
    let mut bytes = Vec::with_capacity(encoded.len() + 64);
    bytes.extend_from_slice(b"{\"code\":\"");
    bytes.extend_from_slice(encoded.as_bytes());
    bytes.extend_from_slice(b"\",\"request\":");
    bytes.extend_from_slice(&canonical_instance_bytes(instance));
    bytes.push(b'}');
    bytes
}

impl Sandbox {
    pub fn new(limits: ExecLimits) -> Self {
        Sandbox {
            limits,
            ..Self::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    fn command(&self) -> Command {
        let mut cmd = Command::new(&self.interpreter);
        match &self.shim {
            ShimSource::Embedded => cmd.arg("-c").arg(SHIM_SOURCE),
            ShimSource::Path(p) => cmd.arg(p),
        };
        cmd.env("PYTHONDONTWRITEBYTECODE", "1")
            .env("PYTHONHASHSEED", "0")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .process_group(0);
        if let Some(mb) = self.limits.memory_mb {
            let bytes = mb.saturating_mul(1 << 20) as libc::rlim_t;
            // SAFETY: only async-signal-safe calls between fork and exec.
            unsafe {
                cmd.pre_exec(move || {
                    let lim = libc::rlimit {
                        rlim_cur: bytes,
                        rlim_max: bytes,
                    };
                    if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                        return Err(std::io::Error::last_os_error());
                    }
                    Ok(())
                });
            }
        }
        cmd
    }

    /// Runs `code` on one instance. Candidate faults come back as outcomes;
    /// `Err` means the harness itself failed (e.g. no interpreter).
    pub fn execute(&self, code: &str, instance: &TaskInstance) -> Result<ExecOutcome> {
        if code.trim().is_empty() {
            return Err(Error::Precondition("empty candidate code".into()));
        }
        let task = instance.task();
        let request = shim_request(code, instance);
        let mut child = self.command().spawn().map_err(|e| {
            Error::Harness(format!("cannot start {}: {e}", self.interpreter.display()))
        })?;
        let pid = child.id();
        let started = Instant::now();

        let mut stdin = child.stdin.take().expect("stdin piped");
        let writer = std::thread::spawn(move || {
            // a child that exits early closes the pipe; that is not our fault
            let _ = stdin.write_all(&request);
        });
        let out = drain(child.stdout.take().expect("stdout piped"), self.limits.max_output_bytes);
        let err = drain(child.stderr.take().expect("stderr piped"), self.limits.max_output_bytes);

        let status = child
            .wait_timeout(self.limits.timeout())
            .map_err(|e| Error::Harness(format!("waiting for runner: {e}")))?;
        let timed_out = status.is_none();
        let status = match status {
            Some(s) => s,
            None => {
                kill_group(pid);
                child
                    .wait()
                    .map_err(|e| Error::Harness(format!("reaping runner: {e}")))?
            }
        };
        // stray grandchildren may still hold the pipes open
        kill_group(pid);
        let _ = writer.join();
        let out = out.join().map_err(|_| Error::Harness("stdout reader panicked".into()))?;
        let err = err.join().map_err(|_| Error::Harness("stderr reader panicked".into()))?;
        log::trace!("runner for {task} finished in {:?}", started.elapsed());

        if timed_out {
            return Ok(ExecOutcome::Timeout {
                limit_s: self.limits.timeout_s,
            });
        }
        if out.overflow {
            return Ok(ExecOutcome::Error {
                kind: ErrorKind::Protocol,
                message: format!(
                    "runner output exceeded {} bytes",
                    self.limits.max_output_bytes
                ),
            });
        }
        let stdout = String::from_utf8_lossy(&out.bytes);
        let outcome = classify(task, &stdout);
        if !status.success() {
            if let ExecOutcome::Error {
                kind: ErrorKind::Exception,
                ..
            } = outcome
            {
                return Ok(outcome);
            }
            let stderr = String::from_utf8_lossy(&err.bytes);
            let detail = tail(stderr.trim(), 2000);
            let code = status
                .code()
                .map_or_else(|| "a signal".to_string(), |c| format!("code {c}"));
            return Ok(ExecOutcome::Error {
                kind: ErrorKind::NonzeroExit,
                message: if detail.is_empty() {
                    format!("interpreter exited with {code}")
                } else {
                    format!("interpreter exited with {code}: {detail}")
                },
            });
        }
        Ok(outcome)
    }

    /// Executes every instance, in input order.
    pub fn apply(&self, code: &str, instances: &[TaskInstance]) -> Result<Vec<ExecOutcome>> {
        par::map_with_workers(instances, self.workers, |inst| self.execute(code, inst))
            .into_iter()
            .collect()
    }

    pub fn run_suite(&self, code: &str, suite: &[(TaskInstance, GroundTruth)]) -> Result<SuiteReport> {
        let Some((first, _)) = suite.first() else {
            return Err(Error::Precondition("empty test suite".into()));
        };
        let task = first.task();
        let instances: Vec<TaskInstance> = suite.iter().map(|(i, _)| i.clone()).collect();
        let truths: Vec<Answer> = suite.iter().map(|(_, t)| t.answer.clone()).collect();
        let outcomes = self.apply(code, &instances)?;
        SuiteReport::evaluate(task, outcomes, &truths)
    }

    /// Checks that the interpreter starts and the shim answers.
    pub fn probe(&self) -> Result<()> {
        let inst = TaskInstance::graph(TaskKind::Cc, crate::graph::Graph::empty(3))?;
        match self.execute("def connected_component_undirected(G):\n    return len(G)\n", &inst)? {
            ExecOutcome::Ok {
                value: Answer::Int(3),
            } => Ok(()),
            other => Err(Error::Harness(format!("runner self-test failed: {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_replies() {
        let ok = classify(TaskKind::Cn, "noise\n{\"status\":\"ok\",\"value\":[3,2]}\n");
        assert_eq!(
            ok,
            ExecOutcome::Ok {
                value: Answer::List(vec![2, 3])
            }
        );
        assert!(matches!(
            classify(TaskKind::Mis, "{\"status\":\"ok\",\"value\":[1]}"),
            ExecOutcome::Error {
                kind: ErrorKind::Protocol,
                ..
            }
        ));
        assert!(matches!(
            classify(TaskKind::Mis, "garbage"),
            ExecOutcome::Error {
                kind: ErrorKind::Protocol,
                ..
            }
        ));
        assert!(matches!(
            classify(TaskKind::Mis, ""),
            ExecOutcome::Error {
                kind: ErrorKind::Protocol,
                ..
            }
        ));
        let e = classify(
            TaskKind::Mis,
            "{\"status\":\"error\",\"type\":\"exception\",\"message\":\"ZeroDivisionError: x\"}",
        );
        assert_eq!(e.error_message().unwrap(), "ZeroDivisionError: x");
    }

    #[test]
    fn request_keeps_key_order() {
        let inst = TaskInstance::graph(TaskKind::Cc, crate::graph::Graph::empty(1)).unwrap();
        let bytes = shim_request("x", &inst);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            r#"{"code":"eA==","request":{"task":"cc","function_name":"connected_component_undirected","instance":{"adj":[[]]}}}"#
        );
    }

    #[test]
    fn tail_respects_char_boundaries() {
        assert_eq!(tail("héllo", 3), "llo");
        assert_eq!(tail("ab", 5), "ab");
    }
}
