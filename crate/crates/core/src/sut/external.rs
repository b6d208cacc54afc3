//! Adapter running a user program as a SUT: arguments on argv, output on stdout.

use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use wait_timeout::ChildExt;

use super::{ErrorKind, ExecutionOutcome};
use crate::error::{Error, Result};
use crate::value::InputTuple;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// Program plus fixed leading arguments; the rendered input is appended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalCommand {
    program: String,
    args: Vec<String>,
    timeout: Duration,
}

impl ExternalCommand {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalCommand {
            program: program.into(),
            args,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    /// Splits a command line on whitespace. No shell quoting is interpreted.
    pub fn parse(command_line: &str) -> Result<Self> {
        let mut parts = command_line.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| Error::Config("empty external command".into()))?;
        Ok(Self::new(program, parts.collect()))
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    pub fn command_line(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut r) = r {
            let _ = r.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Runs the command once. Exit 0 gives a valid outcome with trimmed stdout,
/// a nonzero exit a `CommandError` carrying stderr; spawn failures and
/// timeouts become `ArgumentError` outcomes.
pub fn run_external(cmd: &ExternalCommand, input: &InputTuple) -> ExecutionOutcome {
    let spawned = Command::new(&cmd.program)
        .args(&cmd.args)
        .args(input.values().iter().map(|v| v.render()))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => {
            return ExecutionOutcome::message_error(
                ErrorKind::ArgumentError,
                format!("cannot run {}: {e}", cmd.program),
            )
        }
    };
    let out = drain(child.stdout.take());
    let err = drain(child.stderr.take());
    let status = match child.wait_timeout(cmd.timeout) {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            return ExecutionOutcome::message_error(
                ErrorKind::ArgumentError,
                format!("{} timed out after {:?}", cmd.program, cmd.timeout),
            );
        }
        Err(e) => {
            let _ = child.kill();
            return ExecutionOutcome::message_error(
                ErrorKind::ArgumentError,
                format!("waiting for {} failed: {e}", cmd.program),
            );
        }
    };
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    if status.success() {
        ExecutionOutcome::valid(stdout.trim())
    } else {
        ExecutionOutcome::message_error(ErrorKind::CommandError, stderr.trim())
    }
}
