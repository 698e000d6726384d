//! Runs generated Python in a child process with a fresh working directory,
//! a wall-clock limit, and capped output capture.
//!
//! The child is started in its own process group and the whole group is
//! killed when the run ends, so processes it forks cannot outlive it.

use std::fs;
use std::io::{self, Read, Write};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use apl_core::TargetSource;
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const DEFAULT_MAX_OUTPUT: usize = 1 << 20;
const SCRIPT_NAME: &str = "main.py";
const POLL_INTERVAL: Duration = Duration::from_millis(5);

#[derive(Debug, Error)]
pub enum RunError {
    #[error("interpreter not found: {0}")]
    InterpreterNotFound(PathBuf),
    #[error("failed to start interpreter: {0}")]
    SpawnFailure(#[source] io::Error),
    #[error("attachment rejected: {0:?} (only bare .txt file names are allowed)")]
    AttachmentRejected(String),
    #[error("invalid run policy: {0}")]
    InvalidPolicy(String),
    #[error("i/o error preparing the run: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug)]
pub struct RunPolicy {
    pub timeout: Duration,
    pub workdir: PathBuf,
    pub interpreter: PathBuf,
    pub max_output: usize,
    /// Leave the per-run directory on disk instead of deleting it.
    pub keep: bool,
    pub stdin: Option<String>,
}

impl RunPolicy {
    /// Default policy: `python3` from `PATH`, runs under the system temp dir.
    pub fn new() -> Result<Self, RunError> {
        let interpreter = find_in_path("python3").ok_or_else(|| RunError::InterpreterNotFound("python3".into()))?;
        Ok(RunPolicy {
            timeout: DEFAULT_TIMEOUT,
            workdir: std::env::temp_dir(),
            interpreter,
            max_output: DEFAULT_MAX_OUTPUT,
            keep: false,
            stdin: None,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_workdir(mut self, workdir: impl Into<PathBuf>) -> Self {
        self.workdir = workdir.into();
        self
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.timeout.is_zero() {
            return Err(RunError::InvalidPolicy("timeout must be positive".into()));
        }
        let meta = fs::metadata(&self.workdir)
            .map_err(|e| RunError::InvalidPolicy(format!("workdir {}: {e}", self.workdir.display())))?;
        if !meta.is_dir() || meta.permissions().readonly() {
            return Err(RunError::InvalidPolicy(format!("workdir {} is not a writable directory", self.workdir.display())));
        }
        if !is_executable(&self.interpreter) {
            return Err(RunError::InterpreterNotFound(self.interpreter.clone()));
        }
        Ok(())
    }
}

fn is_executable(path: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    fs::metadata(path).is_ok_and(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
}

pub fn find_in_path(program: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|dir| dir.join(program)).find(|p| is_executable(p))
}

/// A file staged next to the script before it runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub name: String,
    pub content: Vec<u8>,
}

impl Attachment {
    pub fn new(name: impl Into<String>, content: impl Into<Vec<u8>>) -> Self {
        Attachment { name: name.into(), content: content.into() }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let n = &self.name;
        let ok = n.len() > ".txt".len()
            && n.ends_with(".txt")
            && !n.starts_with('.')
            && !n.contains(['/', '\\', '\0'])
            && !n.chars().any(char::is_control);
        if ok {
            Ok(())
        } else {
            Err(RunError::AttachmentRejected(n.clone()))
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunResult {
    pub stdout: String,
    pub stderr: String,
    pub stdout_truncated: bool,
    pub stderr_truncated: bool,
    /// Exit status, absent when the child was killed by a signal.
    pub exit_code: Option<i32>,
    pub signal: Option<i32>,
    /// Wall-clock seconds.
    pub duration: f64,
    pub timed_out: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kept_dir: Option<PathBuf>,
}

impl RunResult {
    pub fn success(&self) -> bool {
        self.exit_code == Some(0) && !self.timed_out
    }
}

struct Captured {
    bytes: Vec<u8>,
    truncated: bool,
}

/// Reads everything from `stream`, keeping at most `cap` bytes.
fn capture(mut stream: impl Read, cap: usize) -> Captured {
    let mut bytes = Vec::new();
    let mut truncated = false;
    let mut buf = [0u8; 8192];
    loop {
        match stream.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => {
                let room = cap.saturating_sub(bytes.len());
                if n > room {
                    truncated = true;
                }
                bytes.extend_from_slice(&buf[..n.min(room)]);
            }
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(_) => break,
        }
    }
    Captured { bytes, truncated }
}

/// Lossy UTF-8 decoding that drops a code point cut in half by truncation.
fn decode(c: Captured) -> (String, bool) {
    let mut bytes = c.bytes;
    if c.truncated {
        if let Err(e) = std::str::from_utf8(&bytes) {
            if e.error_len().is_none() {
                bytes.truncate(e.valid_up_to());
            }
        }
    }
    (String::from_utf8_lossy(&bytes).into_owned(), c.truncated)
}

fn kill_group(pgid: u32) {
    // SAFETY: kill(2) with a negative pid signals a process group; no memory is touched.
    unsafe {
        libc::kill(-(pgid as libc::pid_t), libc::SIGKILL);
    }
}

pub fn run(code: &TargetSource, policy: &RunPolicy, attachments: &[Attachment]) -> Result<RunResult, RunError> {
    policy.validate()?;
    for a in attachments {
        a.validate()?;
    }

    let dir = tempfile::Builder::new().prefix("apl-run-").tempdir_in(&policy.workdir)?;
    fs::write(dir.path().join(SCRIPT_NAME), &code.text)?;
    for a in attachments {
        fs::write(dir.path().join(&a.name), &a.content)?;
    }

    let mut cmd = Command::new(&policy.interpreter);
    cmd.arg(SCRIPT_NAME)
        .current_dir(dir.path())
        .env_clear()
        .env("PATH", std::env::var_os("PATH").unwrap_or_else(|| "/usr/local/bin:/usr/bin:/bin".into()))
        .env("LANG", "C.UTF-8")
        .env("LC_ALL", "C.UTF-8")
        .env("PYTHONIOENCODING", "utf-8")
        .env("PYTHONDONTWRITEBYTECODE", "1")
        .stdin(if policy.stdin.is_some() { Stdio::piped() } else { Stdio::null() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0);

    let start = Instant::now();
    let mut child = cmd.spawn().map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => RunError::InterpreterNotFound(policy.interpreter.clone()),
        _ => RunError::SpawnFailure(e),
    })?;
    let pgid = child.id();
    log::debug!("started run {} in {}", pgid, dir.path().display());

    if let (Some(mut pipe), Some(input)) = (child.stdin.take(), policy.stdin.clone()) {
        thread::spawn(move || {
            let _ = pipe.write_all(input.as_bytes());
        });
    }
    let cap = policy.max_output;
    let out = child.stdout.take().map(|s| thread::spawn(move || capture(s, cap)));
    let err = child.stderr.take().map(|s| thread::spawn(move || capture(s, cap)));

    let mut timed_out = false;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() >= policy.timeout {
            timed_out = true;
            kill_group(pgid);
            break child.wait()?;
        }
        thread::sleep(POLL_INTERVAL);
    };
    // leftover members of the group would keep the pipes open
    kill_group(pgid);
    let duration = start.elapsed();

    let join = |h: Option<thread::JoinHandle<Captured>>| {
        h.and_then(|h| h.join().ok()).unwrap_or(Captured { bytes: Vec::new(), truncated: false })
    };
    let (stdout, stdout_truncated) = decode(join(out));
    let (stderr, stderr_truncated) = decode(join(err));

    let kept_dir = if policy.keep { Some(dir.keep()) } else { None };

    Ok(RunResult {
        stdout,
        stderr,
        stdout_truncated,
        stderr_truncated,
        exit_code: status.code(),
        signal: status.signal(),
        duration: duration.as_secs_f64(),
        timed_out,
        kept_dir,
    })
}
