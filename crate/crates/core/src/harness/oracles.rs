//! Compilability and triviality oracles.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use crate::mutagen::{MutantRecord, MutantStatus};
use crate::parsing::index_file;
use crate::project::ingest_project;

/// Marker that the smoke oracle treats as a crash even on a zero exit.
pub const CRASH_MARKER: &str = "FATAL EXCEPTION";

/// How compilability is judged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileOracle {
    /// Every subject-source file re-indexes and every XML file stays
    /// well-formed.
    Proxy,
    /// A shell command run in the clone; passes on exit code 0.
    External { command: String, timeout: Duration },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum FailureReason {
    Exit { status: i32 },
    Signal,
    Timeout,
    CommandNotFound,
    Spawn { message: String },
    IndexFailure { message: String },
    NotGenerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOutcome {
    pub mutant_id: String,
    pub passed: bool,
    pub reason: Option<FailureReason>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmokeVerdict {
    Trivial,
    NonTrivial,
    /// The smoke command could not be run; triviality is unknown.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmokeOutcome {
    pub mutant_id: String,
    pub verdict: SmokeVerdict,
    pub reason: Option<FailureReason>,
}

/// Result of running a shell command to completion or timeout.
#[derive(Debug)]
pub(crate) enum Run {
    Finished { status: Option<i32>, output: String },
    TimedOut,
    NotFound,
    SpawnFailed(String),
}

/// Runs `sh -c command` in `dir`. Output goes to a temporary file rather
/// than a pipe so that stray grandchildren cannot block the harness.
pub(crate) fn run_shell(command: &str, dir: &Path, timeout: Duration) -> Run {
    let mut capture = match tempfile::tempfile() {
        Ok(f) => f,
        Err(e) => return Run::SpawnFailed(e.to_string()),
    };
    let (out, err) = match (capture.try_clone(), capture.try_clone()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Run::SpawnFailed(e.to_string()),
    };
    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(command)
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(Stdio::from(out))
        .stderr(Stdio::from(err));
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Run::NotFound,
        Err(e) => return Run::SpawnFailed(e.to_string()),
    };
    match child.wait_timeout(timeout) {
        Ok(Some(status)) => {
            let code = status.code();
            if code == Some(127) {
                return Run::NotFound;
            }
            Run::Finished {
                status: code,
                output: read_all(&mut capture),
            }
        }
        Ok(None) => {
            kill_tree(&mut child);
            Run::TimedOut
        }
        Err(e) => {
            kill_tree(&mut child);
            Run::SpawnFailed(e.to_string())
        }
    }
}

fn read_all(f: &mut File) -> String {
    let mut buf = Vec::new();
    if f.seek(SeekFrom::Start(0)).is_ok() {
        let _ = f.read_to_end(&mut buf);
    }
    String::from_utf8_lossy(&buf).into_owned()
}

fn kill_tree(child: &mut std::process::Child) {
    #[cfg(unix)]
    {
        // The child leads its own process group; take the whole group down.
        let pgid = child.id() as libc::pid_t;
        unsafe {
            libc::killpg(pgid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
    let _ = child.wait();
}

fn generated_clone(record: &MutantRecord, mutants_dir: &Path) -> Option<std::path::PathBuf> {
    (record.status == MutantStatus::Generated)
        .then(|| record.clone_dir.as_ref().map(|d| mutants_dir.join(d)))
        .flatten()
}

/// Judges whether the mutant in `record` (relative to `mutants_dir`)
/// compiles under `oracle`.
pub fn check_compilable(record: &MutantRecord, mutants_dir: &Path, oracle: &CompileOracle) -> CompileOutcome {
    let outcome = |passed, reason| CompileOutcome {
        mutant_id: record.mutant_id.clone(),
        passed,
        reason,
    };
    let Some(dir) = generated_clone(record, mutants_dir) else {
        return outcome(false, Some(FailureReason::NotGenerated));
    };
    match oracle {
        CompileOracle::Proxy => match proxy_compile(&dir) {
            Ok(()) => outcome(true, None),
            Err(message) => outcome(false, Some(FailureReason::IndexFailure { message })),
        },
        CompileOracle::External { command, timeout } => match run_shell(command, &dir, *timeout) {
            Run::Finished { status: Some(0), .. } => outcome(true, None),
            Run::Finished { status: Some(s), .. } => outcome(false, Some(FailureReason::Exit { status: s })),
            Run::Finished { status: None, .. } => outcome(false, Some(FailureReason::Signal)),
            Run::TimedOut => outcome(false, Some(FailureReason::Timeout)),
            Run::NotFound => outcome(false, Some(FailureReason::CommandNotFound)),
            Run::SpawnFailed(message) => outcome(false, Some(FailureReason::Spawn { message })),
        },
    }
}

/// Re-ingests a project directory and indexes every classified file.
pub fn proxy_compile(dir: &Path) -> Result<(), String> {
    let project = ingest_project(dir).map_err(|e| e.to_string())?;
    for file in project.classified_files() {
        index_file(file).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Runs the smoke command in the mutant's clone. A nonzero exit, or the
/// crash marker in its output, makes the mutant trivial. A run that is
/// still going at the timeout survived launch and counts as non-trivial.
pub fn smoke_test(record: &MutantRecord, mutants_dir: &Path, run_command: &str, timeout: Duration) -> SmokeOutcome {
    let outcome = |verdict, reason| SmokeOutcome {
        mutant_id: record.mutant_id.clone(),
        verdict,
        reason,
    };
    let Some(dir) = generated_clone(record, mutants_dir) else {
        return outcome(SmokeVerdict::Skipped, Some(FailureReason::NotGenerated));
    };
    match run_shell(run_command, &dir, timeout) {
        Run::Finished {
            status: Some(0),
            output,
        } if !output.contains(CRASH_MARKER) => outcome(SmokeVerdict::NonTrivial, None),
        Run::Finished { status: Some(0), .. } => {
            outcome(SmokeVerdict::Trivial, Some(FailureReason::Exit { status: 0 }))
        }
        Run::Finished { status: Some(s), .. } => {
            outcome(SmokeVerdict::Trivial, Some(FailureReason::Exit { status: s }))
        }
        Run::Finished { status: None, .. } => outcome(SmokeVerdict::Trivial, Some(FailureReason::Signal)),
        Run::TimedOut => outcome(SmokeVerdict::NonTrivial, Some(FailureReason::Timeout)),
        Run::NotFound => outcome(SmokeVerdict::Skipped, Some(FailureReason::CommandNotFound)),
        Run::SpawnFailed(message) => outcome(SmokeVerdict::Skipped, Some(FailureReason::Spawn { message })),
    }
}
