//! Helpers shared by the CLI tests: running the binary, locating fixtures
//! and validating outputs against the checked-in JSON schemas.
#![allow(dead_code)]

use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    repo_root().join("fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    repo_root().join("fixtures/golden").join(name)
}

pub fn smoke_command() -> String {
    format!(
        "sh '{}'",
        repo_root().join("fixtures/scripts/launcher-smoke.sh").display()
    )
}

/// Runs `mutagen` with `args` and a clean seed environment.
pub fn mutagen<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_mutagen"))
        .args(args)
        .env_remove("MUTAGEN_SEED")
        .env_remove("RUST_LOG")
        .output()
        .expect("running mutagen")
}

pub fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

pub fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

pub fn code(output: &Output) -> i32 {
    output.status.code().expect("mutagen exited on a signal")
}

/// Asserts a zero exit, showing stderr otherwise.
pub fn success(output: Output) -> Output {
    assert_eq!(code(&output), 0, "stderr:\n{}", stderr(&output));
    output
}

fn validator(schema: &str) -> jsonschema::Validator {
    let path = repo_root().join("docs/schemas").join(schema);
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Validates one JSON document; returns every violation.
pub fn schema_errors(schema: &str, instance: &serde_json::Value) -> Vec<String> {
    validator(schema)
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect()
}

/// Validates every line of a JSON Lines file; returns every violation.
pub fn jsonl_schema_errors(schema: &str, path: &Path) -> Vec<String> {
    let validator = validator(schema);
    let text = std::fs::read_to_string(path).unwrap();
    let mut errors = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let value: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => {
                errors.push(format!("line {}: {e}", n + 1));
                continue;
            }
        };
        errors.extend(
            validator
                .iter_errors(&value)
                .map(|e| format!("line {}: {e} at {}", n + 1, e.instance_path)),
        );
    }
    errors
}

/// Golden profile lines whose operator is in `operators`.
pub fn golden_entries(fixture: &str, operators: &[&str]) -> usize {
    std::fs::read_to_string(golden(&format!("{fixture}.pfp.jsonl")))
        .unwrap()
        .lines()
        .filter(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            operators.contains(&v["operator"].as_str().unwrap())
        })
        .count()
}

/// Directories named `mutant-*` directly under `dir`.
pub fn clone_dirs(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().unwrap().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("mutant-"))
        .collect();
    names.sort();
    names
}
