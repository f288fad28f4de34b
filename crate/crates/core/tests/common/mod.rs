//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use mutagen_core::operators::list_operators;

pub mod oracles;

/// Bundled fixture projects, smallest first.
pub const FIXTURES: &[&str] = &["mini-notes", "mini-weather", "mini-tracker"];

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

pub fn golden(name: &str) -> PathBuf {
    fixtures_dir().join("golden").join(name)
}

pub fn all_operators() -> BTreeSet<String> {
    list_operators().iter().map(|d| d.id.to_string()).collect()
}

pub fn selection(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Compares `actual` with the golden file, or rewrites the golden file when
/// `MUTAGEN_BLESS=1` is set (review the diff before committing it).
pub fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("MUTAGEN_BLESS").is_some_and(|v| v == "1") {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    if expected != actual {
        let first = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()));
        panic!(
            "{name} differs from its golden file at line {}:\n  expected: {}\n  actual:   {}",
            first + 1,
            expected.lines().nth(first).unwrap_or("<eof>"),
            actual.lines().nth(first).unwrap_or("<eof>"),
        );
    }
}

/// Every file under `root`, relative, with `/` separators, sorted.
pub fn tree(root: &Path) -> Vec<String> {
    let mut out: Vec<String> = walkdir::WalkDir::new(root)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            e.path()
                .strip_prefix(root)
                .unwrap()
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/")
        })
        .collect();
    out.sort();
    out
}
