//! Acceptance suite: one check per acceptance criterion, driven mostly
//! through the `mutagen` binary. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.
//!
//! Run alone with `cargo test -p mutagen-cli --test acceptance`.

mod common;
#[path = "../../core/tests/common/oracles.rs"]
mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use mutagen_core::harness::{
    cliffs_delta, compute_metrics, holm_adjust, wilcoxon_signed_rank, CompileOutcome, FailureReason, Magnitude,
    SmokeOutcome, SmokeVerdict, EXACT_MAX_N,
};
use mutagen_core::mutagen::{MutantRecord, MutantStatus};
use mutagen_core::pfp::MutationLocation;
use oracles::{brute_force_wilcoxon_p, check_report_invariants, reference_holm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURES: [&str; 3] = ["mini-notes", "mini-weather", "mini-tracker"];

/// Launcher activity source of each fixture, as declared in its manifest.
const LAUNCHERS: [(&str, &str); 3] = [
    ("mini-notes", "app/src/main/java/com/example/notes/MainActivity.java"),
    (
        "mini-weather",
        "app/src/main/java/com/example/weather/ForecastActivity.java",
    ),
    (
        "mini-tracker",
        "app/src/main/java/com/example/tracker/HomeActivity.java",
    ),
];

// Pinned tolerances.
const SCAN_RUNS: usize = 100;
const SCAN_BUDGET: Duration = Duration::from_secs(5);
const NCM_CEILING_PCT: f64 = 0.6;
const WILCOXON_SAMPLES: usize = 200;
const HOLM_VECTORS: usize = 50;
const METRICS_CASES: usize = 1000;
const E2E_BUDGET: Duration = Duration::from_secs(30);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn run_ok(args: &[&std::ffi::OsStr]) -> Result<std::process::Output, String> {
    let out = mutagen(args);
    if out.status.success() {
        Ok(out)
    } else {
        Err(format!("`mutagen {:?}` failed: {}", args, stderr(&out)))
    }
}

fn scan(project: &Path, extra: &[&str]) -> Result<Vec<u8>, String> {
    let mut args: Vec<&std::ffi::OsStr> = vec!["scan".as_ref(), "--project".as_ref(), project.as_os_str()];
    args.extend(extra.iter().map(std::ffi::OsStr::new));
    Ok(run_ok(&args)?.stdout)
}

fn mutate(project: &Path, out: &Path, extra: &[&str]) -> Result<(), String> {
    let mut args: Vec<&std::ffi::OsStr> = vec![
        "mutate".as_ref(),
        "--project".as_ref(),
        project.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ];
    args.extend(extra.iter().map(std::ffi::OsStr::new));
    run_ok(&args).map(|_| ())
}

fn evaluate(mutants: &Path, extra: &[&str]) -> Result<serde_json::Value, String> {
    let mut args: Vec<&std::ffi::OsStr> = vec![
        "evaluate".as_ref(),
        "--mutants".as_ref(),
        mutants.as_os_str(),
        "--proxy-compile".as_ref(),
    ];
    args.extend(extra.iter().map(std::ffi::OsStr::new));
    run_ok(&args)?;
    let text = fs::read_to_string(mutants.join("metrics-report.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn log_entries(mutants: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(mutants.join("mutation-log.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn golden_lines(fixture: &str) -> Vec<serde_json::Value> {
    fs::read_to_string(golden(&format!("{fixture}.pfp.jsonl")))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Every file under `root`, relative and sorted.
fn files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

// --- 1 --------------------------------------------------------------------

fn catalog_coverage() -> Outcome {
    let out = run_ok(&["operators".as_ref(), "--format".as_ref(), "json".as_ref()])?;
    let catalog: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let categories: BTreeSet<&str> = catalog.iter().filter_map(|o| o["category"].as_str()).collect();
    check(catalog.len() == 24, || format!("{} operators", catalog.len()))?;
    check(categories.len() == 10, || format!("{} categories", categories.len()))?;

    // BuggyGUIListener: the location starts at the listener argument and
    // end_col = start_col + length.
    let dir = tempfile::tempdir().unwrap();
    let src = "package p;\n\nimport android.app.Activity;\nimport android.view.View;\n\npublic class MainActivity extends Activity {\n    void wire(View button) {\n        button.setOnClickListener(new View.OnClickListener() {\n            public void onClick(View v) {\n                go();\n            }\n        });\n    }\n\n    void go() {}\n\n    void read(java.io.InputStream in) throws java.io.IOException {\n        in.read();\n        in.close();\n    }\n}\n";
    let project = dir.path().join("app");
    fs::create_dir_all(&project).unwrap();
    fs::write(project.join("MainActivity.java"), src).unwrap();
    let pfp = scan(&project, &["--operators", "BuggyGUIListener,NullInputStream"])?;
    let entries: Vec<serde_json::Value> = String::from_utf8_lossy(&pfp)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    check(entries.len() == 2, || {
        format!("expected 2 injection points, got {}", entries.len())
    })?;
    let gui = &entries[0];
    check(gui["operator"] == "BuggyGUIListener", || format!("{gui}"))?;
    let listener_line = src.lines().nth(7).unwrap();
    let start = listener_line.find("new View").unwrap() + 1;
    check(gui["line"] == 8 && gui["start_col"] == start, || {
        format!("BuggyGUIListener at {gui}")
    })?;
    check(
        gui["end_col"].as_u64() == Some(gui["start_col"].as_u64().unwrap() + gui["length"].as_u64().unwrap()),
        || format!("end_col != start_col + length in {gui}"),
    )?;

    // NullInputStream: `in = null;` is inserted as its own, unindented line
    // before the close.
    let mutants = dir.path().join("mutants");
    mutate(&project, &mutants, &["--operators", "NullInputStream"])?;
    let mutated = fs::read_to_string(mutants.join("mutant-0001/MainActivity.java")).map_err(|e| e.to_string())?;
    let mut expected: Vec<&str> = src.lines().collect();
    let close = expected.iter().position(|l| l.contains("in.close()")).unwrap();
    expected.insert(close, "in = null;");
    check(mutated.lines().collect::<Vec<_>>() == expected, || {
        format!("unexpected NullInputStream mutant:\n{mutated}")
    })?;
    Ok(format!(
        "{} operators in {} categories; BuggyGUIListener columns and NullInputStream insertion verified",
        catalog.len(),
        categories.len()
    ))
}

// --- 2 --------------------------------------------------------------------

fn pfp_determinism() -> Outcome {
    let mut slowest = Duration::ZERO;
    for name in FIXTURES {
        let project = fixture(name);
        let expected = fs::read(golden(&format!("{name}.pfp.jsonl"))).unwrap();
        let started = Instant::now();
        let first = scan(&project, &["--parallel", "1"])?;
        slowest = slowest.max(started.elapsed());
        check(first == expected, || {
            format!("{name}: scan differs from its golden profile")
        })?;
        check(scan(&project, &["--parallel", "8"])? == first, || {
            format!("{name}: parallel 8 differs from 1")
        })?;
        for run in 0..SCAN_RUNS {
            check(scan(&project, &[])? == first, || format!("{name}: run {run} differs"))?;
        }
    }
    check(slowest < SCAN_BUDGET, || format!("slowest scan took {slowest:?}"))?;
    Ok(format!(
        "{} fixtures match their goldens; {SCAN_RUNS} repeated runs and parallel 1 vs 8 identical; slowest scan {slowest:.2?}",
        FIXTURES.len()
    ))
}

// --- 3 --------------------------------------------------------------------

/// Byte offset of 1-based (line, char column) in `text`.
fn offset_of(text: &str, line: usize, col: usize) -> usize {
    let line_start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    text[line_start..]
        .char_indices()
        .nth(col - 1)
        .map_or(text.len(), |(i, _)| line_start + i)
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset].matches('\n').count() + 1
}

/// Checks one generated mutant; returns a description of the violation.
fn single_edit(project: &Path, mutants: &Path, entry: &serde_json::Value, original: &[PathBuf]) -> Result<(), String> {
    let id = entry["mutant_id"].as_str().unwrap();
    let clone = mutants.join(entry["clone_dir"].as_str().unwrap());
    check(files(&clone) == original, || format!("{id}: file set differs"))?;
    let changed: Vec<&PathBuf> = original
        .iter()
        .filter(|p| fs::read(project.join(p)).unwrap() != fs::read(clone.join(p)).unwrap())
        .collect();
    let logged = PathBuf::from(entry["file"].as_str().unwrap());
    check(changed == [&logged], || {
        format!("{id}: changed files {changed:?}, logged {logged:?}")
    })?;

    let old = fs::read_to_string(project.join(&logged)).unwrap();
    let new = fs::read_to_string(clone.join(&logged)).unwrap();
    let prefix = old.bytes().zip(new.bytes()).take_while(|(a, b)| a == b).count();
    let suffix = old
        .bytes()
        .rev()
        .zip(new.bytes().rev())
        .take(old.len().min(new.len()) - prefix)
        .take_while(|(a, b)| a == b)
        .count();
    let (edit_start, edit_end) = (line_at(&old, prefix), line_at(&old, old.len() - suffix));

    let line = entry["line"].as_u64().unwrap() as usize;
    let start = offset_of(&old, line, entry["start_col"].as_u64().unwrap() as usize);
    let chars = (entry["end_col"].as_u64().unwrap() - entry["start_col"].as_u64().unwrap()) as usize;
    let end = old[start..]
        .char_indices()
        .nth(chars)
        .map_or(old.len(), |(i, _)| start + i);
    let region_end = line_at(&old, end);
    // An insertion at a statement end may align with the next line start.
    check(edit_start >= line && edit_end <= region_end + 1, || {
        format!("{id}: edit on lines {edit_start}-{edit_end}, logged region {line}-{region_end}")
    })
}

fn single_edit_property() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut total = 0;
    for name in FIXTURES {
        let project = fixture(name);
        let mutants = dir.path().join(name);
        mutate(&project, &mutants, &["--parallel", "4"])?;
        let original = files(&project);
        for entry in log_entries(&mutants) {
            check(entry["status"] == "generated", || format!("{name}: {entry}"))?;
            single_edit(&project, &mutants, &entry, &original)?;
            total += 1;
        }
    }
    Ok(format!(
        "{total}/{total} mutants differ from their original in exactly one logged edit"
    ))
}

// --- 4 --------------------------------------------------------------------

fn compilability_bound() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (mut tngm, mut ncm) = (0, 0);
    let mut failures = Vec::new();
    for name in FIXTURES {
        let mutants = dir.path().join(name);
        mutate(&fixture(name), &mutants, &[])?;
        let report = evaluate(&mutants, &[])?;
        tngm += report["tngm"].as_u64().unwrap();
        ncm += report["ncm"].as_u64().unwrap();
        for m in report["mutants"].as_array().unwrap() {
            if m["compiles"] == false {
                failures.push(format!("{name}/{}: {}", m["mutant_id"], m["compile_reason"]));
            }
        }
    }
    let rate = 100.0 * ncm as f64 / tngm as f64;
    check(tngm > 0 && rate <= NCM_CEILING_PCT, || {
        format!("NCM {ncm}/{tngm} = {rate:.2}%: {failures:?}")
    })?;
    check(failures.is_empty(), || {
        format!("untriaged non-compilable mutants: {failures:?}")
    })?;
    Ok(format!("NCM {ncm}/{tngm} = {rate:.2}% (ceiling {NCM_CEILING_PCT}%)"))
}

// --- 5 --------------------------------------------------------------------

fn trivial_mutant_plumbing() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mutants = dir.path().join("notes");
    mutate(&fixture("mini-notes"), &mutants, &[])?;
    let report = evaluate(&mutants, &["--run-cmd", &smoke_command(), "--timeout-ms", "20000"])?;

    // Ground truth, recomputed from the clones.
    let null_assignment = regex::Regex::new(r"(?m)^[ \t]*[A-Za-z_][A-Za-z0-9_]*[ \t]*=[ \t]*null;").unwrap();
    let launcher = LAUNCHERS[0].1;
    let entries = log_entries(&mutants);
    let mut expected = BTreeSet::new();
    for entry in &entries {
        let source = fs::read_to_string(mutants.join(entry["clone_dir"].as_str().unwrap()).join(launcher)).unwrap();
        if null_assignment.is_match(&source) {
            expected.insert(entry["mutant_id"].as_str().unwrap().to_string());
        }
    }
    let flagged: BTreeSet<String> = report["mutants"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|m| m["smoke"] == "trivial")
        .map(|m| m["mutant_id"].as_str().unwrap().to_string())
        .collect();
    check(!expected.is_empty(), || {
        "the fixture seeds no launcher null assignment".into()
    })?;
    check(flagged == expected, || {
        format!("flagged {flagged:?}, ground truth {expected:?}")
    })?;
    check(report["tm"] == expected.len(), || format!("tm = {}", report["tm"]))?;

    // --exclude-main-activity skips precisely the launcher-file entries.
    let mut skipped_total = 0;
    for (name, launcher) in LAUNCHERS {
        let out = dir.path().join(format!("{name}-excluded"));
        mutate(&fixture(name), &out, &["--exclude-main-activity"])?;
        let entries = log_entries(&out);
        let golden = golden_lines(name);
        check(entries.len() == golden.len(), || {
            format!("{name}: log length differs from profile")
        })?;
        for (entry, g) in entries.iter().zip(&golden) {
            let in_launcher = g["file"] == launcher;
            let skipped = entry["status"] == "skipped";
            check(skipped == in_launcher, || format!("{name}: {entry}"))?;
            check(skipped == entry["clone_dir"].is_null(), || format!("{name}: {entry}"))?;
            skipped_total += skipped as usize;
        }
    }
    let excluded = dir.path().join("mini-notes-excluded");
    let report = evaluate(&excluded, &["--run-cmd", &smoke_command(), "--timeout-ms", "20000"])?;
    check(report["tm"] == 0, || {
        format!("{} trivial mutants remain after exclusion", report["tm"])
    })?;
    Ok(format!(
        "{} trivial mutants match the script's ground truth; exclusion skipped {skipped_total} launcher entries and left 0 trivial",
        expected.len()
    ))
}

// --- 6 --------------------------------------------------------------------

fn statistics_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    while done < WILCOXON_SAMPLES {
        let n = rng.gen_range(1..=EXACT_MAX_N);
        let diffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5i32..=5) as f64 / 2.0).collect();
        if diffs.iter().all(|d| *d == 0.0) {
            continue;
        }
        let pairs: Vec<(f64, f64)> = diffs.iter().map(|d| (3.0 + d, 3.0)).collect();
        let result = wilcoxon_signed_rank(&pairs).map_err(|e| e.to_string())?;
        let oracle = brute_force_wilcoxon_p(&diffs);
        check(result.exact && result.p_value == oracle, || {
            format!("diffs {diffs:?}: p = {} but enumeration gives {oracle}", result.p_value)
        })?;
        done += 1;
    }
    for _ in 0..HOLM_VECTORS {
        let m = rng.gen_range(1..=20);
        // Rounded values make ties likely.
        let ps: Vec<f64> = (0..m).map(|_| (rng.gen::<f64>() * 100.0).round() / 100.0).collect();
        let adjusted = holm_adjust(&ps);
        check(adjusted == reference_holm(&ps), || {
            format!("holm({ps:?}) = {adjusted:?}")
        })?;
    }
    let labels = [(0.35, "medium"), (0.49, "large"), (0.59, "large"), (0.61, "large")];
    for (d, label) in labels {
        check(Magnitude::of(d).as_str() == label, || {
            format!("|d| = {d} labelled {}", Magnitude::of(d).as_str())
        })?;
    }
    let (d, magnitude) = cliffs_delta(&[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    check(d == 8.0 / 9.0 && magnitude == Magnitude::Large, || {
        format!("cliffs delta {d}")
    })?;
    Ok(format!(
        "{WILCOXON_SAMPLES} exact Wilcoxon p-values equal sign enumeration; {HOLM_VECTORS} Holm vectors match; magnitude labels reproduced"
    ))
}

// --- 7 --------------------------------------------------------------------

fn metrics_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let operators = ["NullIntent", "InvalidURI", "InvalidColor", "BuggyGUIListener"];
    for case in 0..METRICS_CASES {
        let n = rng.gen_range(0..=200);
        let mut records = Vec::with_capacity(n);
        let mut compile = Vec::with_capacity(n);
        let mut smoke = Vec::new();
        let (mut ncm, mut tm) = (0, 0);
        for i in 0..n {
            let id = format!("{:04}", i + 1);
            let op = operators[rng.gen_range(0..operators.len())];
            let status = match rng.gen_range(0..10) {
                0 => MutantStatus::Skipped,
                1 => MutantStatus::TransformationFailed,
                _ => MutantStatus::Generated,
            };
            records.push(MutantRecord {
                mutant_id: id.clone(),
                operator_id: op.to_string(),
                location: MutationLocation {
                    operator_id: op.to_string(),
                    file_path: "A.java".into(),
                    line: 1,
                    start_column: 1,
                    end_column: 1,
                    length: 0,
                    captures: BTreeMap::new(),
                },
                clone_dir: (status == MutantStatus::Generated).then(|| PathBuf::from(format!("mutant-{id}"))),
                status,
                description: String::new(),
            });
            if status != MutantStatus::Generated {
                continue;
            }
            let passed = rng.gen_bool(0.8);
            compile.push(CompileOutcome {
                mutant_id: id.clone(),
                passed,
                reason: (!passed).then_some(FailureReason::Exit { status: 1 }),
            });
            if !passed {
                ncm += 1;
                continue;
            }
            let verdict = match rng.gen_range(0..4) {
                0 => SmokeVerdict::Trivial,
                1 => SmokeVerdict::Skipped,
                _ => SmokeVerdict::NonTrivial,
            };
            tm += (verdict == SmokeVerdict::Trivial) as u64;
            smoke.push(SmokeOutcome {
                mutant_id: id,
                verdict,
                reason: None,
            });
        }
        let report = compute_metrics(&records, &compile, Some(&smoke)).map_err(|e| format!("case {case}: {e}"))?;
        let generated = records.iter().filter(|r| r.status == MutantStatus::Generated).count() as u64;
        check(
            (report.tngm, report.ncm_count, report.tm_count) == (generated, ncm, tm),
            || {
                format!(
                    "case {case}: counts {:?}",
                    (report.tngm, report.ncm_count, report.tm_count)
                )
            },
        )?;
        check_report_invariants(&report).map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok(format!(
        "{METRICS_CASES} randomized result sets satisfy the report invariants"
    ))
}

// --- 8 --------------------------------------------------------------------

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let project = fixture("mini-tracker");
    let pfp = dir.path().join("pfp.jsonl");
    let mutants = dir.path().join("mutants");
    let started = Instant::now();
    run_ok(&[
        "scan".as_ref(),
        "--project".as_ref(),
        project.as_os_str(),
        "--out".as_ref(),
        pfp.as_os_str(),
    ])?;
    mutate(&project, &mutants, &[])?;
    let report = evaluate(&mutants, &[])?;
    let elapsed = started.elapsed();
    check(elapsed < E2E_BUDGET, || format!("pipeline took {elapsed:?}"))?;

    let log_errors = jsonl_schema_errors("mutation-log-entry.schema.json", &mutants.join("mutation-log.jsonl"));
    check(log_errors.is_empty(), || format!("mutation log: {log_errors:?}"))?;
    let report_errors = schema_errors("metrics-report.schema.json", &report);
    check(report_errors.is_empty(), || {
        format!("metrics report: {report_errors:?}")
    })?;
    let entries = fs::read_to_string(&pfp).unwrap().lines().count();
    check(report["tngm"] == entries, || {
        format!("tngm {} for {entries} profile entries", report["tngm"])
    })?;
    Ok(format!(
        "scan → mutate → evaluate on mini-tracker: {entries} mutants in {elapsed:.2?}; outputs schema-valid"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("catalog coverage", catalog_coverage),
        ("PFP determinism and correctness", pfp_determinism),
        ("single-edit property", single_edit_property),
        ("compilability bound", compilability_bound),
        ("trivial-mutant plumbing", trivial_mutant_plumbing),
        ("statistics kernel", statistics_kernel),
        ("metrics arithmetic", metrics_arithmetic),
        ("end-to-end pipeline", end_to_end),
    ];
    // Respect a name filter as `cargo test -- <filter>` would.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.into_iter().enumerate() {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS — {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL — {reason}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
