//! Evaluation of a generated mutant corpus: oracles, metrics and the
//! statistics used to compare corpora.

pub mod compare;
pub mod metrics;
pub mod oracles;
pub mod stats;

use std::path::Path;
use std::time::Duration;

pub use compare::{compare_tables, ComparisonRow, MetricsTable, COMPARED_METRICS};
pub use metrics::{
    compute_metrics, percent, render_percent, MetricsError, MetricsReport, MetricsRow, OperatorBreakdown,
};
pub use oracles::{
    check_compilable, proxy_compile, smoke_test, CompileOracle, CompileOutcome, FailureReason, SmokeOutcome,
    SmokeVerdict, CRASH_MARKER,
};
pub use stats::{
    cliffs_delta, holm_adjust, wilcoxon_normal_approx, wilcoxon_signed_rank, Magnitude, StatResult, StatsError,
    WilcoxonResult, EXACT_MAX_N,
};

use crate::exec::Execution;
use crate::mutagen::{MutantRecord, MutantStatus};

/// Oracle outcomes for a whole corpus, in record order.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub compile: Vec<CompileOutcome>,
    /// `None` when no smoke command was given.
    pub smoke: Option<Vec<SmokeOutcome>>,
}

/// Runs the compile oracle on every generated record and, for those that
/// compile, the smoke command. Oracles run concurrently; results come back
/// in record order.
pub fn evaluate_corpus(
    records: &[MutantRecord],
    mutants_dir: &Path,
    oracle: &CompileOracle,
    smoke: Option<(&str, Duration)>,
    execution: Execution,
) -> Evaluation {
    let generated: Vec<&MutantRecord> = records.iter().filter(|r| r.status == MutantStatus::Generated).collect();
    let results = execution.map(&generated, |_, record| {
        let compile = check_compilable(record, mutants_dir, oracle);
        let smoked = match smoke {
            Some((command, timeout)) if compile.passed => Some(smoke_test(record, mutants_dir, command, timeout)),
            _ => None,
        };
        (compile, smoked)
    });
    let mut compile = Vec::with_capacity(results.len());
    let mut smoked = Vec::new();
    for (c, s) in results {
        compile.push(c);
        smoked.extend(s);
    }
    Evaluation {
        compile,
        smoke: smoke.map(|_| smoked),
    }
}
