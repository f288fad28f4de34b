//! Corpus metrics: generated, non-compilable and trivial mutants.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::oracles::{CompileOutcome, SmokeOutcome, SmokeVerdict};
use crate::mutagen::{MutantRecord, MutantStatus};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorBreakdown {
    pub tngm: u64,
    pub ncm: u64,
    pub tm: u64,
}

/// Counts are exact; percentages are exact rationals, rendered with
/// [`render_percent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    /// Total number of generated mutants.
    pub tngm: u64,
    /// Non-compilable mutants.
    pub ncm_count: u64,
    /// Trivial mutants among those that compiled.
    pub tm_count: u64,
    /// Compiled mutants whose smoke run could not be performed.
    pub smoke_skipped: u64,
    pub per_operator: BTreeMap<String, OperatorBreakdown>,
}

impl MetricsReport {
    pub fn ncm_percent(&self) -> Ratio<u64> {
        percent(self.ncm_count, self.tngm)
    }

    pub fn tm_percent(&self) -> Ratio<u64> {
        percent(self.tm_count, self.tngm)
    }

    /// Mutants that were smoke-tested: the compiled ones.
    pub fn smoke_tested(&self) -> u64 {
        self.tngm - self.ncm_count - self.smoke_skipped
    }

    /// JSON rendering with percentages rounded to two decimals.
    pub fn to_json(&self, app: Option<&str>) -> serde_json::Value {
        let per_operator: BTreeMap<&str, serde_json::Value> = self
            .per_operator
            .iter()
            .map(|(id, b)| {
                (
                    id.as_str(),
                    serde_json::json!({
                        "tngm": b.tngm,
                        "ncm": b.ncm,
                        "tm": b.tm,
                    }),
                )
            })
            .collect();
        serde_json::json!({
            "app": app,
            "denominators": "ncm_pct and tm_pct are relative to tngm; only mutants that compiled are smoke-tested",
            "tngm": self.tngm,
            "ncm": self.ncm_count,
            "ncm_pct": rendered_number(self.ncm_percent()),
            "tm": self.tm_count,
            "tm_pct": rendered_number(self.tm_percent()),
            "smoke_tested": self.smoke_tested(),
            "smoke_skipped": self.smoke_skipped,
            "per_operator": per_operator,
        })
    }

    /// One row of the per-app metrics CSV.
    pub fn csv_row(&self, app: &str) -> MetricsRow {
        MetricsRow {
            app: app.to_string(),
            tngm: self.tngm,
            ncm: self.ncm_count,
            ncm_pct: render_percent(self.ncm_percent()),
            tm: self.tm_count,
            tm_pct: render_percent(self.tm_percent()),
        }
    }
}

/// Row of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub app: String,
    pub tngm: u64,
    pub ncm: u64,
    pub ncm_pct: String,
    pub tm: u64,
    pub tm_pct: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no compile result for mutant(s) {}", .0.join(", "))]
    MissingCompileResults(Vec<String>),
    #[error("no smoke result for compiled mutant(s) {}", .0.join(", "))]
    MissingSmokeResults(Vec<String>),
}

/// `100 * part / whole`, or zero when `whole` is zero.
pub fn percent(part: u64, whole: u64) -> Ratio<u64> {
    if whole == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(100 * part, whole)
    }
}

/// Rounds half to even at two decimals and formats as `d.dd`.
pub fn render_percent(value: Ratio<u64>) -> String {
    let hundredths = value * 100;
    let floor = hundredths.to_integer();
    let frac = hundredths - Ratio::from_integer(floor);
    let half = Ratio::new(1, 2);
    let rounded = if frac > half || (frac == half && floor % 2 == 1) {
        floor + 1
    } else {
        floor
    };
    format!("{}.{:02}", rounded / 100, rounded % 100)
}

fn rendered_number(value: Ratio<u64>) -> serde_json::Value {
    let text = render_percent(value);
    serde_json::from_str(&text).expect("rendered percentages are valid JSON numbers")
}

/// Folds oracle results over the generated records.
///
/// Every generated record needs a compile result, and every one that
/// compiled needs a smoke result; `smoke` may be `None` when no smoke
/// command was given, in which case no mutant is counted trivial.
pub fn compute_metrics(
    records: &[MutantRecord],
    compile: &[CompileOutcome],
    smoke: Option<&[SmokeOutcome]>,
) -> Result<MetricsReport, MetricsError> {
    let compiled: HashMap<&str, bool> = compile.iter().map(|c| (c.mutant_id.as_str(), c.passed)).collect();
    let smoked: HashMap<&str, SmokeVerdict> = smoke
        .unwrap_or_default()
        .iter()
        .map(|s| (s.mutant_id.as_str(), s.verdict))
        .collect();
    let generated: Vec<&MutantRecord> = records.iter().filter(|r| r.status == MutantStatus::Generated).collect();

    let missing: BTreeSet<String> = generated
        .iter()
        .filter(|r| !compiled.contains_key(r.mutant_id.as_str()))
        .map(|r| r.mutant_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(MetricsError::MissingCompileResults(missing.into_iter().collect()));
    }
    if smoke.is_some() {
        let missing: BTreeSet<String> = generated
            .iter()
            .filter(|r| compiled[r.mutant_id.as_str()] && !smoked.contains_key(r.mutant_id.as_str()))
            .map(|r| r.mutant_id.clone())
            .collect();
        if !missing.is_empty() {
            return Err(MetricsError::MissingSmokeResults(missing.into_iter().collect()));
        }
    }

    let mut report = MetricsReport {
        tngm: 0,
        ncm_count: 0,
        tm_count: 0,
        smoke_skipped: 0,
        per_operator: BTreeMap::new(),
    };
    for r in generated {
        let entry = report.per_operator.entry(r.operator_id.clone()).or_default();
        report.tngm += 1;
        entry.tngm += 1;
        if !compiled[r.mutant_id.as_str()] {
            report.ncm_count += 1;
            entry.ncm += 1;
            continue;
        }
        match smoked.get(r.mutant_id.as_str()) {
            Some(SmokeVerdict::Trivial) => {
                report.tm_count += 1;
                entry.tm += 1;
            }
            Some(SmokeVerdict::Skipped) | None if smoke.is_some() => report.smoke_skipped += 1,
            _ => {}
        }
    }
    Ok(report)
}
