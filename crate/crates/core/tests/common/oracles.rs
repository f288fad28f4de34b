//! Independent reference implementations the statistics and metrics code is
//! checked against. Deliberately naive: clarity over speed.
#![allow(dead_code)]

use mutagen_core::harness::{percent, render_percent, MetricsReport};

/// Doubled average rank of each value: `2 * (#smaller) + (#equal) + 1`.
pub fn naive_doubled_ranks(values: &[f64]) -> Vec<u64> {
    values
        .iter()
        .map(|v| {
            let smaller = values.iter().filter(|w| *w < v).count() as u64;
            let equal = values.iter().filter(|w| *w == v).count() as u64;
            2 * smaller + equal + 1
        })
        .collect()
}

/// Two-sided signed-rank p-value by enumerating all 2^n sign assignments of
/// the nonzero differences.
pub fn brute_force_wilcoxon_p(diffs: &[f64]) -> f64 {
    let diffs: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    let ranks = naive_doubled_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let total: u64 = ranks.iter().sum();
    let observed: u64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let deviation = |w: u64| (2 * w).abs_diff(total);
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let w: u64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if deviation(w) >= deviation(observed) {
            extreme += 1;
        }
    }
    extreme as f64 / 2f64.powi(n as i32)
}

/// Holm's adjustment written as the textbook formula: for hypothesis k,
/// `min(1, max over p_j <= p_k of (m - #{i : p_i < p_j}) * p_j)`.
pub fn reference_holm(ps: &[f64]) -> Vec<f64> {
    let m = ps.len();
    ps.iter()
        .map(|pk| {
            ps.iter()
                .filter(|pj| *pj <= pk)
                .map(|pj| {
                    let below = ps.iter().filter(|pi| *pi < pj).count();
                    (m - below) as f64 * pj
                })
                .fold(0.0f64, f64::max)
                .min(1.0)
        })
        .collect()
}

/// Checks the report invariants that hold for any oracle results; returns
/// the first violation.
pub fn check_report_invariants(report: &MetricsReport) -> Result<(), String> {
    if report.ncm_count + report.tm_count > report.tngm {
        return Err(format!(
            "ncm {} + tm {} > tngm {}",
            report.ncm_count, report.tm_count, report.tngm
        ));
    }
    if report.ncm_count + report.tm_count + report.smoke_skipped > report.tngm {
        return Err("smoke-skipped mutants overlap ncm/tm".into());
    }
    let (mut tngm, mut ncm, mut tm) = (0, 0, 0);
    for (op, b) in &report.per_operator {
        if b.ncm + b.tm > b.tngm {
            return Err(format!("{op}: ncm + tm > tngm"));
        }
        tngm += b.tngm;
        ncm += b.ncm;
        tm += b.tm;
    }
    if (tngm, ncm, tm) != (report.tngm, report.ncm_count, report.tm_count) {
        return Err("per-operator breakdown does not sum to the totals".into());
    }
    for (count, pct) in [
        (report.ncm_count, report.ncm_percent()),
        (report.tm_count, report.tm_percent()),
    ] {
        let expected = if report.tngm == 0 {
            0.0
        } else {
            100.0 * count as f64 / report.tngm as f64
        };
        let rendered: f64 = render_percent(pct).parse().unwrap();
        if pct != percent(count, report.tngm) || (rendered - expected).abs() > 0.005 + 1e-9 {
            return Err(format!("percentage {rendered} does not match {count}/{}", report.tngm));
        }
    }
    Ok(())
}
