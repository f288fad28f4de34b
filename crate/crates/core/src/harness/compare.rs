//! Paired comparison of per-app metrics tables, one baseline against each
//! other tool.

use std::collections::BTreeMap;

use serde::Serialize;

use super::metrics::MetricsRow;
use super::stats::{cliffs_delta, holm_adjust, wilcoxon_signed_rank, Magnitude, StatsError};

/// Metrics compared, in output order.
pub const COMPARED_METRICS: [&str; 3] = ["tngm", "ncm_pct", "tm_pct"];

/// A named metrics table (one row per app).
#[derive(Debug, Clone)]
pub struct MetricsTable {
    pub tool: String,
    pub rows: Vec<MetricsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub baseline: String,
    pub other: String,
    /// Apps present in both tables.
    pub pairs: usize,
    pub wilcoxon_statistic: Option<f64>,
    pub wilcoxon_p: Option<f64>,
    /// Holm-adjusted within the metric's family of comparisons.
    pub holm_p: Option<f64>,
    pub cliffs_d: f64,
    pub magnitude: Magnitude,
    pub note: String,
}

fn metric_value(row: &MetricsRow, metric: &str) -> Option<f64> {
    match metric {
        "tngm" => Some(row.tngm as f64),
        "ncm_pct" => row.ncm_pct.parse().ok(),
        "tm_pct" => row.tm_pct.parse().ok(),
        _ => None,
    }
}

/// Compares `tables[0]` with every other table on each metric in
/// [`COMPARED_METRICS`]. Apps are paired by name; tables without any
/// common app produce no rows for that pairing.
pub fn compare_tables(tables: &[MetricsTable]) -> Vec<ComparisonRow> {
    let Some((baseline, others)) = tables.split_first() else {
        return Vec::new();
    };
    let base: BTreeMap<&str, &MetricsRow> = baseline.rows.iter().map(|r| (r.app.as_str(), r)).collect();
    let mut out = Vec::new();
    for metric in COMPARED_METRICS {
        let mut family = Vec::new();
        for other in others {
            let pairs: Vec<(f64, f64)> = other
                .rows
                .iter()
                .filter_map(|r| {
                    let b = base.get(r.app.as_str())?;
                    Some((metric_value(b, metric)?, metric_value(r, metric)?))
                })
                .collect();
            if pairs.is_empty() {
                continue;
            }
            let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let (d, magnitude) = cliffs_delta(&xs, &ys).expect("pairs are non-empty");
            let (statistic, p, note) = match wilcoxon_signed_rank(&pairs) {
                Ok(w) => (
                    Some(w.statistic),
                    Some(w.p_value),
                    if w.exact { "exact" } else { "normal approximation" }.to_string(),
                ),
                Err(StatsError::AllDifferencesZero) => (None, None, "all differences zero".to_string()),
                Err(e) => (None, None, e.to_string()),
            };
            family.push(ComparisonRow {
                metric: metric.to_string(),
                baseline: baseline.tool.clone(),
                other: other.tool.clone(),
                pairs: pairs.len(),
                wilcoxon_statistic: statistic,
                wilcoxon_p: p,
                holm_p: None,
                cliffs_d: d,
                magnitude,
                note,
            });
        }
        let defined: Vec<usize> = (0..family.len()).filter(|&i| family[i].wilcoxon_p.is_some()).collect();
        let ps: Vec<f64> = defined.iter().map(|&i| family[i].wilcoxon_p.unwrap()).collect();
        for (&i, adjusted) in defined.iter().zip(holm_adjust(&ps)) {
            family[i].holm_p = Some(adjusted);
        }
        out.extend(family);
    }
    out
}
