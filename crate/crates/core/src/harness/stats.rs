//! Paired comparison statistics: Wilcoxon signed-rank test, Holm's
//! step-down correction and Cliff's delta.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

/// Largest number of nonzero differences for which the exact null
/// distribution is enumerated.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("every paired difference is zero; the signed-rank test is undefined")]
    AllDifferencesZero,
    #[error("no pairs given")]
    NoPairs,
    #[error("Cliff's delta needs two non-empty samples")]
    EmptySample,
    #[error("non-finite value in input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of the positive differences (W+).
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Number of nonzero differences.
    pub n: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    /// Conventional buckets of |d|: 0.147, 0.33 and 0.474.
    pub fn of(d: f64) -> Magnitude {
        let a = d.abs();
        if a < 0.147 {
            Magnitude::Negligible
        } else if a < 0.33 {
            Magnitude::Small
        } else if a < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        }
    }
}

/// Outcome of comparing one metric between two paired samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub wilcoxon_p: f64,
    pub holm_adjusted_p: f64,
    pub cliffs_d: f64,
    pub magnitude: Magnitude,
}

/// Ranks of `values` (1-based), ties sharing the average rank, doubled so
/// that every rank is an integer.
fn doubled_ranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share rank ((i+1) + (j+1)) / 2.
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        i = j + 1;
    }
    ranks
}

/// Nonzero differences `a - b`.
fn differences(pairs: &[(f64, f64)]) -> Result<Vec<f64>, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::NoPairs);
    }
    if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(StatsError::AllDifferencesZero);
    }
    Ok(diffs)
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped and tied magnitudes share average ranks.
/// Up to [`EXACT_MAX_N`] nonzero differences the p-value comes from the
/// exact permutation distribution of the (tied) ranks; above that, from the
/// normal approximation with tie and continuity corrections.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult, StatsError> {
    let diffs = differences(pairs)?;
    if diffs.len() <= EXACT_MAX_N {
        Ok(wilcoxon_exact(&diffs))
    } else {
        Ok(wilcoxon_normal(&diffs))
    }
}

/// The normal-approximation branch, regardless of sample size.
pub fn wilcoxon_normal_approx(pairs: &[(f64, f64)]) -> Result<WilcoxonResult, StatsError> {
    Ok(wilcoxon_normal(&differences(pairs)?))
}

fn w_plus_doubled(diffs: &[f64], ranks: &[u64]) -> u64 {
    diffs
        .iter()
        .zip(ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum()
}

fn wilcoxon_exact(diffs: &[f64]) -> WilcoxonResult {
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = doubled_ranks(&magnitudes);
    let total: u64 = ranks.iter().sum();
    let observed = w_plus_doubled(diffs, &ranks);
    // counts[s] = number of sign assignments whose doubled W+ equals s.
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    for &r in &ranks {
        for s in (r as usize..=total as usize).rev() {
            counts[s] += counts[s - r as usize];
        }
    }
    let deviation = |s: u64| (2 * s).abs_diff(total);
    let extreme: u64 = (0..=total)
        .filter(|&s| deviation(s) >= deviation(observed))
        .map(|s| counts[s as usize])
        .sum();
    let p = extreme as f64 / 2f64.powi(diffs.len() as i32);
    WilcoxonResult {
        statistic: observed as f64 / 2.0,
        p_value: p.min(1.0),
        n: diffs.len(),
        exact: true,
    }
}

fn wilcoxon_normal(diffs: &[f64]) -> WilcoxonResult {
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = doubled_ranks(&magnitudes);
    let w = w_plus_doubled(diffs, &ranks) as f64 / 2.0;
    let n = diffs.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = magnitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let p = if variance <= 0.0 {
        1.0
    } else {
        let z = ((w - mean).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    WilcoxonResult {
        statistic: w,
        p_value: p,
        n: diffs.len(),
        exact: false,
    }
}

/// Holm's step-down adjustment; output is in input order.
pub fn holm_adjust(ps: &[f64]) -> Vec<f64> {
    let m = ps.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (i, &k) in order.iter().enumerate() {
        let scaled = ((m - i) as f64 * ps[k]).min(1.0);
        running = running.max(scaled);
        adjusted[k] = running;
    }
    adjusted
}

/// Cliff's delta of `xs` against `ys` and its magnitude bucket.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> Result<(f64, Magnitude), StatsError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut greater = 0i64;
    let mut less = 0i64;
    for x in xs {
        for y in ys {
            if x > y {
                greater += 1;
            } else if x < y {
                less += 1;
            }
        }
    }
    let d = (greater - less) as f64 / (xs.len() * ys.len()) as f64;
    Ok((d, Magnitude::of(d)))
}
