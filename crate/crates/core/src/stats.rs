//! Two-sample comparison: Vargha-Delaney effect size, Mann-Whitney U test
//! and per-subject relative coverage.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: &str, values: Vec<f64>) -> Self {
        SampleSet {
            label: label.to_string(),
            values,
        }
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mean_a: f64,
    pub mean_b: f64,
    pub a12: f64,
    pub u_statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    /// All pooled values are identical; the test carries no information.
    pub degenerate: bool,
}

/// Average 1-based ranks of `values`; ties share the mean of their ranks.
/// Also returns the tie term `sum(t^3 - t)` over tie groups.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

fn check(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample("comparison needs two non-empty samples".into()));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::InvalidParams("samples contain NaN".into()));
    }
    Ok(())
}

/// U statistic of `xs`: pairs with `x > y` plus half the ties, from midranks.
fn u_statistic(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let m = xs.len() as f64;
    let rank_sum: f64 = ranks[..xs.len()].iter().sum();
    (rank_sum - m * (m + 1.0) / 2.0, ties)
}

/// Probability that a draw from `xs` exceeds one from `ys`, ties counting half.
pub fn a12(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    let (u, _) = u_statistic(xs, ys);
    Ok(u / (xs.len() * ys.len()) as f64)
}

/// Two-sided Mann-Whitney U test by normal approximation with tie-corrected
/// variance and a 0.5 continuity correction.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64], alpha: f64) -> Result<ComparisonReport> {
    check(xs, ys)?;
    let (u, ties) = u_statistic(xs, ys);
    let (m, n) = (xs.len() as f64, ys.len() as f64);
    let total = m + n;
    let variance = if total > 1.0 {
        m * n / 12.0 * ((total + 1.0) - ties / (total * (total - 1.0)))
    } else {
        0.0
    };
    let degenerate = variance <= 0.0;
    let p_value = if degenerate {
        1.0
    } else {
        let z = ((u - m * n / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
    };
    Ok(ComparisonReport {
        mean_a: mean(xs),
        mean_b: mean(ys),
        a12: u / (m * n),
        u_statistic: u,
        p_value,
        significant: p_value < alpha,
        degenerate,
    })
}

/// Mean relative coverage per configuration.
///
/// `matrix[c][s]` is the coverage of configuration `c` on subject `s`. Per
/// subject, values are min-max scaled over configurations (1 when all are
/// equal), then averaged over subjects.
pub fn relative_coverage(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    if matrix.len() < 2 {
        return Err(Error::InvalidParams(
            "relative coverage needs at least two configurations".into(),
        ));
    }
    let subjects = matrix[0].len();
    if subjects == 0 || matrix.iter().any(|row| row.len() != subjects) {
        return Err(Error::InvalidParams(
            "coverage matrix must be rectangular and non-empty".into(),
        ));
    }
    let scaled = relative_columns(matrix);
    Ok(scaled.iter().map(|row| mean(row)).collect())
}

/// Per-cell relative values of a rectangular matrix, column by column.
pub(crate) fn relative_columns(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let subjects = matrix.first().map_or(0, Vec::len);
    let mut out = vec![vec![0.0; subjects]; matrix.len()];
    for s in 0..subjects {
        let lo = matrix.iter().map(|r| r[s]).fold(f64::INFINITY, f64::min);
        let hi = matrix.iter().map(|r| r[s]).fold(f64::NEG_INFINITY, f64::max);
        for (c, row) in matrix.iter().enumerate() {
            out[c][s] = if hi > lo { (row[s] - lo) / (hi - lo) } else { 1.0 };
        }
    }
    out
}

/// One line of the comparison table: a configuration against the baseline,
/// on raw and on relative coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub configuration: String,
    pub coverage: ComparisonReport,
    /// Mean over subjects of the per-subject relative coverage.
    pub mean_relative_coverage: f64,
    /// Test on per-run relative values.
    pub relative: ComparisonReport,
}

pub const COMPARISON_HEADER: [&str; 7] = [
    "configuration",
    "mean_coverage",
    "coverage_a12",
    "coverage_p",
    "mean_relative_coverage",
    "relative_a12",
    "relative_p",
];

pub fn write_comparison_csv<W: Write>(writer: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(COMPARISON_HEADER)?;
    for r in rows {
        out.write_record([
            r.configuration.clone(),
            r.coverage.mean_a.to_string(),
            r.coverage.a12.to_string(),
            r.coverage.p_value.to_string(),
            r.mean_relative_coverage.to_string(),
            r.relative.a12.to_string(),
            r.relative.p_value.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
