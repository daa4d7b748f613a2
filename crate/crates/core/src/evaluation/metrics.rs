use std::collections::BTreeMap;

use super::{ContingencyMatrix, Matching};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

/// Per-intent precision/recall/F1 under `matching`, plus the unweighted
/// (macro) mean over all gold intents. Unmatched intents score zero.
pub fn prf_report(matrix: &ContingencyMatrix, matching: &Matching) -> (BTreeMap<String, Prf>, Prf) {
    let rows = matrix.row_sums();
    let cols = matrix.col_sums();
    let mut per_intent: BTreeMap<String, Prf> = matrix
        .gold_names
        .iter()
        .map(|g| (g.clone(), Prf::default()))
        .collect();
    for &(p, g) in &matching.pairs {
        let hit = matrix.counts[p][g] as f64;
        let precision = if rows[p] == 0 { 0.0 } else { hit / rows[p] as f64 };
        let recall = if cols[g] == 0 { 0.0 } else { hit / cols[g] as f64 };
        per_intent.insert(matrix.gold_names[g].clone(), Prf::new(precision, recall));
    }
    let k = matrix.cols().max(1) as f64;
    let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
    // sum in gold-name order for determinism
    for v in per_intent.values() {
        p += v.precision;
        r += v.recall;
        f += v.f1;
    }
    (
        per_intent,
        Prf {
            precision: p / k,
            recall: r / k,
            f1: f / k,
        },
    )
}

/// Each row and each column holds exactly one non-zero cell.
fn is_permuted_diagonal(m: &ContingencyMatrix) -> bool {
    let nonzero_rows = m.counts.iter().all(|r| r.iter().filter(|&&c| c > 0).count() == 1);
    let nonzero_cols = (0..m.cols()).all(|g| m.counts.iter().filter(|r| r[g] > 0).count() == 1);
    nonzero_rows && nonzero_cols
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information normalized by the arithmetic mean of the two
/// entropies (natural log). Zero when either side has zero entropy.
pub fn nmi(matrix: &ContingencyMatrix) -> f64 {
    if matrix.n == 0 {
        return 0.0;
    }
    let n = matrix.n as f64;
    let rows = matrix.row_sums();
    let cols = matrix.col_sums();
    let h_pred = entropy(&rows, n);
    let h_gold = entropy(&cols, n);
    if h_pred == 0.0 || h_gold == 0.0 {
        return 0.0;
    }
    if is_permuted_diagonal(matrix) {
        return 1.0;
    }
    let mut mi = 0.0;
    for (p, row) in matrix.counts.iter().enumerate() {
        for (g, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (c * n / (rows[p] as f64 * cols[g] as f64)).ln();
        }
    }
    (mi / ((h_pred + h_gold) / 2.0)).clamp(0.0, 1.0)
}

fn pairs(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// Adjusted Rand index over the pair-counting formulation. Zero when the
/// denominator vanishes.
pub fn ari(matrix: &ContingencyMatrix) -> Result<f64> {
    if matrix.n < 2 {
        return Err(Error::invalid(format!("ARI needs at least 2 items, got {}", matrix.n)));
    }
    let index: u128 = matrix.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let sum_rows: u128 = matrix.row_sums().into_iter().map(pairs).sum();
    let sum_cols: u128 = matrix.col_sums().into_iter().map(pairs).sum();
    let total = pairs(matrix.n) as f64;
    let expected = sum_rows as f64 * sum_cols as f64 / total;
    let max_index = (sum_rows as f64 + sum_cols as f64) / 2.0;
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((index as f64 - expected) / denom)
}
