use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Predicted-cluster × gold-intent co-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyMatrix {
    /// `counts[p][g]`: rows follow `pred_ids`, columns follow `gold_names`.
    pub counts: Vec<Vec<u64>>,
    pub pred_ids: Vec<usize>,
    pub gold_names: Vec<String>,
    pub n: u64,
}

impl ContingencyMatrix {
    /// Build from raw counts with generated axis labels.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Self {
        let cols = counts.first().map_or(0, Vec::len);
        assert!(counts.iter().all(|r| r.len() == cols), "ragged contingency matrix");
        let n = counts.iter().flatten().sum();
        ContingencyMatrix {
            pred_ids: (0..counts.len()).collect(),
            gold_names: (0..cols).map(|g| format!("g{g}")).collect(),
            counts,
            n,
        }
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.gold_names.len()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.cols())
            .map(|g| self.counts.iter().map(|r| r[g]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let counts = (0..self.cols())
            .map(|g| self.counts.iter().map(|r| r[g]).collect())
            .collect();
        ContingencyMatrix {
            counts,
            pred_ids: (0..self.cols()).collect(),
            gold_names: self.pred_ids.iter().map(|p| p.to_string()).collect(),
            n: self.n,
        }
    }
}

/// Cross-tabulate predicted clusters against gold labels. Axes list the
/// distinct cluster ids and gold names in sorted order.
pub fn contingency<S: AsRef<str>>(assignments: &[usize], gold: &[S]) -> Result<ContingencyMatrix> {
    if gold.len() != assignments.len() {
        return Err(Error::invalid(format!(
            "gold labels required for every utterance ({} labels for {} utterances)",
            gold.len(),
            assignments.len()
        )));
    }
    if let Some(i) = gold.iter().position(|g| g.as_ref().is_empty()) {
        return Err(Error::invalid(format!("gold label missing for utterance {}", i + 1)));
    }
    let pred_ids: Vec<usize> = assignments.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let gold_names: Vec<String> = gold
        .iter()
        .map(|g| g.as_ref())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_owned)
        .collect();
    let mut counts = vec![vec![0u64; gold_names.len()]; pred_ids.len()];
    for (a, g) in assignments.iter().zip(gold) {
        let p = pred_ids.binary_search(a).expect("id collected above");
        let c = gold_names
            .binary_search_by(|x| x.as_str().cmp(g.as_ref()))
            .expect("name collected above");
        counts[p][c] += 1;
    }
    Ok(ContingencyMatrix {
        counts,
        pred_ids,
        gold_names,
        n: assignments.len() as u64,
    })
}
