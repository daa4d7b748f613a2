//! Scoring discovered clusters against gold intents.

mod contingency;
mod hungarian;
mod metrics;

use std::collections::BTreeMap;

pub use contingency::{contingency, ContingencyMatrix};
pub use hungarian::{hungarian_match, max_weight_assignment, Matching};
pub use metrics::{ari, nmi, prf_report, Prf};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Predicted cluster id → matched gold intent.
    pub mapping: BTreeMap<usize, String>,
    pub per_intent: BTreeMap<String, Prf>,
    pub macro_avg: Prf,
    pub nmi: f64,
    pub ari: f64,
    pub contingency: ContingencyMatrix,
}

/// Contingency, optimal matching, P/R/F1, NMI and ARI in one pass.
pub fn evaluate<S: AsRef<str>>(assignments: &[usize], gold: &[S]) -> Result<EvalReport> {
    let matrix = contingency(assignments, gold)?;
    let matching = hungarian_match(&matrix);
    let (per_intent, macro_avg) = prf_report(&matrix, &matching);
    let mapping = matching
        .pairs
        .iter()
        .map(|&(p, g)| (matrix.pred_ids[p], matrix.gold_names[g].clone()))
        .collect();
    Ok(EvalReport {
        mapping,
        per_intent,
        macro_avg,
        nmi: nmi(&matrix),
        ari: ari(&matrix)?,
        contingency: matrix,
    })
}
