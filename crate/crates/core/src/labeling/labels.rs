use std::collections::BTreeMap;

use super::extract::{extract_pair, ActionObjectPair, ObjectRelations};
use crate::data_io::{Corpus, ParseTable};
use crate::error::{Error, Result};

/// Pair statistics for one cluster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub size: usize,
    /// Complete pairs, keyed by (action, object).
    pub pairs: BTreeMap<(String, String), usize>,
    /// ACTION lemmas from pairs whose OBJECT is missing.
    pub actions: BTreeMap<String, usize>,
    /// OBJECT lemmas from pairs whose ACTION is missing.
    pub objects: BTreeMap<String, usize>,
}

impl PairCounts {
    pub fn add(&mut self, pair: &ActionObjectPair) {
        self.size += 1;
        match (&pair.action, &pair.object) {
            (Some(a), Some(o)) => *self.pairs.entry((a.clone(), o.clone())).or_default() += 1,
            (Some(a), None) => *self.actions.entry(a.clone()).or_default() += 1,
            (None, Some(o)) => *self.objects.entry(o.clone()).or_default() += 1,
            (None, None) => {}
        }
    }
}

/// Count extracted pairs per cluster. Utterances without a parse count as
/// (NONE, NONE).
pub fn cluster_pair_counts(
    assignments: &[usize],
    k: usize,
    parses: &ParseTable,
    corpus: &Corpus,
    relations: &ObjectRelations,
) -> Result<Vec<PairCounts>> {
    if assignments.len() != corpus.len() {
        return Err(Error::Alignment(format!(
            "{} assignments for a corpus of {}",
            assignments.len(),
            corpus.len()
        )));
    }
    let mut counts = vec![PairCounts::default(); k];
    for (u, &c) in corpus.utterances().iter().zip(assignments) {
        if c >= k {
            return Err(Error::invalid(format!("cluster {c} out of range for k={k}")));
        }
        let pair = parses
            .get(&u.id)
            .map_or_else(ActionObjectPair::none, |toks| extract_pair(toks, relations));
        counts[c].add(&pair);
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLabel {
    pub label: String,
    /// Complete pairs as `"action-object"` ranked by count, ties broken
    /// lexicographically.
    pub top_pairs: Vec<(String, usize)>,
    /// Share of the cluster whose pair is among the top three.
    pub coverage: f64,
    pub fallback_used: bool,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    /// Indexed by cluster id.
    pub clusters: Vec<ClusterLabel>,
}

fn most_frequent(m: &BTreeMap<String, usize>) -> Option<&str> {
    // BTreeMap iterates keys in order, so `>` keeps the smallest key on ties
    m.iter()
        .fold(None, |best: Option<(&String, usize)>, (k, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((k, v)),
        })
        .map(|(k, _)| k.as_str())
}

/// Label every cluster with its most frequent complete pair, or with the
/// most frequent ACTION and OBJECT joined when no complete pair exists.
pub fn generate_labels(counts: &[PairCounts]) -> Result<LabelSet> {
    let mut clusters = Vec::with_capacity(counts.len());
    for (c, pc) in counts.iter().enumerate() {
        if pc.size == 0 {
            return Err(Error::invalid(format!("cluster {c} is empty")));
        }
        let mut ranked: Vec<(String, usize)> = pc
            .pairs
            .iter()
            .map(|((a, o), &n)| (format!("{a}-{o}"), n))
            .collect();
        ranked.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
        let covered: usize = ranked.iter().take(3).map(|(_, n)| n).sum();
        let (label, fallback_used) = match ranked.first() {
            Some((pair, _)) => (pair.clone(), false),
            None => {
                let action = most_frequent(&pc.actions).unwrap_or("none");
                let object = most_frequent(&pc.objects).unwrap_or("none");
                (format!("{action}-{object}"), true)
            }
        };
        clusters.push(ClusterLabel {
            label,
            coverage: covered as f64 / pc.size as f64,
            top_pairs: ranked,
            fallback_used,
            size: pc.size,
        });
    }
    Ok(LabelSet { clusters })
}
