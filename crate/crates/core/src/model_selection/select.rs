use std::borrow::Cow;

use super::penalty::balance_penalty;
use super::silhouette::{silhouette_mean_with, PairwiseDistances};
use crate::clustering::{kmeans_fit, Clustering, KMeansConfig};
use crate::data_io::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Largest n for which `select_k` precomputes all pairwise distances
/// (the condensed matrix is about 67 MB at this size).
const DISTANCE_CACHE_MAX_ROWS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Penalty scale λ in `[0, 1]`.
    pub lambda: f64,
    /// Evaluate Silhouette on a sample of this many points instead of all.
    pub sample: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub normalize: bool,
    pub exec: Exec,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            k_min: 2,
            k_max: 15,
            lambda: 0.5,
            sample: None,
            seed: 0,
            restarts: 10,
            max_iters: 300,
            tol: 1e-6,
            normalize: false,
            exec: Exec::default(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 {
            return Err(Error::invalid("k-min must be at least 2"));
        }
        if self.k_min > self.k_max {
            return Err(Error::invalid("k-min exceeds k-max"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::invalid(format!("lambda {} outside [0, 1]", self.lambda)));
        }
        if self.sample.is_some_and(|s| s < 2) {
            return Err(Error::invalid("silhouette sample must be at least 2"));
        }
        self.kmeans(self.k_min).validate()
    }

    /// Clustering config for one K; normalization is applied by the caller.
    pub fn kmeans(&self, k: usize) -> KMeansConfig {
        KMeansConfig {
            k,
            seed: self.seed,
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            normalize: self.normalize,
            exec: self.exec,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub silhouette: f64,
    pub penalty: f64,
    pub balanced: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub k: usize,
    pub silhouette: f64,
    pub penalty: f64,
    pub balanced: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailedRow {
    pub k: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCurve {
    pub rows: Vec<ScoreRow>,
    pub failed: Vec<FailedRow>,
    pub chosen_k: usize,
}

impl ScoreCurve {
    pub fn row(&self, k: usize) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    /// K with the highest raw Silhouette (ties to the smallest K).
    pub fn silhouette_argmax(&self) -> Option<usize> {
        argmax(self.rows.iter().map(|r| (r.k, r.silhouette)))
    }
}

fn argmax(items: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    items
        .fold(None, |best: Option<(usize, f64)>, (k, v)| match best {
            Some((bk, bv)) if bv > v || (bv == v && bk <= k) => best,
            _ => Some((k, v)),
        })
        .map(|(k, _)| k)
}

fn score_assignments(
    embeddings: &EmbeddingMatrix,
    clustering: &Clustering,
    config: &SelectionConfig,
    cache: Option<&PairwiseDistances>,
) -> Result<Score> {
    let silhouette = silhouette_mean_with(
        embeddings,
        &clustering.assignments,
        clustering.k,
        config.sample,
        config.seed,
        cache,
        config.exec,
    )?;
    let penalty = balance_penalty(&clustering.sizes(), config.lambda)?;
    Ok(Score {
        silhouette,
        penalty,
        balanced: silhouette - penalty,
    })
}

/// Silhouette, penalty, and their difference for one clustering. The
/// penalty is the same for every point, so the difference equals the mean of
/// the per-point balanced scores.
pub fn balanced_score(
    embeddings: &EmbeddingMatrix,
    clustering: &Clustering,
    config: &SelectionConfig,
) -> Result<Score> {
    let data = if config.normalize {
        Cow::Owned(embeddings.l2_normalized())
    } else {
        Cow::Borrowed(embeddings)
    };
    score_assignments(&data, clustering, config, None)
}

/// Fit k-means for every K in `[k_min, k_max]`, score each fit, and return
/// the curve together with the clustering at the best balanced score.
pub fn select_k(embeddings: &EmbeddingMatrix, config: &SelectionConfig) -> Result<(ScoreCurve, Clustering)> {
    config.validate()?;
    let n = embeddings.n();
    if config.k_max > n.saturating_sub(1) {
        return Err(Error::invalid(format!(
            "k-max={} must be at most n-1={}",
            config.k_max,
            n.saturating_sub(1)
        )));
    }
    let data = if config.normalize {
        Cow::Owned(embeddings.l2_normalized())
    } else {
        Cow::Borrowed(embeddings)
    };
    let cache = (config.sample.is_none() && n <= DISTANCE_CACHE_MAX_ROWS)
        .then(|| PairwiseDistances::new(&data, config.exec));

    let ks: Vec<usize> = (config.k_min..=config.k_max).collect();
    let results = config.exec.map_indexed(ks.len(), |t| -> Result<(Clustering, Score)> {
        let mut km = config.kmeans(ks[t]);
        km.normalize = false;
        let clustering = kmeans_fit(&data, &km)?;
        let score = score_assignments(&data, &clustering, config, cache.as_ref())?;
        Ok((clustering, score))
    });

    let mut rows = Vec::new();
    let mut failed = Vec::new();
    let mut fits = Vec::new();
    for (k, res) in ks.iter().copied().zip(results) {
        match res {
            Ok((clustering, s)) => {
                rows.push(ScoreRow {
                    k,
                    silhouette: s.silhouette,
                    penalty: s.penalty,
                    balanced: s.balanced,
                });
                fits.push(clustering);
            }
            Err(e) => failed.push(FailedRow { k, error: e.to_string() }),
        }
    }
    let Some(chosen_k) = argmax(rows.iter().map(|r| (r.k, r.balanced))) else {
        let detail = failed.first().map(|f| f.error.clone()).unwrap_or_default();
        return Err(Error::invalid(format!("every K in the scan failed to score: {detail}")));
    };
    let chosen = fits
        .into_iter()
        .find(|c| c.k == chosen_k)
        .expect("chosen row has a fit");
    Ok((
        ScoreCurve {
            rows,
            failed,
            chosen_k,
        },
        chosen,
    ))
}
