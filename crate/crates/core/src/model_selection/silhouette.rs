use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clustering::{cluster_sizes, Clustering};
use crate::data_io::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::exec::Exec;

#[inline]
fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let diff = f64::from(x) - f64::from(y);
            diff * diff
        })
        .sum::<f64>()
        .sqrt()
}

/// Condensed (strict lower triangle) Euclidean distance matrix.
///
/// Values are bit-identical to on-the-fly distances, so scores computed with
/// or without the cache agree exactly.
pub struct PairwiseDistances {
    n: usize,
    tri: Vec<f64>,
}

impl PairwiseDistances {
    pub fn new(embeddings: &EmbeddingMatrix, exec: Exec) -> Self {
        let n = embeddings.n();
        let rows = exec.map_indexed(n, |i| {
            let ri = embeddings.row(i);
            (0..i).map(|j| euclidean(ri, embeddings.row(j))).collect::<Vec<_>>()
        });
        PairwiseDistances {
            n,
            tri: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        self.tri[hi * (hi - 1) / 2 + lo]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn point_silhouette(
    embeddings: &EmbeddingMatrix,
    cache: Option<&PairwiseDistances>,
    assignments: &[usize],
    sizes: &[usize],
    i: usize,
) -> f64 {
    let own = assignments[i];
    if sizes[own] <= 1 {
        return 0.0;
    }
    let mut sums = vec![0.0f64; sizes.len()];
    let ri = embeddings.row(i);
    for (j, &c) in assignments.iter().enumerate() {
        if j == i {
            continue;
        }
        sums[c] += match cache {
            Some(p) => p.get(i, j),
            None => euclidean(ri, embeddings.row(j)),
        };
    }
    let a = sums[own] / (sizes[own] - 1) as f64;
    let b = sums
        .iter()
        .zip(sizes)
        .enumerate()
        .filter(|&(c, (_, &size))| c != own && size > 0)
        .map(|(_, (&s, &size))| s / size as f64)
        .fold(f64::INFINITY, f64::min);
    let denom = a.max(b);
    if !b.is_finite() || denom == 0.0 {
        0.0
    } else {
        (b - a) / denom
    }
}

fn check_scorable(n: usize, assignments: &[usize], k: usize) -> Result<Vec<usize>> {
    if assignments.len() != n {
        return Err(Error::Alignment(format!(
            "{} assignments for {n} embedding rows",
            assignments.len()
        )));
    }
    if k < 2 {
        return Err(Error::invalid(format!("silhouette needs at least 2 clusters, got k={k}")));
    }
    if k >= n {
        return Err(Error::invalid(format!(
            "silhouette undefined for k={k} with n={n}: every cluster is a singleton"
        )));
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= k) {
        return Err(Error::invalid(format!("assignment {bad} out of range for k={k}")));
    }
    Ok(cluster_sizes(assignments, k))
}

/// Per-point Silhouette values for the rows in `points`, each computed
/// against all rows.
pub fn silhouette_samples(
    embeddings: &EmbeddingMatrix,
    assignments: &[usize],
    k: usize,
    points: &[usize],
    cache: Option<&PairwiseDistances>,
    exec: Exec,
) -> Result<Vec<f64>> {
    let sizes = check_scorable(embeddings.n(), assignments, k)?;
    if let Some(p) = cache {
        if p.n() != embeddings.n() {
            return Err(Error::Alignment("distance cache built for a different matrix".into()));
        }
    }
    Ok(exec.map_indexed(points.len(), |t| {
        point_silhouette(embeddings, cache, assignments, &sizes, points[t])
    }))
}

/// Evaluated rows: all of them, or a seeded uniform sample without
/// replacement, in ascending order.
pub(crate) fn evaluation_points(n: usize, sample: Option<usize>, seed: u64) -> Result<Vec<usize>> {
    match sample {
        None => Ok((0..n).collect()),
        Some(m) if m < 2 => Err(Error::invalid("silhouette sample must be at least 2")),
        Some(m) if m >= n => Ok((0..n).collect()),
        Some(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = rand::seq::index::sample(&mut rng, n, m).into_vec();
            idx.sort_unstable();
            Ok(idx)
        }
    }
}

/// Mean Silhouette score of `clustering` over `embeddings`.
///
/// Singleton clusters contribute 0. With `sample`, the mean is taken over a
/// seeded subset of points while distances still range over all rows.
pub fn silhouette_mean(
    embeddings: &EmbeddingMatrix,
    clustering: &Clustering,
    sample: Option<usize>,
    seed: u64,
) -> Result<f64> {
    silhouette_mean_with(embeddings, &clustering.assignments, clustering.k, sample, seed, None, Exec::default())
}

pub fn silhouette_mean_with(
    embeddings: &EmbeddingMatrix,
    assignments: &[usize],
    k: usize,
    sample: Option<usize>,
    seed: u64,
    cache: Option<&PairwiseDistances>,
    exec: Exec,
) -> Result<f64> {
    let points = evaluation_points(embeddings.n(), sample, seed)?;
    let values = silhouette_samples(embeddings, assignments, k, &points, cache, exec)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
