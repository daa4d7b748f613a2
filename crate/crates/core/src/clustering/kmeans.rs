use std::borrow::Cow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cluster_sizes, sq_dist, Clustering, KMeansConfig};
use crate::data_io::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Output of one assignment/update round.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydStep {
    pub assignments: Vec<usize>,
    /// Row-major `k × d` updated centroids.
    pub centroids: Vec<f64>,
    /// Objective of the new assignments measured against the input centroids.
    pub inertia: f64,
    /// Clusters that received no rows and were reseeded.
    pub reseeded: Vec<usize>,
}

/// Choose `k` initial centroids by D² sampling.
pub fn kmeanspp_init(embeddings: &EmbeddingMatrix, k: usize, seed: u64) -> Result<Vec<f64>> {
    kmeanspp_init_with(embeddings, k, seed, Exec::default())
}

pub fn kmeanspp_init_with(
    embeddings: &EmbeddingMatrix,
    k: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<f64>> {
    let n = embeddings.n();
    if k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k={k} exceeds the number of rows n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = Vec::with_capacity(k * embeddings.d());
    let push = |centroids: &mut Vec<f64>, i: usize| {
        centroids.extend(embeddings.row(i).iter().map(|&v| f64::from(v)));
    };

    let first = rng.random_range(0..n);
    push(&mut centroids, first);
    let mut nearest = exec.map_indexed(n, |i| sq_dist(embeddings.row(i), &centroids[..]));

    for _ in 1..k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 && total.is_finite() {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            rng.random_range(0..n)
        };
        let start = centroids.len();
        push(&mut centroids, next);
        let newest = &centroids[start..];
        let dists = exec.map_indexed(n, |i| sq_dist(embeddings.row(i), newest));
        for (m, d) in nearest.iter_mut().zip(dists) {
            if d < *m {
                *m = d;
            }
        }
    }
    Ok(centroids)
}

/// One Lloyd iteration: assign each row to its nearest centroid (ties go to
/// the lowest index), then move each centroid to the mean of its rows.
pub fn lloyd_step(embeddings: &EmbeddingMatrix, centroids: &[f64]) -> Result<LloydStep> {
    lloyd_step_with(embeddings, centroids, Exec::default())
}

pub fn lloyd_step_with(embeddings: &EmbeddingMatrix, centroids: &[f64], exec: Exec) -> Result<LloydStep> {
    let (n, d) = (embeddings.n(), embeddings.d());
    if centroids.is_empty() || centroids.len() % d != 0 {
        return Err(Error::invalid(format!(
            "centroid buffer of length {} is not a multiple of d={d}",
            centroids.len()
        )));
    }
    if let Some(p) = centroids.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("centroid {} coordinate {}", p / d, p % d)));
    }
    let k = centroids.len() / d;

    let nearest: Vec<(usize, f64)> = exec.map_indexed(n, |i| {
        let row = embeddings.row(i);
        let mut best = (0, sq_dist(row, &centroids[..d]));
        for c in 1..k {
            let dist = sq_dist(row, &centroids[c * d..(c + 1) * d]);
            if dist < best.1 {
                best = (c, dist);
            }
        }
        best
    });

    let inertia: f64 = nearest.iter().map(|&(_, dist)| dist).sum();
    if !inertia.is_finite() {
        return Err(Error::NonFinite("inertia overflowed".into()));
    }
    let assignments: Vec<usize> = nearest.iter().map(|&(c, _)| c).collect();

    let mut sums = vec![0.0f64; k * d];
    let mut counts = vec![0usize; k];
    for (i, &c) in assignments.iter().enumerate() {
        counts[c] += 1;
        for (s, &v) in sums[c * d..(c + 1) * d].iter_mut().zip(embeddings.row(i)) {
            *s += f64::from(v);
        }
    }

    let mut new_centroids = sums;
    let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
    for c in 0..k {
        if counts[c] > 0 {
            let inv = counts[c] as f64;
            new_centroids[c * d..(c + 1) * d].iter_mut().for_each(|s| *s /= inv);
        }
    }
    if !empty.is_empty() {
        // farthest rows from their current centroid, ties to the lowest row
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| nearest[b].1.total_cmp(&nearest[a].1).then(a.cmp(&b)));
        for (&c, &row) in empty.iter().zip(&order) {
            for (dst, &v) in new_centroids[c * d..(c + 1) * d].iter_mut().zip(embeddings.row(row)) {
                *dst = f64::from(v);
            }
        }
    }

    Ok(LloydStep {
        assignments,
        centroids: new_centroids,
        inertia,
        reseeded: empty,
    })
}

struct Run {
    assignments: Vec<usize>,
    centroids: Vec<f64>,
    inertia: f64,
    iterations: usize,
}

fn means(embeddings: &EmbeddingMatrix, assignments: &[usize], k: usize) -> Vec<f64> {
    let d = embeddings.d();
    let mut sums = vec![0.0f64; k * d];
    let counts = cluster_sizes(assignments, k);
    for (i, &c) in assignments.iter().enumerate() {
        for (s, &v) in sums[c * d..(c + 1) * d].iter_mut().zip(embeddings.row(i)) {
            *s += f64::from(v);
        }
    }
    for c in 0..k {
        let cnt = counts[c].max(1) as f64;
        sums[c * d..(c + 1) * d].iter_mut().for_each(|s| *s /= cnt);
    }
    sums
}

/// Move rows into clusters left empty at the end of a run. Each empty
/// cluster takes the row farthest from its centroid among clusters that can
/// spare one. Only reachable with duplicate rows or a late reseed.
fn repair_empty(embeddings: &EmbeddingMatrix, assignments: &mut [usize], centroids: &[f64], k: usize) {
    let d = embeddings.d();
    let mut sizes = cluster_sizes(assignments, k);
    for c in 0..k {
        if sizes[c] > 0 {
            continue;
        }
        let donor = (0..assignments.len())
            .filter(|&i| sizes[assignments[i]] > 1)
            .map(|i| {
                let a = assignments[i];
                (i, sq_dist(embeddings.row(i), &centroids[a * d..(a + 1) * d]))
            })
            .fold(None, |best: Option<(usize, f64)>, (i, dist)| match best {
                Some((_, bd)) if bd >= dist => best,
                _ => Some((i, dist)),
            });
        if let Some((i, _)) = donor {
            sizes[assignments[i]] -= 1;
            assignments[i] = c;
            sizes[c] += 1;
        }
    }
}

fn run_once(embeddings: &EmbeddingMatrix, config: &KMeansConfig, seed: u64, exec: Exec) -> Result<Run> {
    let k = config.k;
    let mut centroids = kmeanspp_init_with(embeddings, k, seed, exec)?;
    let mut assignments = Vec::new();
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    for iter in 1..=config.max_iters {
        let step = lloyd_step_with(embeddings, &centroids, exec)?;
        iterations = iter;
        centroids = step.centroids;
        assignments = step.assignments;
        let converged = step.inertia == 0.0 || (prev - step.inertia) <= config.tol * prev;
        prev = step.inertia;
        if converged && step.reseeded.is_empty() {
            break;
        }
    }

    repair_empty(embeddings, &mut assignments, &centroids, k);
    let centroids = means(embeddings, &assignments, k);
    let d = embeddings.d();
    let inertia: f64 = assignments
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(embeddings.row(i), &centroids[c * d..(c + 1) * d]))
        .sum();
    if !inertia.is_finite() {
        return Err(Error::NonFinite("final inertia".into()));
    }
    Ok(Run {
        assignments,
        centroids,
        inertia,
        iterations,
    })
}

/// Fit k-means with `config.restarts` k-means++ initializations and keep the
/// run with the lowest inertia (ties to the earliest restart).
pub fn kmeans_fit(embeddings: &EmbeddingMatrix, config: &KMeansConfig) -> Result<Clustering> {
    config.validate()?;
    let n = embeddings.n();
    if config.k > n {
        return Err(Error::invalid(format!("k={} exceeds the number of rows n={n}", config.k)));
    }
    let data: Cow<'_, EmbeddingMatrix> = if config.normalize {
        Cow::Owned(embeddings.l2_normalized())
    } else {
        Cow::Borrowed(embeddings)
    };

    let mut seeder = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.restarts).map(|_| seeder.random()).collect();

    let (outer, inner) = if config.restarts > 1 {
        (config.exec, Exec::Sequential)
    } else {
        (Exec::Sequential, config.exec)
    };
    let runs = outer.map_indexed(seeds.len(), |r| run_once(&data, config, seeds[r], inner));

    let mut best: Option<Run> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let best = best.expect("restarts >= 1");
    Ok(Clustering {
        k: config.k,
        d: data.d(),
        assignments: best.assignments,
        centroids: best.centroids,
        inertia: best.inertia,
        iterations: best.iterations,
        seed: config.seed,
    })
}
