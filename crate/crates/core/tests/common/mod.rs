//! Test-only oracles and data generators. Nothing here calls into the
//! library's algorithms; results are compared against the library instead.
#![allow(dead_code)]

use std::path::Path;

use intent_discovery::data_io::{encode_emb1, EmbeddingMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Naive O(n²) Silhouette straight from the definitions.
pub fn naive_silhouette(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = points.len();
    let dist = |i: usize, j: usize| -> f64 {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let k = labels.iter().max().unwrap() + 1;
    let mut total = 0.0;
    for i in 0..n {
        let mut sum = vec![0.0; k];
        let mut cnt = vec![0usize; k];
        for j in 0..n {
            if j != i {
                sum[labels[j]] += dist(i, j);
                cnt[labels[j]] += 1;
            }
        }
        let own = labels[i];
        if cnt[own] == 0 {
            continue;
        }
        let a = sum[own] / cnt[own] as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != own && cnt[c] > 0 {
                b = b.min(sum[c] / cnt[c] as f64);
            }
        }
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / n as f64
}

/// Within-cluster sum of squares of a labeling, centroids as exact means.
pub fn sse(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let d = points[0].len();
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<&Vec<f64>> = points.iter().zip(labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
        if members.is_empty() {
            continue;
        }
        let mean: Vec<f64> = (0..d)
            .map(|j| members.iter().map(|p| p[j]).sum::<f64>() / members.len() as f64)
            .collect();
        total += members
            .iter()
            .map(|p| p.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum::<f64>();
    }
    total
}

/// Exhaustive minimum of the k-means objective over all partitions of
/// `points` into exactly `k` non-empty clusters.
pub fn brute_force_kmeans(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut x = code;
        let mut used = vec![false; k];
        for l in labels.iter_mut() {
            *l = x % k;
            used[*l] = true;
            x /= k;
        }
        if used.iter().all(|&u| u) {
            best = best.min(sse(points, &labels, k));
        }
    }
    best
}

/// Maximum total over all injective row→column maps (rows may stay unmatched
/// when there are more rows than columns).
pub fn brute_force_assignment(m: &[Vec<u64>]) -> u64 {
    fn go(m: &[Vec<u64>], row: usize, used: &mut Vec<bool>) -> u64 {
        if row == m.len() {
            return 0;
        }
        let mut best = go(m, row + 1, used);
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(m[row][c] + go(m, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    let cols = m.first().map_or(0, Vec::len);
    go(m, 0, &mut vec![false; cols])
}

pub fn to_f64(m: &EmbeddingMatrix) -> Vec<Vec<f64>> {
    m.rows().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize, scale: f32) -> EmbeddingMatrix {
    let values = (0..n * d).map(|_| rng.random_range(-scale..scale)).collect();
    EmbeddingMatrix::new(n, d, values).unwrap()
}

/// Isotropic Gaussian blobs (σ = 1) with centers at least `min_sep` apart.
/// Returns the matrix and the generating blob of each row.
pub fn gaussian_blobs(seed: u64, blobs: usize, per_blob: usize, d: usize, min_sep: f64) -> (EmbeddingMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = Vec::new();
    while centers.len() < blobs {
        let c: Vec<f64> = (0..d).map(|_| rng.random_range(-25.0..25.0)).collect();
        let ok = centers.iter().all(|o| {
            o.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() >= min_sep
        });
        if ok {
            centers.push(c);
        }
    }
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut values = Vec::with_capacity(blobs * per_blob * d);
    let mut truth = Vec::with_capacity(blobs * per_blob);
    for (b, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            values.extend(c.iter().map(|&x| (x + noise.sample(&mut rng)) as f32));
            truth.push(b);
        }
    }
    (EmbeddingMatrix::new(blobs * per_blob, d, values).unwrap(), truth)
}

fn grid(cx: f32, mx: usize, my: usize) -> Vec<[f32; 2]> {
    let mut pts = Vec::new();
    for i in 0..mx {
        for j in 0..my {
            pts.push([cx + (i as f32 - (mx as f32 - 1.0) / 2.0), j as f32 - (my as f32 - 1.0) / 2.0]);
        }
    }
    pts
}

/// Size-imbalance trap: three unit-spacing grids of 40, 40 and 20 points
/// centred at x = 0, 12, 40. Merging the two close grids (K = 2) scores a
/// higher raw Silhouette than the true K = 3, but the merge is unbalanced
/// (sizes 80/20, cv = 0.6).
pub fn imbalance_trap() -> (EmbeddingMatrix, Vec<usize>) {
    let mut rows = grid(0.0, 8, 5);
    rows.extend(grid(12.0, 8, 5));
    rows.extend(grid(40.0, 5, 4));
    let truth = [vec![0; 40], vec![1; 40], vec![2; 20]].concat();
    (EmbeddingMatrix::from_rows(&rows).unwrap(), truth)
}

/// Write corpus/embeddings fixture files for CLI runs.
pub fn write_fixture(dir: &Path, m: &EmbeddingMatrix, gold: Option<&[String]>) {
    let mut corpus = String::new();
    for i in 0..m.n() {
        let mut obj = serde_json::json!({"id": format!("u{i:04}"), "text": format!("utterance {i}")});
        if let Some(g) = gold {
            obj["gold"] = serde_json::json!(g[i]);
        }
        corpus.push_str(&obj.to_string());
        corpus.push('\n');
    }
    std::fs::write(dir.join("corpus.jsonl"), corpus).unwrap();
    std::fs::write(dir.join("embeddings.emb1"), encode_emb1(m)).unwrap();
}

pub fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures"))
}

/// Fixture clustering assignments in corpus order.
pub fn label_fixture_assignments() -> Vec<usize> {
    let corpus = intent_discovery::data_io::read_corpus(fixtures().join("labeling.jsonl")).unwrap();
    intent_discovery::data_io::read_clustering_report(fixtures().join("labeling_clustering.json"), &corpus)
        .unwrap()
        .assignments
}

/// Embeddings for the labeling fixture: one tight, well separated blob per
/// fixture cluster.
pub fn label_fixture_embeddings() -> EmbeddingMatrix {
    let rows: Vec<[f32; 2]> = label_fixture_assignments()
        .iter()
        .enumerate()
        .map(|(i, &c)| [c as f32 * 20.0 + (i % 3) as f32 * 0.25, (i % 2) as f32 * 0.25])
        .collect();
    EmbeddingMatrix::from_rows(&rows).unwrap()
}

pub fn expected_labels(key: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(fixtures().join("labeling_expected.json")).unwrap();
    serde_json::from_str::<serde_json::Value>(&text).unwrap()[key].clone()
}
