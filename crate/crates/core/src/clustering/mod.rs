//! K-means minimizing the within-cluster sum of squared Euclidean distances.

mod kmeans;

pub use kmeans::{kmeans_fit, kmeanspp_init, kmeanspp_init_with, lloyd_step, lloyd_step_with, LloydStep};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Result of a k-means fit. Every cluster in `0..k` is non-empty and each
/// centroid is the mean of its assigned rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub d: usize,
    pub assignments: Vec<usize>,
    /// Row-major `k × d`.
    pub centroids: Vec<f64>,
    pub inertia: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Clustering {
    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.d..(c + 1) * self.d]
    }

    pub fn sizes(&self) -> Vec<usize> {
        cluster_sizes(&self.assignments, self.k)
    }
}

pub(crate) fn cluster_sizes(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    sizes
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    /// Independent k-means++ initializations; the lowest-inertia run wins.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the relative inertia improvement of a step falls to `tol` or below.
    pub tol: f64,
    /// L2-normalize rows before clustering.
    pub normalize: bool,
    pub exec: Exec,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        KMeansConfig {
            k,
            seed: 0,
            restarts: 10,
            max_iters: 300,
            tol: 1e-6,
            normalize: false,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.restarts < 1 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max-iters must be at least 1"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol must be a finite non-negative number"));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn sq_dist(row: &[f32], centroid: &[f64]) -> f64 {
    row.iter()
        .zip(centroid)
        .map(|(&x, &c)| {
            let diff = f64::from(x) - c;
            diff * diff
        })
        .sum()
}
