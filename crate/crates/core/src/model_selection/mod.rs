//! Choosing K: Silhouette score, the size-balance penalty, and the K scan.

mod penalty;
mod select;
mod silhouette;

pub use penalty::{balance_penalty, imbalance_sum};
pub use select::{balanced_score, select_k, FailedRow, Score, ScoreCurve, ScoreRow, SelectionConfig};
pub use silhouette::{silhouette_mean, silhouette_mean_with, silhouette_samples, PairwiseDistances};
