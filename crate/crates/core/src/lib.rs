//! Unsupervised intent discovery over precomputed sentence embeddings.
//!
//! The pipeline has two stages. Utterance vectors are clustered with k-means,
//! and the cluster count is picked by scanning K with a size-balanced variant of
//! the Silhouette score. Each cluster is then named with its most frequent
//! ACTION-OBJECT pair, read off dependency parses. When gold intents are
//! available the discovered clusters are scored with P/R/F1, NMI and ARI.
//!
//! Row-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default). Sequential and parallel execution produce bit-identical
//! results because every reduction is performed in row order.

pub mod cli;
pub mod clustering;
pub mod data_io;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod labeling;
pub mod model_selection;

pub use clustering::{kmeans_fit, kmeanspp_init, lloyd_step, Clustering, KMeansConfig, LloydStep};
pub use data_io::{
    read_conllu, read_corpus, read_embeddings, write_report, Corpus, EmbeddingMatrix, ParseTable,
    ReportFormat, Token, Utterance,
};
pub use error::{Error, Result};
pub use evaluation::{ari, contingency, hungarian_match, nmi, prf_report, ContingencyMatrix, EvalReport};
pub use exec::Exec;
pub use labeling::{cluster_pair_counts, extract_pair, generate_labels, ActionObjectPair, LabelSet};
pub use model_selection::{
    balance_penalty, balanced_score, select_k, silhouette_mean, ScoreCurve, SelectionConfig,
};
