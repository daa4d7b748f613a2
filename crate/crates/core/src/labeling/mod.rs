//! ACTION-OBJECT extraction from dependency parses and per-cluster labels.

mod extract;
mod labels;

pub use extract::{extract_pair, is_number_token, ActionObjectPair, ObjectRelations};
pub use labels::{cluster_pair_counts, generate_labels, ClusterLabel, LabelSet, PairCounts};
