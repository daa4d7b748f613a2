//! Input readers (corpus, embeddings, parses) and report writers.

mod conllu;
mod corpus;
mod embeddings;
mod report;

pub use conllu::{read_conllu, parse_conllu, ParseTable, Token};
pub use corpus::{read_corpus, parse_corpus, Corpus, Utterance};
pub use embeddings::{read_embeddings, decode_emb1, encode_emb1, write_embeddings, EmbeddingMatrix, EMB1_MAGIC};
pub use report::{
    read_clustering_report, render_report, round_sig, write_report, ClusteringReport,
    ReadClustering, Report, ReportFormat, SIG_DIGITS,
};
