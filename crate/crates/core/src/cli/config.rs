use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::labeling::ObjectRelations;
use crate::model_selection::SelectionConfig;

pub const DEFAULT_RELATIONS: &str = "dobj,obj,attr";

/// Options shared by every subcommand. Each one may also come from the
/// `--config` JSON file under the same (kebab-case) name.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// Corpus in JSON Lines (`id`, `text`, optional `gold`)
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Sentence embeddings in EMB1 format, rows in corpus order
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Dependency parses in CoNLL-U with `# sent_id` comments
    #[arg(long)]
    pub conllu: Option<PathBuf>,
    /// Clustering report to read (default: <out-dir>/clustering.json)
    #[arg(long)]
    pub clustering: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Cluster count for `cluster`
    #[arg(long)]
    pub k: Option<i64>,
    #[arg(long)]
    pub k_min: Option<i64>,
    #[arg(long)]
    pub k_max: Option<i64>,
    /// Imbalance penalty scale in [0, 1] [default: 0.5]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Random seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// k-means++ restarts per K [default: 10]
    #[arg(long)]
    pub restarts: Option<i64>,
    /// Lloyd iteration cap [default: 300]
    #[arg(long)]
    pub max_iters: Option<i64>,
    /// Relative inertia improvement treated as converged [default: 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
    /// L2-normalize embeddings before clustering
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalize: Option<bool>,
    /// Score Silhouette on a seeded sample of this many points
    #[arg(long)]
    pub silhouette_sample: Option<i64>,
    /// Object relations, comma separated [default: dobj,obj,attr]
    #[arg(long)]
    pub relations: Option<String>,
    /// Include centroids in clustering.json
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub emit_centroids: Option<bool>,
    /// Flat JSON config file; command-line flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fill every unset field from `other`.
    pub fn or(self, other: Flags) -> Flags {
        Flags {
            corpus: self.corpus.or(other.corpus),
            embeddings: self.embeddings.or(other.embeddings),
            conllu: self.conllu.or(other.conllu),
            clustering: self.clustering.or(other.clustering),
            out_dir: self.out_dir.or(other.out_dir),
            k: self.k.or(other.k),
            k_min: self.k_min.or(other.k_min),
            k_max: self.k_max.or(other.k_max),
            lambda: self.lambda.or(other.lambda),
            seed: self.seed.or(other.seed),
            restarts: self.restarts.or(other.restarts),
            max_iters: self.max_iters.or(other.max_iters),
            tol: self.tol.or(other.tol),
            normalize: self.normalize.or(other.normalize),
            silhouette_sample: self.silhouette_sample.or(other.silhouette_sample),
            relations: self.relations.or(other.relations),
            emit_centroids: self.emit_centroids.or(other.emit_centroids),
            config: self.config,
        }
    }
}

/// Load a flat config file. A run manifest is accepted too: its `config`
/// block is used.
pub fn load_config(path: &Path) -> Result<Flags> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path, e.line(), format!("malformed config: {e}")))?;
    if let Some(inner) = v.get_mut("config").filter(|c| c.is_object()) {
        v = inner.take();
    }
    serde_json::from_value(v).map_err(|e| Error::parse(path, 0, format!("invalid config: {e}")))
}

/// Fully resolved options: flags > config file > built-in defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Effective {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conllu: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clustering: Option<PathBuf>,
    pub out_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub lambda: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub normalize: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub silhouette_sample: Option<usize>,
    pub relations: String,
    pub emit_centroids: bool,
}

fn count(name: &str, v: Option<i64>, min: i64) -> Result<Option<usize>> {
    match v {
        Some(x) if x < min => Err(Error::invalid(format!("{name} must be at least {min}"))),
        Some(x) => Ok(Some(x as usize)),
        None => Ok(None),
    }
}

impl Effective {
    pub fn resolve(cli: Flags) -> Result<Self> {
        let flags = match &cli.config {
            Some(path) => {
                let path = path.clone();
                cli.or(load_config(&path)?)
            }
            None => cli,
        };
        let lambda = flags.lambda.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        let tol = flags.tol.unwrap_or(1e-6);
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::invalid("tol must be a finite non-negative number"));
        }
        let relations = flags.relations.unwrap_or_else(|| DEFAULT_RELATIONS.to_owned());
        ObjectRelations::parse(&relations)?;
        Ok(Effective {
            corpus: flags.corpus,
            embeddings: flags.embeddings,
            conllu: flags.conllu,
            clustering: flags.clustering,
            out_dir: flags.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            k: count("k", flags.k, 1)?,
            k_min: count("k-min", flags.k_min, 2)?.unwrap_or(2),
            k_max: count("k-max", flags.k_max, 2)?.unwrap_or(15),
            lambda,
            seed: flags.seed.unwrap_or(0),
            restarts: count("restarts", flags.restarts, 1)?.unwrap_or(10),
            max_iters: count("max-iters", flags.max_iters, 1)?.unwrap_or(300),
            tol,
            normalize: flags.normalize.unwrap_or(false),
            silhouette_sample: count("silhouette-sample", flags.silhouette_sample, 2)?,
            relations,
            emit_centroids: flags.emit_centroids.unwrap_or(false),
        })
    }

    pub fn selection(&self) -> SelectionConfig {
        SelectionConfig {
            k_min: self.k_min,
            k_max: self.k_max,
            lambda: self.lambda,
            sample: self.silhouette_sample,
            seed: self.seed,
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            normalize: self.normalize,
            exec: Exec::default(),
        }
    }

    pub fn object_relations(&self) -> ObjectRelations {
        ObjectRelations::parse(&self.relations).expect("validated in resolve")
    }

    pub fn clustering_path(&self) -> PathBuf {
        self.clustering
            .clone()
            .unwrap_or_else(|| self.out_dir.join("clustering.json"))
    }
}
