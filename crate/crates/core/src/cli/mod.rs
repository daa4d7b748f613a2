//! Command-line front end: `select-k`, `cluster`, `label`, `evaluate`, `pipeline`.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 I/O error. Every
//! failure prints exactly one `error: ...` line on standard error.

mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

pub use config::{load_config, Effective, Flags, DEFAULT_RELATIONS};

use crate::clustering::{kmeans_fit, Clustering, KMeansConfig};
use crate::data_io::{
    read_clustering_report, read_conllu, read_corpus, read_embeddings, write_report, ClusteringReport,
    Corpus, ReportFormat,
};
use crate::error::Error;
use crate::evaluation::evaluate;
use crate::exec::Exec;
use crate::labeling::{cluster_pair_counts, generate_labels};
use crate::model_selection::select_k;

pub const SCORES_CSV: &str = "scores.csv";
pub const SCORES_JSON: &str = "scores.json";
pub const CLUSTERING_JSON: &str = "clustering.json";
pub const LABELS_JSON: &str = "labels.json";
pub const EVAL_JSON: &str = "eval.json";
pub const MANIFEST_JSON: &str = "manifest.json";
/// Wall-clock stage durations. Kept out of the manifest so that repeated runs
/// produce identical manifests.
pub const TIMINGS_JSON: &str = "timings.json";

#[derive(Debug, Parser)]
#[command(name = "intent-discovery", version, about = "Discover, label and evaluate intents in an utterance corpus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan K, score each fit, and keep the best balanced score
    SelectK(Flags),
    /// Fit k-means at a fixed K
    Cluster(Flags),
    /// Generate ACTION-OBJECT labels for an existing clustering
    Label(Flags),
    /// Score an existing clustering against gold labels
    Evaluate(Flags),
    /// select-k, then label, then evaluate when gold labels exist
    Pipeline(Flags),
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn in_stage(self, stage: &str) -> Self {
        CliError {
            code: self.code,
            message: format!("stage {stage}: {}", self.message),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_io() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("{}", one_line(line.trim_start_matches("error: ")));
            return 1;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", one_line(&e.message));
            e.code
        }
    }
}

fn one_line(msg: &str) -> String {
    format!("error: {}", msg.split_whitespace().collect::<Vec<_>>().join(" "))
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::SelectK(f) => {
            let eff = Effective::resolve(f)?;
            let (_, chosen) = cmd_select_k(&eff)?;
            println!("chosen k = {chosen}");
        }
        Command::Cluster(f) => {
            let eff = Effective::resolve(f)?;
            let c = cmd_cluster(&eff)?;
            println!("k = {}, inertia = {}", c.k, c.inertia);
        }
        Command::Label(f) => {
            let eff = Effective::resolve(f)?;
            cmd_label(&eff)?;
        }
        Command::Evaluate(f) => {
            let eff = Effective::resolve(f)?;
            cmd_evaluate(&eff)?;
        }
        Command::Pipeline(f) => {
            let eff = Effective::resolve(f)?;
            cmd_pipeline(&eff)?;
        }
    }
    Ok(())
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn prepare_out_dir(eff: &Effective) -> CliResult<()> {
    fs::create_dir_all(&eff.out_dir).map_err(|e| Error::io(&eff.out_dir, e))?;
    Ok(())
}

fn load_corpus(eff: &Effective) -> CliResult<Corpus> {
    Ok(read_corpus(required(&eff.corpus, "corpus")?)?)
}

fn write_clustering(eff: &Effective, corpus: &Corpus, c: &Clustering) -> CliResult<()> {
    let report = ClusteringReport {
        clustering: c,
        corpus,
        emit_centroids: eff.emit_centroids,
    };
    write_report(&report, eff.out_dir.join(CLUSTERING_JSON), ReportFormat::Json)?;
    Ok(())
}

/// Writes scores.csv, scores.json and clustering.json; returns the chosen K.
pub fn cmd_select_k(eff: &Effective) -> CliResult<(Clustering, usize)> {
    let corpus = load_corpus(eff)?;
    let emb = read_embeddings(required(&eff.embeddings, "embeddings")?, &corpus)?;
    let cfg = eff.selection();
    cfg.validate()?;
    prepare_out_dir(eff)?;
    let (curve, clustering) = select_k(&emb, &cfg)?;
    write_report(&curve, eff.out_dir.join(SCORES_CSV), ReportFormat::Csv)?;
    write_report(&curve, eff.out_dir.join(SCORES_JSON), ReportFormat::Json)?;
    write_clustering(eff, &corpus, &clustering)?;
    Ok((clustering, curve.chosen_k))
}

pub fn cmd_cluster(eff: &Effective) -> CliResult<Clustering> {
    let k = eff.k.ok_or_else(|| CliError::usage("--k is required"))?;
    let corpus = load_corpus(eff)?;
    if k > corpus.len() {
        return Err(CliError::usage(format!(
            "k exceeds corpus size ({k} > {})",
            corpus.len()
        )));
    }
    let emb = read_embeddings(required(&eff.embeddings, "embeddings")?, &corpus)?;
    prepare_out_dir(eff)?;
    let config = KMeansConfig {
        k,
        seed: eff.seed,
        restarts: eff.restarts,
        max_iters: eff.max_iters,
        tol: eff.tol,
        normalize: eff.normalize,
        exec: Exec::default(),
    };
    let clustering = kmeans_fit(&emb, &config)?;
    write_clustering(eff, &corpus, &clustering)?;
    Ok(clustering)
}

pub fn cmd_label(eff: &Effective) -> CliResult<()> {
    let conllu = required(&eff.conllu, "conllu")?;
    let corpus = load_corpus(eff)?;
    let clustering = read_clustering_report(eff.clustering_path(), &corpus)?;
    let parses = read_conllu(conllu, &corpus)?;
    prepare_out_dir(eff)?;
    let counts = cluster_pair_counts(
        &clustering.assignments,
        clustering.k,
        &parses,
        &corpus,
        &eff.object_relations(),
    )?;
    let labels = generate_labels(&counts)?;
    write_report(&labels, eff.out_dir.join(LABELS_JSON), ReportFormat::Json)?;
    Ok(())
}

pub fn cmd_evaluate(eff: &Effective) -> CliResult<()> {
    let corpus = load_corpus(eff)?;
    let gold = corpus
        .gold()
        .ok_or_else(|| CliError::usage("gold labels required"))?;
    let clustering = read_clustering_report(eff.clustering_path(), &corpus)?;
    prepare_out_dir(eff)?;
    let report = evaluate(&clustering.assignments, &gold)?;
    write_report(&report, eff.out_dir.join(EVAL_JSON), ReportFormat::Json)?;
    Ok(())
}

fn check_distinct_paths(eff: &Effective) -> CliResult<()> {
    let named: Vec<(&str, &Path)> = [
        ("corpus", eff.corpus.as_deref()),
        ("embeddings", eff.embeddings.as_deref()),
        ("conllu", eff.conllu.as_deref()),
        ("out-dir", Some(eff.out_dir.as_path())),
    ]
    .into_iter()
    .filter_map(|(n, p)| p.map(|p| (n, p)))
    .collect();
    for (i, (a, pa)) in named.iter().enumerate() {
        for (b, pb) in &named[i + 1..] {
            if pa == pb {
                return Err(CliError::usage(format!("--{a} and --{b} refer to the same path")));
            }
        }
    }
    Ok(())
}

/// Run every stage and write a manifest that can be fed back via `--config`.
pub fn cmd_pipeline(eff: &Effective) -> CliResult<()> {
    required(&eff.corpus, "corpus")?;
    required(&eff.embeddings, "embeddings")?;
    required(&eff.conllu, "conllu")?;
    check_distinct_paths(eff)?;
    // clustering is always the one this run writes
    let eff = Effective {
        clustering: None,
        ..eff.clone()
    };

    let mut stages = Map::new();
    let mut timings = Map::new();
    let mut timed = |name: &str, f: &mut dyn FnMut() -> CliResult<()>| -> CliResult<()> {
        let start = Instant::now();
        f().map_err(|e| e.in_stage(name))?;
        timings.insert(name.to_owned(), json!(start.elapsed().as_secs_f64()));
        stages.insert(name.to_owned(), json!("ok"));
        Ok(())
    };

    let mut chosen_k = 0;
    timed("select-k", &mut || {
        chosen_k = cmd_select_k(&eff)?.1;
        Ok(())
    })?;
    timed("label", &mut || cmd_label(&eff))?;
    let has_gold = load_corpus(&eff)
        .map_err(|e| e.in_stage("evaluation"))?
        .has_gold();
    if has_gold {
        timed("evaluation", &mut || cmd_evaluate(&eff))?;
    } else {
        stages.insert("evaluation".into(), json!("skipped (no gold)"));
    }

    let mut outputs = vec![SCORES_CSV, SCORES_JSON, CLUSTERING_JSON, LABELS_JSON];
    if has_gold {
        outputs.push(EVAL_JSON);
    }
    let manifest = json!({
        "command": "pipeline",
        "config": serde_json::to_value(&eff).expect("config serializes"),
        "versions": { env!("CARGO_PKG_NAME"): env!("CARGO_PKG_VERSION") },
        "stages": Value::Object(stages),
        "chosen_k": chosen_k,
        "outputs": outputs,
        "timings_file": TIMINGS_JSON,
    });
    write_json(&eff.out_dir.join(MANIFEST_JSON), &manifest)?;
    write_json(&eff.out_dir.join(TIMINGS_JSON), &Value::Object(timings))?;
    println!("chosen k = {chosen_k}");
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))?;
    Ok(())
}
