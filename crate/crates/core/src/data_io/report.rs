//! Deterministic JSON/CSV serialization of pipeline outputs.
//!
//! JSON objects are emitted with sorted keys and every float is rounded to
//! [`SIG_DIGITS`] significant digits before printing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::clustering::Clustering;
use crate::data_io::Corpus;
use crate::error::{Error, Result};
use crate::evaluation::EvalReport;
use crate::labeling::LabelSet;
use crate::model_selection::ScoreCurve;

pub const SIG_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// A pipeline output that can be written by [`write_report`].
pub trait Report {
    /// Human-readable report name used in diagnostics.
    const KIND: &'static str;

    fn to_json(&self) -> Value;

    /// Tabular rendering, for reports that have one.
    fn to_csv(&self) -> Option<String> {
        None
    }
}

/// Round to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific float formatting parses back")
}

fn num(x: f64) -> Value {
    let r = round_sig(x, SIG_DIGITS);
    // -0.0 would otherwise print as "-0.0"
    json!(if r == 0.0 { 0.0 } else { r })
}

fn fmt_num(x: f64) -> String {
    let r = round_sig(x, SIG_DIGITS);
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

pub fn render_report<R: Report>(report: &R, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("json values serialize");
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => report
            .to_csv()
            .ok_or_else(|| Error::Unsupported(format!("csv unsupported for {}", R::KIND))),
    }
}

pub fn write_report<R: Report>(report: &R, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let body = render_report(report, format)?;
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// A [`Clustering`] paired with the corpus ids its rows belong to.
pub struct ClusteringReport<'a> {
    pub clustering: &'a Clustering,
    pub corpus: &'a Corpus,
    pub emit_centroids: bool,
}

impl Report for ClusteringReport<'_> {
    const KIND: &'static str = "clustering";

    fn to_json(&self) -> Value {
        let c = self.clustering;
        let assignments: Map<String, Value> = self
            .corpus
            .ids()
            .zip(&c.assignments)
            .map(|(id, &a)| (id.to_owned(), json!(a)))
            .collect();
        let mut obj = Map::new();
        obj.insert("k".into(), json!(c.k));
        obj.insert("seed".into(), json!(c.seed));
        obj.insert("inertia".into(), num(c.inertia));
        obj.insert("iterations".into(), json!(c.iterations));
        obj.insert("assignments".into(), Value::Object(assignments));
        if self.emit_centroids {
            let centroids: Vec<Value> = (0..c.k)
                .map(|i| Value::Array(c.centroid(i).iter().map(|&v| num(v)).collect()))
                .collect();
            obj.insert("centroids".into(), Value::Array(centroids));
        }
        Value::Object(obj)
    }
}

impl Report for ScoreCurve {
    const KIND: &'static str = "score curve";

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "silhouette": num(r.silhouette),
                    "penalty": num(r.penalty),
                    "balanced": num(r.balanced),
                })
            })
            .collect();
        let failed: Vec<Value> = self
            .failed
            .iter()
            .map(|f| json!({"k": f.k, "error": f.error}))
            .collect();
        json!({"chosen_k": self.chosen_k, "rows": rows, "failed": failed})
    }

    fn to_csv(&self) -> Option<String> {
        let mut out = String::from("k,silhouette,penalty,balanced\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.k,
                fmt_num(r.silhouette),
                fmt_num(r.penalty),
                fmt_num(r.balanced)
            ));
        }
        Some(out)
    }
}

impl Report for LabelSet {
    const KIND: &'static str = "label set";

    fn to_json(&self) -> Value {
        let clusters: Map<String, Value> = self
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let top: Vec<Value> = c
                    .top_pairs
                    .iter()
                    .take(10)
                    .map(|(pair, count)| json!([pair, count]))
                    .collect();
                (
                    i.to_string(),
                    json!({
                        "label": c.label,
                        "fallback_used": c.fallback_used,
                        "coverage": num(c.coverage),
                        "size": c.size,
                        "top_pairs": top,
                    }),
                )
            })
            .collect();
        json!({ "clusters": clusters })
    }
}

impl Report for EvalReport {
    const KIND: &'static str = "eval report";

    fn to_json(&self) -> Value {
        let prf = |p: &crate::evaluation::Prf| {
            json!({"precision": num(p.precision), "recall": num(p.recall), "f1": num(p.f1)})
        };
        let mapping: Map<String, Value> = self
            .mapping
            .iter()
            .map(|(c, g)| (c.to_string(), json!(g)))
            .collect();
        let per_intent: Map<String, Value> = self
            .per_intent
            .iter()
            .map(|(g, p)| (g.clone(), prf(p)))
            .collect();
        let m = &self.contingency;
        json!({
            "mapping": mapping,
            "per_intent": per_intent,
            "macro": prf(&self.macro_avg),
            "nmi": num(self.nmi),
            "ari": num(self.ari),
            "contingency": {
                "pred_ids": m.pred_ids,
                "gold_names": m.gold_names,
                "counts": m.counts,
                "n": m.n,
            },
        })
    }
}

/// Assignments recovered from a clustering report, in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadClustering {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

/// Read a clustering report back and align it to `corpus`.
pub fn read_clustering_report(path: impl AsRef<Path>, corpus: &Corpus) -> Result<ReadClustering> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |msg: String| Error::parse(path, 0, msg);
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(format!("malformed JSON: {e}")))?;
    let k = v["k"].as_u64().ok_or_else(|| bad("missing integer field \"k\"".into()))? as usize;
    let seed = v["seed"].as_u64().unwrap_or(0);
    let raw: BTreeMap<String, usize> = serde_json::from_value(v["assignments"].clone())
        .map_err(|e| bad(format!("bad \"assignments\": {e}")))?;
    if raw.len() != corpus.len() {
        return Err(Error::Alignment(format!(
            "clustering covers {} utterances but the corpus has {}",
            raw.len(),
            corpus.len()
        )));
    }
    let mut assignments = Vec::with_capacity(corpus.len());
    for id in corpus.ids() {
        let &a = raw
            .get(id)
            .ok_or_else(|| Error::Alignment(format!("utterance {id:?} missing from clustering")))?;
        if a >= k {
            return Err(bad(format!("utterance {id:?} assigned to cluster {a} but k={k}")));
        }
        assignments.push(a);
    }
    Ok(ReadClustering {
        k,
        seed,
        assignments,
    })
}
