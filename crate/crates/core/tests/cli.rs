mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixtures, gaussian_blobs, label_fixture_embeddings, write_fixture};
use intent_discovery::data_io::encode_emb1;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_intent-discovery"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Failure contract: the given exit code and exactly one `error:` line.
fn assert_fails(out: &Output, code: i32, needle: &str) {
    let err = stderr(out);
    assert_eq!(out.status.code(), Some(code), "stderr: {err}");
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].starts_with("error: "), "{err}");
    assert!(lines[0].contains(needle), "{err}");
}

fn blob_dir(gold: bool) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let (m, truth) = gaussian_blobs(5, 7, 30, 8, 18.0);
    let names: Vec<String> = truth.iter().map(|t| format!("intent{t}")).collect();
    write_fixture(dir.path(), &m, gold.then_some(names.as_slice()));
    dir
}

/// Labeling fixture plus matching embeddings, copied into a scratch dir.
fn label_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for f in ["labeling.jsonl", "labeling.conllu", "labeling_clustering.json"] {
        fs::copy(fixtures().join(f), dir.path().join(f)).unwrap();
    }
    fs::write(dir.path().join("labeling.emb1"), encode_emb1(&label_fixture_embeddings())).unwrap();
    dir
}

#[test]
fn select_k_scans_the_range() {
    let dir = blob_dir(false);
    let d = dir.path();
    let out_dir = d.join("out");
    let out = run(&[
        "select-k", "--corpus", p(&d.join("corpus.jsonl")), "--embeddings", p(&d.join("embeddings.emb1")),
        "--out-dir", p(&out_dir), "--k-min", "2", "--k-max", "12", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let scores = json(&out_dir.join("scores.json"));
    assert_eq!(scores["rows"].as_array().unwrap().len(), 11);
    assert_eq!(scores["chosen_k"], 7);
    let csv = fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,silhouette,penalty,balanced"));
    assert_eq!(csv.lines().count(), 12);
    assert_eq!(json(&out_dir.join("clustering.json"))["k"], 7);

    // lambda 0 turns the balanced score into the plain silhouette
    let out = run(&[
        "select-k", "--corpus", p(&d.join("corpus.jsonl")), "--embeddings", p(&d.join("embeddings.emb1")),
        "--out-dir", p(&out_dir), "--k-min", "2", "--k-max", "5", "--lambda", "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for row in json(&out_dir.join("scores.json"))["rows"].as_array().unwrap() {
        assert_eq!(row["balanced"], row["silhouette"]);
    }

    let out = run(&[
        "select-k", "--corpus", p(&d.join("corpus.jsonl")), "--embeddings", p(&d.join("embeddings.emb1")),
        "--out-dir", p(&out_dir), "--k-min", "5", "--k-max", "3",
    ]);
    assert_fails(&out, 1, "k-min exceeds k-max");
}

#[test]
fn cluster_is_deterministic_and_validated() {
    let dir = blob_dir(false);
    let d = dir.path();
    let args = |k: &str, out: &Path| {
        run(&[
            "cluster", "--corpus", p(&d.join("corpus.jsonl")), "--embeddings", p(&d.join("embeddings.emb1")),
            "--out-dir", p(out), "--k", k, "--seed", "42",
        ])
    };
    let (a, b) = (d.join("a"), d.join("b"));
    assert!(args("7", &a).status.success());
    assert!(args("7", &b).status.success());
    assert_eq!(fs::read(a.join("clustering.json")).unwrap(), fs::read(b.join("clustering.json")).unwrap());

    assert_fails(&args("0", &a), 1, "k");
    assert_fails(&args("211", &a), 1, "k exceeds corpus size");
    assert_fails(&args("seven", &a), 1, "seven");
    let out = run(&["cluster", "--corpus", p(&d.join("missing.jsonl")), "--k", "3"]);
    assert_fails(&out, 2, "missing.jsonl");
}

#[test]
fn label_and_evaluate_on_fixture() {
    let dir = label_dir();
    let d = dir.path();
    let base = |cmd: &str| {
        vec![
            cmd.to_owned(), "--corpus".into(), p(&d.join("labeling.jsonl")).into(),
            "--clustering".into(), p(&d.join("labeling_clustering.json")).into(),
            "--out-dir".into(), p(&d.join("out")).into(),
        ]
    };
    let mut args = base("label");
    args.extend(["--conllu".into(), p(&d.join("labeling.conllu")).into()]);
    let out = bin().args(&args).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let labels = json(&d.join("out/labels.json"));
    assert_eq!(labels["clusters"]["3"]["label"], "play-music");
    assert_eq!(labels["clusters"]["1"]["label"], "be-weather");
    assert_eq!(labels["clusters"]["3"]["fallback_used"], true);

    let mut dobj = args.clone();
    dobj.extend(["--relations".into(), "dobj".into()]);
    assert!(bin().args(&dobj).output().unwrap().status.success());
    assert_eq!(json(&d.join("out/labels.json"))["clusters"]["1"]["label"], "tell-forecast");

    let out = bin().args(base("label")).output().unwrap();
    assert_fails(&out, 1, "--conllu is required");
    let mut missing = base("label");
    missing.extend(["--conllu".into(), p(&d.join("nope.conllu")).into()]);
    assert_fails(&bin().args(&missing).output().unwrap(), 2, "nope.conllu");

    let out = bin().args(base("evaluate")).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let eval = json(&d.join("out/eval.json"));
    assert_eq!(eval["macro"]["f1"], 1.0);
    assert_eq!(eval["nmi"], 1.0);
    assert_eq!(eval["ari"], 1.0);
}

#[test]
fn evaluate_requires_gold() {
    let dir = blob_dir(false);
    let d = dir.path();
    let out = run(&[
        "cluster", "--corpus", p(&d.join("corpus.jsonl")), "--embeddings", p(&d.join("embeddings.emb1")),
        "--out-dir", p(d), "--k", "3",
    ]);
    assert!(out.status.success());
    let out = run(&["evaluate", "--corpus", p(&d.join("corpus.jsonl")), "--out-dir", p(d)]);
    assert_fails(&out, 1, "gold labels required");
}

fn pipeline_args(d: &Path, out: &Path) -> Vec<String> {
    [
        "pipeline", "--corpus", p(&d.join("labeling.jsonl")), "--embeddings", p(&d.join("labeling.emb1")),
        "--conllu", p(&d.join("labeling.conllu")), "--out-dir", p(out), "--k-min", "2", "--k-max", "8",
        "--seed", "42",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[test]
fn pipeline_writes_everything_and_repeats_exactly() {
    let dir = label_dir();
    let d = dir.path();
    let out_dir = d.join("out");
    let out = bin().args(pipeline_args(d, &out_dir)).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest = json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["chosen_k"], 5);
    let stages = manifest["stages"].as_object().unwrap();
    assert_eq!(stages.len(), 3);
    assert!(stages.values().all(|v| v == "ok"));
    for f in ["scores.csv", "scores.json", "clustering.json", "labels.json", "eval.json", "timings.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    assert_eq!(json(&out_dir.join("eval.json"))["macro"]["f1"], 1.0);

    let snapshot: Vec<(String, Vec<u8>)> = ["scores.csv", "scores.json", "clustering.json", "labels.json", "eval.json", "manifest.json"]
        .iter()
        .map(|f| (f.to_string(), fs::read(out_dir.join(f)).unwrap()))
        .collect();
    assert!(bin().args(pipeline_args(d, &out_dir)).output().unwrap().status.success());
    for (f, bytes) in snapshot {
        assert_eq!(fs::read(out_dir.join(&f)).unwrap(), bytes, "{f} differs");
    }
}

#[test]
fn pipeline_manifest_works_as_config() {
    let dir = label_dir();
    let d = dir.path();
    let first = d.join("first");
    assert!(bin().args(pipeline_args(d, &first)).output().unwrap().status.success());

    // flags override the config file, config overrides defaults
    let second = d.join("second");
    let out = run(&[
        "pipeline", "--config", p(&first.join("manifest.json")), "--out-dir", p(&second), "--k-max", "6",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest = json(&second.join("manifest.json"));
    assert_eq!(manifest["config"]["k-max"], 6);
    assert_eq!(manifest["config"]["seed"], 42);
    assert_eq!(manifest["config"]["k-min"], 2);
    assert_eq!(fs::read(first.join("labels.json")).unwrap(), fs::read(second.join("labels.json")).unwrap());

    fs::write(d.join("bad.json"), "{\"k-mx\": 3}").unwrap();
    assert_fails(&run(&["pipeline", "--config", p(&d.join("bad.json"))]), 1, "k-mx");
}

#[test]
fn pipeline_without_gold_skips_evaluation() {
    let dir = label_dir();
    let d = dir.path();
    let text = fs::read_to_string(d.join("labeling.jsonl")).unwrap();
    let stripped: String = text
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("gold");
            v.to_string() + "\n"
        })
        .collect();
    fs::write(d.join("labeling.jsonl"), stripped).unwrap();
    let out_dir = d.join("out");
    let out = bin().args(pipeline_args(d, &out_dir)).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest = json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["stages"]["evaluation"], "skipped (no gold)");
    assert!(!out_dir.join("eval.json").exists());
    assert!(!manifest["outputs"].as_array().unwrap().iter().any(|o| o == "eval.json"));
}

#[test]
fn pipeline_errors_name_their_stage() {
    let dir = label_dir();
    let d = dir.path();
    let mut args = pipeline_args(d, &d.join("out"));
    let i = args.iter().position(|a| a == "--k-max").unwrap();
    args[i + 1] = "40".into();
    assert_fails(&bin().args(&args).output().unwrap(), 1, "stage select-k");

    fs::write(d.join("labeling.conllu"), "# sent_id = zz\n1\tx\tx\tNOUN\t_\t_\t0\troot\t_\t_\n").unwrap();
    assert_fails(&bin().args(pipeline_args(d, &d.join("out"))).output().unwrap(), 1, "stage label");

    let same = run(&[
        "pipeline", "--corpus", p(&d.join("labeling.jsonl")), "--embeddings", p(&d.join("labeling.jsonl")),
        "--conllu", p(&d.join("labeling.conllu")),
    ]);
    assert_fails(&same, 1, "same path");
}

#[test]
fn help_and_usage() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("pipeline"));
    assert_fails(&run(&["frobnicate"]), 1, "frobnicate");
    assert_fails(&run(&["cluster", "--bogus"]), 1, "bogus");
}

#[test]
fn cluster_rejects_k_above_tiny_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let m = intent_discovery::EmbeddingMatrix::from_rows(&[[0.0f32], [1.0], [2.0], [3.0]]).unwrap();
    write_fixture(dir.path(), &m, None);
    let d = dir.path();
    let out = run(&[
        "cluster", "--corpus", p(&d.join("corpus.jsonl")), "--embeddings", p(&d.join("embeddings.emb1")),
        "--out-dir", p(d), "--k", "7",
    ]);
    assert_fails(&out, 1, "k exceeds corpus size");
}
