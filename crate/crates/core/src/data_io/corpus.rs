use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<String>,
}

/// Ordered utterances with unique ids. Gold labels are all-or-nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    utterances: Vec<Utterance>,
}

impl Corpus {
    pub fn new(utterances: Vec<Utterance>) -> Result<Self> {
        if utterances.is_empty() {
            return Err(Error::invalid("corpus is empty"));
        }
        let mut seen = HashMap::with_capacity(utterances.len());
        for (i, u) in utterances.iter().enumerate() {
            if u.id.is_empty() {
                return Err(Error::invalid(format!("utterance {} has an empty id", i + 1)));
            }
            if let Some(prev) = seen.insert(u.id.as_str(), i) {
                return Err(Error::invalid(format!(
                    "duplicate id {:?} at positions {} and {}",
                    u.id,
                    prev + 1,
                    i + 1
                )));
            }
        }
        let with_gold = utterances.iter().filter(|u| u.gold.is_some()).count();
        if with_gold != 0 && with_gold != utterances.len() {
            return Err(Error::invalid(format!(
                "mixed gold presence: {with_gold} of {} utterances carry gold labels",
                utterances.len()
            )));
        }
        Ok(Corpus { utterances })
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.utterances.iter().map(|u| u.id.as_str())
    }

    pub fn has_gold(&self) -> bool {
        self.utterances[0].gold.is_some()
    }

    /// Gold labels in corpus order, or `None` when the corpus is unlabeled.
    pub fn gold(&self) -> Option<Vec<&str>> {
        self.utterances
            .iter()
            .map(|u| u.gold.as_deref())
            .collect::<Option<Vec<_>>>()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.utterances.iter().position(|u| u.id == id)
    }

    /// Map from id to row index.
    pub fn index(&self) -> HashMap<&str, usize> {
        self.ids().enumerate().map(|(i, id)| (id, i)).collect()
    }

    /// Serialize as JSON Lines.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        for u in &self.utterances {
            serde_json::to_writer(&mut buf, u).expect("utterance serializes");
            buf.push(b'\n');
        }
        fs::File::create(path)
            .and_then(|mut f| f.write_all(&buf))
            .map_err(|e| Error::io(path, e))
    }
}

/// Read a JSON Lines corpus (`{"id", "text", "gold"?}` per line).
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, path)
}

pub fn parse_corpus(text: &str, path: &Path) -> Result<Corpus> {
    let mut utterances = Vec::new();
    let mut lines_of: HashMap<String, usize> = HashMap::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let u: Utterance = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno, format!("malformed JSON: {e}")))?;
        if u.id.is_empty() {
            return Err(Error::parse(path, lineno, "empty id"));
        }
        if let Some(first) = lines_of.insert(u.id.clone(), lineno) {
            return Err(Error::parse(
                path,
                lineno,
                format!("duplicate id {:?} (first seen on line {first})", u.id),
            ));
        }
        utterances.push(u);
    }
    if utterances.is_empty() {
        return Err(Error::parse(path, 0, "corpus file is empty"));
    }
    Corpus::new(utterances).map_err(|e| Error::parse(path, 0, e.to_string()))
}
