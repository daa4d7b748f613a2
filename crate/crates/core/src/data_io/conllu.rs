use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::data_io::Corpus;
use crate::error::{Error, Result};

/// A basic (non multiword, non empty-node) CoNLL-U token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// 1-based index of the head token, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn new(form: &str, lemma: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            form: form.to_owned(),
            lemma: lemma.to_owned(),
            upos: upos.to_owned(),
            head,
            deprel: deprel.to_owned(),
        }
    }
}

/// Dependency parses keyed by utterance id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseTable {
    sentences: BTreeMap<String, Vec<Token>>,
}

impl ParseTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a sentence after checking head indices.
    pub fn insert(&mut self, id: impl Into<String>, tokens: Vec<Token>) -> Result<()> {
        let id = id.into();
        if let Some((i, t)) = tokens.iter().enumerate().find(|(_, t)| t.head > tokens.len()) {
            return Err(Error::invalid(format!(
                "sentence {id:?}: token {} has head {} but only {} tokens",
                i + 1,
                t.head,
                tokens.len()
            )));
        }
        self.sentences.insert(id, tokens);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[Token]> {
        self.sentences.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Token])> {
        self.sentences.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

pub fn read_conllu(path: impl AsRef<Path>, corpus: &Corpus) -> Result<ParseTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(&text, path, corpus)
}

struct Pending {
    id: Option<(String, usize)>,
    tokens: Vec<(Token, usize)>,
    start: usize,
}

impl Pending {
    fn new(start: usize) -> Self {
        Pending {
            id: None,
            tokens: Vec::new(),
            start,
        }
    }

    fn is_blank(&self) -> bool {
        self.id.is_none() && self.tokens.is_empty()
    }
}

/// Parse CoNLL-U text. Every sentence needs a `# sent_id = <id>` comment
/// naming a corpus utterance.
pub fn parse_conllu(text: &str, path: &Path, corpus: &Corpus) -> Result<ParseTable> {
    let known = corpus.index();
    let mut table = ParseTable::new();
    let mut cur = Pending::new(1);

    let flush = |cur: Pending, table: &mut ParseTable| -> Result<()> {
        if cur.is_blank() {
            return Ok(());
        }
        let Some((id, id_line)) = cur.id else {
            return Err(Error::parse(path, cur.start, "sentence without a sent_id comment"));
        };
        if !known.contains_key(id.as_str()) {
            return Err(Error::parse(path, id_line, format!("sent_id {id:?} is not in the corpus")));
        }
        if table.get(&id).is_some() {
            return Err(Error::parse(path, id_line, format!("duplicate sent_id {id:?}")));
        }
        let count = cur.tokens.len();
        for (t, line) in &cur.tokens {
            if t.head > count {
                return Err(Error::parse(
                    path,
                    *line,
                    format!("head {} out of range for a {count}-token sentence", t.head),
                ));
            }
        }
        table.insert(id, cur.tokens.into_iter().map(|(t, _)| t).collect())
    };

    for (lineno, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(std::mem::replace(&mut cur, Pending::new(lineno + 1)), &mut table)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(id) = sent_id(comment) {
                if cur.id.is_some() || !cur.tokens.is_empty() {
                    flush(std::mem::replace(&mut cur, Pending::new(lineno)), &mut table)?;
                }
                cur.id = Some((id.to_owned(), lineno));
            }
            continue;
        }
        if cur.is_blank() {
            cur.start = lineno;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let index: usize = id
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid token id {id:?}")))?;
        if index != cur.tokens.len() + 1 {
            return Err(Error::parse(
                path,
                lineno,
                format!("token id {index} out of sequence (expected {})", cur.tokens.len() + 1),
            ));
        }
        let head: usize = cols[6].parse().map_err(|_| {
            Error::parse(path, lineno, format!("non-integer HEAD {:?} on token {index}", cols[6]))
        })?;
        let token = Token::new(cols[1], cols[2], cols[3], head, cols[7]);
        cur.tokens.push((token, lineno));
    }
    flush(cur, &mut table)?;
    Ok(table)
}

fn sent_id(comment: &str) -> Option<&str> {
    let (key, value) = comment.split_once('=')?;
    (key.trim() == "sent_id").then(|| value.trim())
}
