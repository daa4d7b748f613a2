use std::collections::BTreeSet;
use std::fmt;

use crate::data_io::Token;
use crate::error::{Error, Result};

/// Dependency relations whose dependent counts as an OBJECT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectRelations(BTreeSet<String>);

impl Default for ObjectRelations {
    fn default() -> Self {
        ObjectRelations(["dobj", "obj", "attr"].iter().map(|s| s.to_string()).collect())
    }
}

impl ObjectRelations {
    pub fn new<I, S>(rels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set: BTreeSet<String> = rels
            .into_iter()
            .map(|s| s.as_ref().trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect();
        if set.is_empty() {
            return Err(Error::invalid("object relation set is empty"));
        }
        Ok(ObjectRelations(set))
    }

    /// Parse a comma-separated list such as `dobj,obj,attr`.
    pub fn parse(list: &str) -> Result<Self> {
        Self::new(list.split(','))
    }

    /// Matches the full relation or its universal part (`obj` for `obj:lvc`).
    pub fn matches(&self, deprel: &str) -> bool {
        self.0.contains(deprel) || deprel.split_once(':').is_some_and(|(base, _)| self.0.contains(base))
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl fmt::Display for ObjectRelations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<&str> = self.iter().collect();
        f.write_str(&v.join(","))
    }
}

/// Intent as (ACTION, OBJECT); `None` stands for a missing slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionObjectPair {
    pub action: Option<String>,
    pub object: Option<String>,
}

impl ActionObjectPair {
    pub fn none() -> Self {
        ActionObjectPair {
            action: None,
            object: None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.action.is_some() && self.object.is_some()
    }
}

impl fmt::Display for ActionObjectPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}",
            self.action.as_deref().unwrap_or("NONE"),
            self.object.as_deref().unwrap_or("NONE")
        )
    }
}

fn is_numeric_literal(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match s.split_once(['.', ',']) {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => digits(int),
        Some(f) => (int.is_empty() || digits(int)) && digits(f),
    }
}

/// True for tokens tagged NUM or whose form or lemma is a numeric literal.
pub fn is_number_token(t: &Token) -> bool {
    t.upos == "NUM" || is_numeric_literal(&t.form) || is_numeric_literal(&t.lemma)
}

fn is_verb(t: &Token) -> bool {
    t.upos == "VERB" || t.upos == "AUX"
}

fn is_noun(t: &Token) -> bool {
    t.upos == "NOUN" || t.upos == "PROPN"
}

fn lemma(t: &Token) -> String {
    let l = if t.lemma.is_empty() || t.lemma == "_" {
        &t.form
    } else {
        &t.lemma
    };
    l.to_lowercase()
}

/// Extract the ACTION-OBJECT pair of one parsed utterance.
///
/// The first noun (in token order) attached to a verb by an object relation
/// wins; numeric objects are skipped. Without one, the ACTION falls back to
/// the root verb, then the first VERB, then the first AUX.
pub fn extract_pair(tokens: &[Token], relations: &ObjectRelations) -> ActionObjectPair {
    let candidates = || {
        tokens
            .iter()
            .filter(|t| relations.matches(&t.deprel) && is_noun(t) && !is_number_token(t))
    };
    for t in candidates() {
        if t.head == 0 {
            continue;
        }
        let head = &tokens[t.head - 1];
        if is_verb(head) {
            return ActionObjectPair {
                action: Some(lemma(head)),
                object: Some(lemma(t)),
            };
        }
    }

    let verb = tokens
        .iter()
        .find(|t| t.head == 0 && is_verb(t))
        .or_else(|| tokens.iter().find(|t| t.upos == "VERB"))
        .or_else(|| tokens.iter().find(|t| t.upos == "AUX"));
    match verb {
        Some(v) => ActionObjectPair {
            action: Some(lemma(v)),
            object: None,
        },
        None => ActionObjectPair {
            action: None,
            object: candidates().next().map(lemma),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(form: &str, lemma: &str, upos: &str, head: usize, deprel: &str) -> Token {
        Token::new(form, lemma, upos, head, deprel)
    }

    #[test]
    fn add_tune() {
        let toks = vec![
            t("add", "add", "VERB", 0, "ROOT"),
            t("tune", "tune", "NOUN", 1, "dobj"),
            t("to", "to", "ADP", 1, "prep"),
            t("sxsw", "sxsw", "PROPN", 6, "compound"),
            t("fresh", "fresh", "ADJ", 6, "amod"),
            t("playlist", "playlist", "NOUN", 3, "pobj"),
        ];
        let p = extract_pair(&toks, &ObjectRelations::default());
        assert_eq!(p.to_string(), "add-tune");
    }

    #[test]
    fn numeral_object_skipped() {
        let toks = vec![
            t("i", "I", "PRON", 2, "nsubj"),
            t("give", "give", "VERB", 0, "ROOT"),
            t("4", "4", "NUM", 2, "dobj"),
            t("of", "of", "ADP", 3, "prep"),
            t("6", "6", "NUM", 6, "nummod"),
            t("stars", "star", "NOUN", 2, "dobj"),
        ];
        assert_eq!(extract_pair(&toks, &ObjectRelations::default()).to_string(), "give-star");
        // a numeral mis-tagged as a noun is still filtered
        let mut toks = toks;
        toks[2].upos = "NOUN".into();
        assert_eq!(extract_pair(&toks, &ObjectRelations::default()).to_string(), "give-star");
    }

    #[test]
    fn verbless_fragment() {
        let toks = vec![
            t("a", "a", "DET", 2, "det"),
            t("ticket", "ticket", "NOUN", 0, "ROOT"),
            t("from", "from", "ADP", 2, "prep"),
            t("paris", "paris", "PROPN", 3, "pobj"),
            t("to", "to", "ADP", 2, "prep"),
            t("london", "london", "PROPN", 5, "pobj"),
            t(",", ",", "PUNCT", 2, "punct"),
            t("please", "please", "INTJ", 2, "intj"),
        ];
        assert_eq!(extract_pair(&toks, &ObjectRelations::default()), ActionObjectPair::none());
    }

    #[test]
    fn copular_attr_needs_attr_relation() {
        let toks = vec![
            t("what", "what", "PRON", 2, "nsubj"),
            t("is", "be", "AUX", 0, "ROOT"),
            t("the", "the", "DET", 4, "det"),
            t("weather", "weather", "NOUN", 2, "attr"),
        ];
        assert_eq!(extract_pair(&toks, &ObjectRelations::default()).to_string(), "be-weather");
        let only_dobj = ObjectRelations::parse("dobj").unwrap();
        assert_eq!(extract_pair(&toks, &only_dobj).to_string(), "be-NONE");
    }

    #[test]
    fn subtyped_relations_and_lowercasing() {
        let toks = vec![t("Play", "Play", "VERB", 0, "root"), t("Jazz", "Jazz", "PROPN", 1, "obj:x")];
        assert_eq!(extract_pair(&toks, &ObjectRelations::default()).to_string(), "play-jazz");
    }

    #[test]
    fn object_without_verb() {
        let toks = vec![t("music", "music", "NOUN", 0, "ROOT"), t("jazz", "jazz", "NOUN", 1, "dobj")];
        let p = extract_pair(&toks, &ObjectRelations::default());
        assert_eq!((p.action, p.object.as_deref()), (None, Some("jazz")));
    }

    #[test]
    fn numeric_literals() {
        for s in ["4", "-3", "2.5", ",5", "1,000"] {
            assert!(is_numeric_literal(s), "{s}");
        }
        for s in ["four", "4th", "", "-", "1.2.3"] {
            assert!(!is_numeric_literal(s), "{s}");
        }
    }

    #[test]
    fn relation_list_parsing() {
        assert!(ObjectRelations::parse(" , ").is_err());
        assert_eq!(ObjectRelations::parse("obj,dobj").unwrap().to_string(), "dobj,obj");
    }
}
