//! LIWC-style dictionary scoring.
//!
//! A [`Lexicon`] maps category names to word patterns. A pattern is either a
//! literal word or a prefix ending in `*`. Scores are the percentage of
//! tokens in a document that match at least one pattern of a category.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::textprep::normalize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("empty pattern")]
    Empty,
    #[error("pattern {0:?}: '*' is only allowed as the final character")]
    MisplacedWildcard(String),
    #[error("pattern {0:?} contains whitespace")]
    Whitespace(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Literal(String),
    Prefix(String),
}

impl Pattern {
    /// Parses `word` or `stem*`. The text is lowercased and umlaut-folded
    /// the same way as tokens are.
    pub fn parse(raw: &str) -> Result<Self, PatternError> {
        let raw = raw.trim();
        if raw.chars().any(char::is_whitespace) {
            return Err(PatternError::Whitespace(raw.into()));
        }
        let (body, prefix) = match raw.strip_suffix('*') {
            Some(body) => (body, true),
            None => (raw, false),
        };
        if body.contains('*') {
            return Err(PatternError::MisplacedWildcard(raw.into()));
        }
        let body = normalize(body);
        if body.is_empty() {
            return Err(PatternError::Empty);
        }
        Ok(if prefix {
            Pattern::Prefix(body)
        } else {
            Pattern::Literal(body)
        })
    }

    pub fn text(&self) -> &str {
        match self {
            Pattern::Literal(s) | Pattern::Prefix(s) => s,
        }
    }
}

impl core::fmt::Display for Pattern {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Pattern::Literal(s) => f.write_str(s),
            Pattern::Prefix(s) => write!(f, "{s}*"),
        }
    }
}

/// Literal patterns match by equality, prefix patterns by `starts_with`.
pub fn match_token(token: &str, pattern: &Pattern) -> bool {
    match pattern {
        Pattern::Literal(p) => token == p,
        Pattern::Prefix(p) => token.starts_with(p.as_str()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub patterns: Vec<Pattern>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("duplicate category {0:?}")]
    DuplicateCategory(String),
}

#[derive(Debug, Default)]
struct TrieNode {
    children: BTreeMap<char, usize>,
    /// Categories with a literal pattern ending here.
    literal: Vec<usize>,
    /// Categories with a prefix pattern ending here.
    prefix: Vec<usize>,
}

/// Categories plus a character trie compiled from all patterns.
#[derive(Debug)]
pub struct Lexicon {
    categories: Vec<Category>,
    nodes: Vec<TrieNode>,
}

impl Clone for Lexicon {
    fn clone(&self) -> Self {
        Lexicon::new(self.categories.clone()).expect("categories were validated")
    }
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.categories == other.categories
    }
}

impl Lexicon {
    pub fn new(categories: Vec<Category>) -> Result<Self, LexiconError> {
        let mut seen = BTreeSet::new();
        for c in &categories {
            if !seen.insert(c.name.as_str()) {
                return Err(LexiconError::DuplicateCategory(c.name.clone()));
            }
        }
        let mut nodes = vec![TrieNode::default()];
        for (ci, cat) in categories.iter().enumerate() {
            for pattern in &cat.patterns {
                let mut node = 0;
                for ch in pattern.text().chars() {
                    node = match nodes[node].children.get(&ch) {
                        Some(&next) => next,
                        None => {
                            nodes.push(TrieNode::default());
                            let next = nodes.len() - 1;
                            nodes[node].children.insert(ch, next);
                            next
                        }
                    };
                }
                let slot = match pattern {
                    Pattern::Literal(_) => &mut nodes[node].literal,
                    Pattern::Prefix(_) => &mut nodes[node].prefix,
                };
                if !slot.contains(&ci) {
                    slot.push(ci);
                }
            }
        }
        Ok(Lexicon { categories, nodes })
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_names(&self) -> impl Iterator<Item = &str> {
        self.categories.iter().map(|c| c.name.as_str())
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.name == name)
    }

    /// Marks in `hits` every category the token belongs to.
    pub fn matches_into(&self, token: &str, hits: &mut [bool]) {
        debug_assert_eq!(hits.len(), self.categories.len());
        let mut node = 0;
        for ch in token.chars() {
            match self.nodes[node].children.get(&ch) {
                Some(&next) => node = next,
                None => return,
            }
            for &c in &self.nodes[node].prefix {
                hits[c] = true;
            }
        }
        for &c in &self.nodes[node].literal {
            hits[c] = true;
        }
    }

    /// Indices of the categories the token belongs to, ascending.
    pub fn matching_categories(&self, token: &str) -> Vec<usize> {
        let mut hits = vec![false; self.categories.len()];
        self.matches_into(token, &mut hits);
        hits.iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScore {
    pub category: String,
    pub matched: usize,
    pub total_tokens: usize,
    /// `100 * matched / total_tokens`, or 0 for an empty document.
    pub percentage: f64,
}

fn percentage(matched: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * matched as f64 / total as f64
    }
}

/// Per-category scores for one document's full token stream. A token counts
/// at most once per category.
pub fn score_document<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Vec<CategoryScore> {
    let n = lexicon.categories.len();
    let mut counts = vec![0usize; n];
    let mut hits = vec![false; n];
    for tok in tokens {
        hits.iter_mut().for_each(|h| *h = false);
        lexicon.matches_into(tok.as_ref(), &mut hits);
        for (c, &h) in counts.iter_mut().zip(&hits) {
            *c += usize::from(h);
        }
    }
    lexicon
        .categories
        .iter()
        .zip(counts)
        .map(|(cat, matched)| CategoryScore {
            category: cat.name.clone(),
            matched,
            total_tokens: tokens.len(),
            percentage: percentage(matched, tokens.len()),
        })
        .collect()
}

/// Scores of a whole corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScores {
    pub categories: Vec<String>,
    /// `per_document[d][c]` is the score of document `d` in category `c`.
    pub per_document: Vec<Vec<CategoryScore>>,
    /// Arithmetic mean of per-document percentages, per category.
    pub mean_percentage: Vec<f64>,
}

impl CorpusScores {
    /// Per-document percentages of one category.
    pub fn column(&self, category: usize) -> Vec<f64> {
        self.per_document
            .iter()
            .map(|row| row[category].percentage)
            .collect()
    }

    pub fn mean_of(&self, name: &str) -> Option<f64> {
        let i = self.categories.iter().position(|c| c == name)?;
        Some(self.mean_percentage[i])
    }
}

pub fn score_corpus<S: AsRef<str>>(documents: &[Vec<S>], lexicon: &Lexicon) -> CorpusScores {
    let per_document: Vec<Vec<CategoryScore>> = documents
        .iter()
        .map(|d| score_document(d, lexicon))
        .collect();
    let n = documents.len();
    let mean_percentage = (0..lexicon.categories.len())
        .map(|c| {
            if n == 0 {
                0.0
            } else {
                per_document.iter().map(|r| r[c].percentage).sum::<f64>() / n as f64
            }
        })
        .collect();
    CorpusScores {
        categories: lexicon.category_names().map(ToString::to_string).collect(),
        per_document,
        mean_percentage,
    }
}

/// Default German negation words.
pub const GERMAN_NEGATIONS: &[&str] = &[
    "nicht", "kein", "keine", "keinen", "keinem", "keiner", "keins", "nichts", "nie", "niemals",
    "niemand",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationList {
    words: BTreeSet<String>,
}

impl Default for NegationList {
    fn default() -> Self {
        NegationList::new(GERMAN_NEGATIONS.iter().copied())
    }
}

impl NegationList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        NegationList {
            words: words.into_iter().map(|w| normalize(w.as_ref())).collect(),
        }
    }

    pub fn count<S: AsRef<str>>(&self, tokens: &[S]) -> usize {
        tokens
            .iter()
            .filter(|t| self.words.contains(t.as_ref()))
            .count()
    }
}

/// Number of tokens in the default negation list.
pub fn negation_count<S: AsRef<str>>(tokens: &[S]) -> usize {
    NegationList::default().count(tokens)
}
