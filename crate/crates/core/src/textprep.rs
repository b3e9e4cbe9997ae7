//! Post normalization, tokenization, stop-word removal and primacy
//! truncation.
//!
//! [`normalize`] applies, in order: lowercasing, removal of numeric and
//! emoji codepoints, German umlaut folding (`ä→ae`, `ö→oe`, `ü→ue`,
//! `ß→ss`, including decomposed `a/o/u + U+0308`), removal of URLs,
//! hashtags and @mentions, and whitespace collapsing. The order makes the
//! function idempotent: no later step can create input for an earlier one.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Default token cap for the classifier input.
pub const DEFAULT_MAX_LEN: usize = 20;

/// Codepoint ranges treated as emoji or pictographs (inclusive).
///
/// Covers the emoticon, pictograph, transport, supplemental symbol, flag
/// and chess blocks in U+1F000..U+1FAFF, the misc symbols and dingbats
/// blocks, emoji-capable arrows and technical symbols, variation selectors,
/// the zero-width joiner, the combining keycap and tag characters.
pub const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x00A9, 0x00A9),
    (0x00AE, 0x00AE),
    (0x200D, 0x200D),
    (0x203C, 0x203C),
    (0x2049, 0x2049),
    (0x20E3, 0x20E3),
    (0x2122, 0x2122),
    (0x2139, 0x2139),
    (0x2190, 0x21FF),
    (0x2300, 0x23FF),
    (0x24C2, 0x24C2),
    (0x25A0, 0x25FF),
    (0x2600, 0x27BF),
    (0x2900, 0x297F),
    (0x2B00, 0x2BFF),
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3297),
    (0x3299, 0x3299),
    (0xFE00, 0xFE0F),
    (0x1F000, 0x1FAFF),
    (0xE0020, 0xE007F),
];

pub fn is_emoji(c: char) -> bool {
    let cp = u32::from(c);
    EMOJI_RANGES
        .iter()
        .any(|&(lo, hi)| (lo..=hi).contains(&cp))
}

const COMBINING_DIAERESIS: char = '\u{0308}';

fn fold_umlauts(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 8);
    for c in text.chars() {
        match c {
            'ä' => out.push_str("ae"),
            'ö' => out.push_str("oe"),
            'ü' => out.push_str("ue"),
            'ß' => out.push_str("ss"),
            COMBINING_DIAERESIS if matches!(out.chars().last(), Some('a' | 'o' | 'u')) => {
                out.push('e')
            }
            _ => out.push(c),
        }
    }
    out
}

/// Byte offset where a word stops being text: the first `#`, `@`,
/// `http://` or `https://`, or 0 for words whose text starts with `www.`
/// (leading punctuation ignored, so `(www.x.de` goes too).
fn structural_cut(word: &str) -> usize {
    if word.trim_start_matches(|c: char| !c.is_alphanumeric()).starts_with("www.") {
        return 0;
    }
    let mut cut = word.len();
    if let Some(i) = word.find(['#', '@']) {
        cut = cut.min(i);
    }
    for scheme in ["http://", "https://"] {
        if let Some(i) = word.find(scheme) {
            cut = cut.min(i);
        }
    }
    cut
}

/// Lowercases and cleans a raw post. Total and idempotent.
pub fn normalize(text: &str) -> String {
    let lowered = text.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .filter(|&c| !c.is_numeric() && !is_emoji(c))
        .collect();
    let folded = fold_umlauts(&cleaned);
    let mut out = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        let kept = &word[..structural_cut(word)];
        if kept.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(kept);
    }
    out
}

/// Splits normalized text on whitespace, trims non-alphanumeric characters
/// from both ends of every token and drops tokens left empty.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(ToString::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StopWordError {
    #[error("stop-word list is empty")]
    Empty,
}

/// Set of lowercase, umlaut-folded stop words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWordList {
    entries: BTreeSet<String>,
}

const GERMAN_STOP_WORDS: &str = include_str!("../data/stopwords_de.txt");

impl StopWordList {
    /// Builds a list, normalizing every entry. Entries that normalize to
    /// nothing are dropped.
    pub fn new<I, S>(words: I) -> Result<Self, StopWordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: BTreeSet<String> = words
            .into_iter()
            .flat_map(|w| tokenize(&normalize(w.as_ref())))
            .collect();
        if entries.is_empty() {
            return Err(StopWordError::Empty);
        }
        Ok(StopWordList { entries })
    }

    /// Parses the one-word-per-line format; blank lines and lines starting
    /// with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, StopWordError> {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    /// The bundled German list.
    pub fn german() -> Self {
        Self::parse(GERMAN_STOP_WORDS).expect("bundled stop-word list is non-empty")
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains(token)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

/// Order-preserving removal of exact stop-word matches.
pub fn remove_stopwords(tokens: &[String], stop: &StopWordList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stop.contains(t))
        .cloned()
        .collect()
}

/// Classifier input: at most `max_len` tokens, always a prefix of the
/// stop-word-filtered stream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    /// Token count before truncation.
    pub original_length: usize,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Keeps the first `max_len` tokens. The first identifiable motive decides
/// an instance, so a prefix is kept and never a suffix.
pub fn truncate_primacy(mut tokens: Vec<String>, max_len: usize) -> TokenSequence {
    assert!(max_len >= 1, "max_len must be at least 1");
    let original_length = tokens.len();
    tokens.truncate(max_len);
    TokenSequence {
        tokens,
        original_length,
    }
}

/// The full preparation chain with its settings.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub stop_words: StopWordList,
    pub max_len: usize,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            stop_words: StopWordList::german(),
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

impl Preprocessor {
    pub fn new(stop_words: StopWordList, max_len: usize) -> Self {
        assert!(max_len >= 1, "max_len must be at least 1");
        Preprocessor {
            stop_words,
            max_len,
        }
    }

    /// Normalized tokens with stop words kept and no cap; the stream used
    /// for lexicon scoring and linguistic statistics.
    pub fn full_tokens(&self, text: &str) -> Vec<String> {
        tokenize(&normalize(text))
    }

    /// Tokens that count as content words (non-stop-words).
    pub fn content_words(&self, text: &str) -> Vec<String> {
        remove_stopwords(&self.full_tokens(text), &self.stop_words)
    }

    /// Classifier input for one post.
    pub fn prepare(&self, text: &str) -> TokenSequence {
        truncate_primacy(self.content_words(text), self.max_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Straße 123"), "strasse");
        assert_eq!(normalize(""), "");
        assert_eq!(
            normalize("Ärger über @user 😀 #wut https://t.co/x"),
            "aerger ueber"
        );
    }

    #[test]
    fn normalize_decomposed_umlaut() {
        assert_eq!(normalize("Mu\u{0308}ller"), "mueller");
        // digit between base and mark is removed before folding
        assert_eq!(normalize("a1\u{0308}"), "ae");
    }

    #[test]
    fn normalize_structural_tokens() {
        assert_eq!(normalize("siehe www.example.de jetzt"), "siehe jetzt");
        assert_eq!(normalize("(www.example.de) ok"), "ok");
        assert_eq!(normalize("(https://x.y/z) ok"), "( ok");
        assert_eq!(normalize("mail an foo@bar.de"), "mail an foo");
        assert_eq!(normalize("   viel    raum  "), "viel raum");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("hallo , welt !"), toks(&["hallo", "welt"]));
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize(&normalize("covid-19er regel")),
            toks(&["covid-er", "regel"])
        );
        assert_eq!(tokenize("\"zitat\" ...ende..."), toks(&["zitat", "ende"]));
    }

    #[test]
    fn stopword_examples() {
        let stop = StopWordList::new(["und"]).unwrap();
        assert_eq!(remove_stopwords(&toks(&["und", "katze"]), &stop), toks(&["katze"]));
        assert!(remove_stopwords(&[], &stop).is_empty());
        assert!(remove_stopwords(&toks(&["und", "und"]), &stop).is_empty());
    }

    #[test]
    fn stopword_list_is_folded() {
        let german = StopWordList::german();
        assert!(german.len() > 200);
        assert!(german.contains("ueber"));
        assert!(german.contains("fuer"));
        assert!(!german.contains("über"));
        assert!(german.iter().all(|w| w == normalize(w)));
        assert_eq!(StopWordList::parse("# only comments\n\n"), Err(StopWordError::Empty));
    }

    #[test]
    fn truncation_examples() {
        let long: Vec<String> = (0..25).map(|i| alloc::format!("w{i}")).collect();
        let seq = truncate_primacy(long.clone(), 20);
        assert_eq!(seq.tokens, long[..20]);
        assert_eq!(seq.original_length, 25);

        let short = toks(&["a", "b", "c", "d", "e"]);
        let seq = truncate_primacy(short.clone(), 20);
        assert_eq!(seq.tokens, short);
        assert_eq!(seq.original_length, 5);

        assert_eq!(truncate_primacy(short, 1).tokens, vec!["a".to_string()]);
    }

    #[test]
    fn prepare_drops_stop_words_before_cap() {
        let prep = Preprocessor::new(StopWordList::new(["und"]).unwrap(), 2);
        let seq = prep.prepare("und und katze und hund maus");
        assert_eq!(seq.tokens, toks(&["katze", "hund"]));
        assert_eq!(seq.original_length, 3);
    }
}
