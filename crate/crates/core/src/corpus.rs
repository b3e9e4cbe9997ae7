//! In-memory post corpora: content-word filtering and seeded sampling.

use alloc::string::String;
use alloc::vec::Vec;

use crate::rng::SeededRng;
use crate::textprep::Preprocessor;

/// Posts with fewer content words are dropped by default.
pub const DEFAULT_MIN_CONTENT_WORDS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
    /// ISO-8601 creation time, if the record had one.
    pub timestamp: Option<String>,
    /// 1-based line number in the source file.
    pub source_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
    /// Free-form tag such as "2019".
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("cannot draw {requested} documents from a corpus of {available}")]
    TooLarge { requested: usize, available: usize },
}

impl Corpus {
    pub fn new(label: impl Into<String>, documents: Vec<Document>) -> Self {
        Corpus {
            documents,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.text.as_str())
    }
}

/// Drops documents with fewer than `min_content_words` non-stop-word
/// tokens after normalization. Order is preserved.
pub fn filter_documents(corpus: Corpus, min_content_words: usize, prep: &Preprocessor) -> Corpus {
    if min_content_words == 0 {
        return corpus;
    }
    let documents = corpus
        .documents
        .into_iter()
        .filter(|d| prep.content_words(&d.text).len() >= min_content_words)
        .collect();
    Corpus {
        documents,
        label: corpus.label,
    }
}

/// Shuffles a copy of the corpus with [`SeededRng::shuffle`] and keeps the
/// first `n` documents.
pub fn sample(corpus: &Corpus, n: usize, seed: u64) -> Result<Corpus, SampleError> {
    if n > corpus.len() {
        return Err(SampleError::TooLarge {
            requested: n,
            available: corpus.len(),
        });
    }
    let mut documents = corpus.documents.clone();
    SeededRng::new(seed).shuffle(&mut documents);
    documents.truncate(n);
    Ok(Corpus {
        documents,
        label: corpus.label.clone(),
    })
}
