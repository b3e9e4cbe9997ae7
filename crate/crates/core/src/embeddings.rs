//! Frozen pretrained word vectors.
//!
//! Unknown tokens map to the mean of all vocabulary vectors; there is no
//! subword reconstruction.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::tensor::Matrix;
use crate::textprep::TokenSequence;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("embedding dimension must be at least 1")]
    ZeroDim,
    #[error("vector for {word:?} has {got} components, expected {expected}")]
    Arity {
        word: String,
        got: usize,
        expected: usize,
    },
    #[error("embedding table has no vectors")]
    EmptyVocab,
    #[error("cannot embed an empty token sequence")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vocab: BTreeMap<String, Vec<f64>>,
    /// Insertion order of `vocab`, for stable serialization.
    order: Vec<String>,
    unk: Vec<f64>,
}

impl EmbeddingTable {
    /// Builds a table from `(word, vector)` pairs. Later duplicates of a
    /// word are ignored.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDim);
        }
        let mut vocab = BTreeMap::new();
        let mut order = Vec::new();
        for (word, vector) in entries {
            if vector.len() != dim {
                return Err(EmbeddingError::Arity {
                    word,
                    got: vector.len(),
                    expected: dim,
                });
            }
            if let Entry::Vacant(e) = vocab.entry(word) {
                order.push(e.key().clone());
                e.insert(vector);
            }
        }
        if vocab.is_empty() {
            return Err(EmbeddingError::EmptyVocab);
        }
        let mut unk = vec![0.0; dim];
        for v in vocab.values() {
            for (u, x) in unk.iter_mut().zip(v) {
                *u += x;
            }
        }
        let n = vocab.len() as f64;
        unk.iter_mut().for_each(|u| *u /= n);
        Ok(EmbeddingTable {
            dim,
            vocab,
            order,
            unk,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn unk_vector(&self) -> &[f64] {
        &self.unk
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vocab.contains_key(token)
    }

    /// Stored vector, or the mean vector for unknown tokens.
    pub fn lookup(&self, token: &str) -> &[f64] {
        self.vocab.get(token).map_or(&self.unk, Vec::as_slice)
    }

    /// Entries in their original order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.order
            .iter()
            .map(|w| (w.as_str(), self.vocab[w].as_slice()))
    }

    /// `T × dim` matrix whose row `t` is the vector of token `t`.
    pub fn embed_sequence(&self, seq: &TokenSequence) -> Result<Matrix, EmbeddingError> {
        if seq.is_empty() {
            return Err(EmbeddingError::EmptyInput);
        }
        let mut m = Matrix::zeros(seq.len(), self.dim);
        for (t, tok) in seq.tokens.iter().enumerate() {
            m.row_mut(t).copy_from_slice(self.lookup(tok));
        }
        Ok(m)
    }
}
