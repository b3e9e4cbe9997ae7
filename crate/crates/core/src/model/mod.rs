//! Stacked bidirectional LSTM with additive attention over the 30-label
//! motive space, with hand-written backpropagation and optimizers.
//!
//! Architecture, per instance:
//!
//! ```text
//! tokens ─ frozen embeddings ─ Bi-LSTM ×L (dropout between layers)
//!        ─ attention over final states ─ dropout ─ linear 30 ─ softmax
//! ```

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::embeddings::EmbeddingTable;
use crate::label::{Label, LABEL_COUNT};
use crate::textprep::TokenSequence;

pub mod metrics;
pub mod network;
pub mod optim;
pub mod params;
pub mod tensor;
pub mod train;

pub use metrics::{accuracy, macro_f1};
pub use network::{attention, backward, batch_gradient, bilstm_forward, forward_cached, lstm_cell, predict_embedded};
pub use optim::{Adam, Optimizer, OptimizerKind, Sgd};
pub use params::{BiLayer, Hyperparams, LstmWeights, ModelParams};
pub use tensor::Matrix;
pub use train::{evaluate, evaluate_macro_f1, train, Evaluation, LabeledSequence, TrainConfig, TrainLogEntry, TrainOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite value in tensor {0}")]
    NonFinite(String),
    #[error("empty input sequence")]
    EmptyInput,
    #[error("empty batch")]
    EmptyBatch,
    #[error("empty dataset")]
    EmptyDataset,
}

/// Probability vector over all labels with its argmax.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probs: Vec<f64>,
    pub argmax: Label,
    /// `probs[argmax]`
    pub confidence: f64,
}

impl Prediction {
    /// Ties go to the lowest flat label index.
    pub fn from_probs(probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), LABEL_COUNT, "prediction needs {LABEL_COUNT} probabilities");
        let mut best = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = i;
            }
        }
        Prediction {
            confidence: probs[best],
            argmax: Label::from_index(best).expect("index below LABEL_COUNT"),
            probs,
        }
    }

    /// All mass on one label.
    pub fn one_hot(label: Label) -> Self {
        let mut probs = vec![0.0; LABEL_COUNT];
        probs[label.index()] = 1.0;
        Prediction::from_probs(probs)
    }

    /// Output for a post with no tokens left after preparation: zero motive
    /// with full confidence.
    pub fn fallback() -> Self {
        Prediction::one_hot(Label::ZERO)
    }

    /// Probability mass of all labels satisfying `pred`.
    pub fn mass(&self, mut pred: impl FnMut(Label) -> bool) -> f64 {
        Label::all()
            .filter(|&l| pred(l))
            .map(|l| self.probs[l.index()])
            .sum()
    }
}

/// Classifies one prepared sequence. Empty sequences get
/// [`Prediction::fallback`].
pub fn forward(seq: &TokenSequence, table: &EmbeddingTable, params: &ModelParams) -> Result<Prediction, ModelError> {
    if seq.is_empty() {
        return Ok(Prediction::fallback());
    }
    let emb = table
        .embed_sequence(seq)
        .map_err(|_| ModelError::EmptyInput)?;
    predict_embedded(&emb, params)
}

/// Mean negative log-likelihood of the gold labels.
pub fn loss(predictions: &[Prediction], gold: &[Label]) -> Result<f64, ModelError> {
    if predictions.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    if predictions.len() != gold.len() {
        return Err(ModelError::Shape(alloc::format!(
            "{} predictions for {} labels",
            predictions.len(),
            gold.len()
        )));
    }
    let total: f64 = predictions
        .iter()
        .zip(gold)
        .map(|(p, g)| -libm::log(p.probs[g.index()]))
        .sum();
    Ok(total / predictions.len() as f64)
}
