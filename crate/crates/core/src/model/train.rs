//! Mini-batch training with dev-loss early stopping.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::metrics::{accuracy, macro_f1};
use super::network::{batch_gradient, predict_embedded};
use super::optim::{Adam, Optimizer, OptimizerKind, Sgd};
use super::params::{Hyperparams, ModelParams};
use super::{forward, ModelError, Prediction};
use crate::embeddings::EmbeddingTable;
use crate::label::Label;
use crate::rng::SeededRng;
use crate::textprep::TokenSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSequence {
    pub tokens: TokenSequence,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub dropout: f64,
    /// Zero turns every update into a no-op.
    pub learning_rate: f64,
    pub seed: u64,
    /// Dev evaluations without improvement before stopping.
    pub patience: usize,
    pub dev_fraction: f64,
    /// Extra dev evaluation every this many optimizer steps.
    pub eval_every: Option<usize>,
    pub optimizer: OptimizerKind,
    pub hidden: usize,
    pub layers: usize,
    /// Defaults to `2 * hidden`.
    pub attention_dim: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            max_epochs: 3,
            dropout: 0.3,
            learning_rate: 1e-3,
            seed: 0,
            patience: 2,
            dev_fraction: 0.1,
            eval_every: Some(200),
            optimizer: OptimizerKind::Adam,
            hidden: 128,
            layers: 3,
            attention_dim: None,
        }
    }
}

impl TrainConfig {
    pub fn hyperparams(&self, input_dim: usize) -> Hyperparams {
        Hyperparams {
            input_dim,
            hidden: self.hidden,
            layers: self.layers,
            attention_dim: self.attention_dim.unwrap_or(2 * self.hidden),
            dropout: self.dropout,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::Config(msg.into()));
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must be in [0, 1)");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.dev_fraction) {
            return bad("dev_fraction must be in [0, 1)");
        }
        if self.eval_every == Some(0) {
            return bad("eval_every must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainLogEntry {
    /// 0 for the evaluation before the first update.
    pub epoch: usize,
    /// Optimizer steps taken so far.
    pub step: usize,
    /// Mean batch loss since the previous entry (dropout active).
    pub train_loss: Option<f64>,
    pub dev_loss: Option<f64>,
    pub dev_accuracy: Option<f64>,
    pub improved: bool,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters with the lowest dev loss seen (the final ones without a
    /// dev split).
    pub params: ModelParams,
    pub log: Vec<TrainLogEntry>,
    pub best_dev_loss: Option<f64>,
    pub stopped_early: bool,
    pub steps: usize,
    /// Instances dropped because preparation left no tokens.
    pub skipped_empty: usize,
    /// Only one label present in the training data.
    pub single_class: bool,
    pub train_size: usize,
    pub dev_size: usize,
}

struct Embedded {
    matrix: super::tensor::Matrix,
    label: Label,
}

fn dev_metrics(dev: &[Embedded], params: &ModelParams) -> Result<(f64, f64), ModelError> {
    let mut loss = 0.0;
    let mut gold = Vec::with_capacity(dev.len());
    let mut pred = Vec::with_capacity(dev.len());
    for e in dev {
        let p = predict_embedded(&e.matrix, params)?;
        loss -= libm::log(p.probs[e.label.index()]);
        gold.push(e.label);
        pred.push(p.argmax);
    }
    Ok((loss / dev.len() as f64, accuracy(&gold, &pred)?))
}

/// Trains a fresh model. Everything random (init, split, batch order,
/// dropout) derives from `config.seed`, so equal inputs give equal outputs.
pub fn train(
    dataset: &[LabeledSequence],
    config: &TrainConfig,
    table: &EmbeddingTable,
) -> Result<TrainOutcome, ModelError> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut rng = SeededRng::new(config.seed);
    let hyper = config.hyperparams(table.dim());
    let mut params = ModelParams::init(hyper, &mut rng)?;

    let mut items = Vec::with_capacity(dataset.len());
    let mut skipped_empty = 0;
    for inst in dataset {
        match table.embed_sequence(&inst.tokens) {
            Ok(matrix) => items.push(Embedded {
                matrix,
                label: inst.label,
            }),
            Err(_) => skipped_empty += 1,
        }
    }
    if items.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let single_class = items.iter().map(|e| e.label).collect::<BTreeSet<_>>().len() < 2;

    let mut order: Vec<usize> = (0..items.len()).collect();
    rng.shuffle(&mut order);
    let n = items.len();
    let n_dev = if config.dev_fraction > 0.0 && n >= 2 {
        (libm::round(config.dev_fraction * n as f64) as usize).clamp(1, n - 1)
    } else {
        0
    };
    let mut slots: Vec<Option<Embedded>> = items.into_iter().map(Some).collect();
    let dev: Vec<Embedded> = order[..n_dev].iter().map(|&i| slots[i].take().unwrap()).collect();
    let train_set: Vec<Embedded> = order[n_dev..].iter().map(|&i| slots[i].take().unwrap()).collect();

    let mut optimizer: alloc::boxed::Box<dyn Optimizer> = match config.optimizer {
        OptimizerKind::Adam => alloc::boxed::Box::new(Adam::new(config.learning_rate, params.param_count())),
        OptimizerKind::Sgd => alloc::boxed::Box::new(Sgd {
            learning_rate: config.learning_rate,
        }),
    };

    let mut log = Vec::new();
    let mut best: Option<(f64, ModelParams)> = None;
    if !dev.is_empty() {
        let (dl, da) = dev_metrics(&dev, &params)?;
        log.push(TrainLogEntry {
            epoch: 0,
            step: 0,
            train_loss: None,
            dev_loss: Some(dl),
            dev_accuracy: Some(da),
            improved: true,
        });
        best = Some((dl, params.clone()));
    }

    let mut steps = 0;
    let mut stale = 0;
    let mut stopped_early = false;
    let mut running = (0.0, 0usize);
    let mut train_idx: Vec<usize> = (0..train_set.len()).collect();

    'epochs: for epoch in 1..=config.max_epochs {
        rng.shuffle(&mut train_idx);
        let batches: Vec<&[usize]> = train_idx.chunks(config.batch_size).collect();
        let n_batches = batches.len();
        for (b, chunk) in batches.into_iter().enumerate() {
            let batch: Vec<(&super::tensor::Matrix, Label)> = chunk
                .iter()
                .map(|&i| (&train_set[i].matrix, train_set[i].label))
                .collect();
            let (batch_loss, grads) = batch_gradient(&batch, &params, Some(&mut rng))?;
            optimizer.step(&mut params, &grads);
            steps += 1;
            running.0 += batch_loss;
            running.1 += 1;

            let epoch_end = b + 1 == n_batches;
            let mid_check = config.eval_every.is_some_and(|k| steps % k == 0);
            if !(epoch_end || mid_check) {
                continue;
            }
            let train_loss = (running.1 > 0).then(|| running.0 / running.1 as f64);
            running = (0.0, 0);
            let Some((best_loss, _)) = &best else {
                log.push(TrainLogEntry {
                    epoch,
                    step: steps,
                    train_loss,
                    dev_loss: None,
                    dev_accuracy: None,
                    improved: false,
                });
                continue;
            };
            let (dl, da) = dev_metrics(&dev, &params)?;
            let improved = dl < *best_loss;
            log.push(TrainLogEntry {
                epoch,
                step: steps,
                train_loss,
                dev_loss: Some(dl),
                dev_accuracy: Some(da),
                improved,
            });
            if improved {
                best = Some((dl, params.clone()));
                stale = 0;
            } else {
                stale += 1;
                if stale >= config.patience.max(1) {
                    stopped_early = true;
                    break 'epochs;
                }
            }
        }
    }

    let (best_dev_loss, params) = match best {
        Some((l, p)) => (Some(l), p),
        None => (None, params),
    };
    if params.validate().is_err() {
        return Err(ModelError::NonFinite(format!("training diverged after {steps} steps")));
    }
    Ok(TrainOutcome {
        params,
        log,
        best_dev_loss,
        stopped_early,
        steps,
        skipped_empty,
        single_class,
        train_size: train_set.len(),
        dev_size: dev.len(),
    })
}

/// Loss, accuracy and macro-F1 of a model on labeled data.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub predictions: Vec<Prediction>,
}

pub fn evaluate(
    params: &ModelParams,
    table: &EmbeddingTable,
    data: &[LabeledSequence],
) -> Result<Evaluation, ModelError> {
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let predictions = data
        .iter()
        .map(|d| forward(&d.tokens, table, params))
        .collect::<Result<Vec<_>, _>>()?;
    let gold: Vec<Label> = data.iter().map(|d| d.label).collect();
    let pred: Vec<Label> = predictions.iter().map(|p| p.argmax).collect();
    Ok(Evaluation {
        loss: super::loss(&predictions, &gold)?,
        accuracy: accuracy(&gold, &pred)?,
        macro_f1: macro_f1(&gold, &pred)?,
        predictions,
    })
}

pub fn evaluate_macro_f1(
    params: &ModelParams,
    table: &EmbeddingTable,
    data: &[LabeledSequence],
) -> Result<f64, ModelError> {
    Ok(evaluate(params, table, data)?.macro_f1)
}
