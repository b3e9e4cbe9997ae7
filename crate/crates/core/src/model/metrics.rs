use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::ModelError;
use crate::label::{Label, LABEL_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabelCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl LabelCounts {
    pub fn gold(&self) -> usize {
        self.true_pos + self.false_neg
    }

    pub fn predicted(&self) -> usize {
        self.true_pos + self.false_pos
    }

    /// `None` when the label occurs neither in gold nor in predictions.
    pub fn f1(&self) -> Option<f64> {
        if self.gold() == 0 && self.predicted() == 0 {
            return None;
        }
        if self.true_pos == 0 {
            return Some(0.0);
        }
        let p = self.true_pos as f64 / self.predicted() as f64;
        let r = self.true_pos as f64 / self.gold() as f64;
        Some(2.0 * p * r / (p + r))
    }
}

fn check(gold: &[Label], predicted: &[Label]) -> Result<(), ModelError> {
    if gold.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if gold.len() != predicted.len() {
        return Err(ModelError::Shape(format!(
            "{} gold labels, {} predictions",
            gold.len(),
            predicted.len()
        )));
    }
    Ok(())
}

pub fn per_label_counts(gold: &[Label], predicted: &[Label]) -> Result<Vec<LabelCounts>, ModelError> {
    check(gold, predicted)?;
    let mut counts = vec![LabelCounts::default(); LABEL_COUNT];
    for (g, p) in gold.iter().zip(predicted) {
        if g == p {
            counts[g.index()].true_pos += 1;
        } else {
            counts[g.index()].false_neg += 1;
            counts[p.index()].false_pos += 1;
        }
    }
    Ok(counts)
}

/// Unweighted mean of per-label F1. Labels absent from both gold and
/// predictions are left out; a label present on only one side scores 0.
pub fn macro_f1(gold: &[Label], predicted: &[Label]) -> Result<f64, ModelError> {
    let counts = per_label_counts(gold, predicted)?;
    let scores: Vec<f64> = counts.iter().filter_map(LabelCounts::f1).collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

pub fn accuracy(gold: &[Label], predicted: &[Label]) -> Result<f64, ModelError> {
    check(gold, predicted)?;
    let hits = gold.iter().zip(predicted).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / gold.len() as f64)
}
