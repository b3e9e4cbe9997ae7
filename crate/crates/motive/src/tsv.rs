//! Tab-separated formats: training data, predictions, training logs and
//! lexicon scores.

use std::fmt::Write;

use motive_core::label::{Label, LABEL_COUNT};
use motive_core::lexicon::CorpusScores;
use motive_core::model::{Prediction, TrainLogEntry};

#[derive(Debug, thiserror::Error)]
pub enum TsvError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("no data rows")]
    Empty,
}

fn line_error(line: usize, message: impl Into<String>) -> TsvError {
    TsvError::Line {
        line,
        message: message.into(),
    }
}

/// One training instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingRow {
    pub text: String,
    pub label: Label,
}

/// Parses `text⇥motive⇥level` rows. Blank lines are skipped; a first line
/// reading `text⇥motive⇥level` is taken as a header.
pub fn parse_training(text: &str) -> Result<Vec<TrainingRow>, TsvError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line == "text\tmotive\tlevel") {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [text, motive, level] = fields[..] else {
            return Err(line_error(i + 1, format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let label = Label::from_parts(motive.trim(), level.trim()).map_err(|e| line_error(i + 1, e.to_string()))?;
        rows.push(TrainingRow {
            text: text.to_string(),
            label,
        });
    }
    if rows.is_empty() {
        return Err(TsvError::Empty);
    }
    Ok(rows)
}

/// Tabs and newlines inside the text are replaced by spaces.
pub fn write_training(rows: &[TrainingRow]) -> String {
    let mut out = String::from("text\tmotive\tlevel\n");
    for r in rows {
        let text: String = r.text.chars().map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c }).collect();
        writeln!(out, "{text}\t{}\t{}", r.label.motive.code(), r.label.level.get()).unwrap();
    }
    out
}

/// Predictions for one corpus plus the header fields identifying how they
/// were produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionFile {
    /// `key=value` pairs of the leading `#` line, e.g. the model id.
    pub provenance: Vec<(String, String)>,
    pub predictions: Vec<Prediction>,
    /// Whether full probability vectors were written.
    pub with_probs: bool,
}

impl PredictionFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.provenance.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Tab-separated, after one provenance line:
///
/// ```text
/// # model=<id> max_len=20 …
/// doc label confidence [p_00 … p_M5]
/// 0 M4 0.91…
/// ```
pub fn write_predictions(file: &PredictionFile) -> String {
    let mut out = String::from("#");
    for (k, v) in &file.provenance {
        write!(out, " {k}={v}").unwrap();
    }
    out.push_str("\ndoc\tlabel\tconfidence");
    if file.with_probs {
        for l in Label::all() {
            write!(out, "\tp_{l}").unwrap();
        }
    }
    out.push('\n');
    for (i, p) in file.predictions.iter().enumerate() {
        write!(out, "{i}\t{}\t{:?}", p.argmax, p.confidence).unwrap();
        if file.with_probs {
            for x in &p.probs {
                write!(out, "\t{x:?}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn parse_prob(line: usize, v: &str) -> Result<f64, TsvError> {
    match v.parse::<f64>() {
        Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
        _ => Err(line_error(line, format!("{v:?} is not a probability"))),
    }
}

/// Without probability columns each prediction puts all its mass on the
/// written label.
pub fn parse_predictions(text: &str) -> Result<PredictionFile, TsvError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or(TsvError::Empty)?;
    let provenance_line = first
        .strip_prefix('#')
        .ok_or_else(|| line_error(1, "missing '#' provenance line"))?;
    let provenance = provenance_line
        .split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| line_error(1, format!("expected key=value, got {kv:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (n, header) = lines.next().ok_or(TsvError::Empty)?;
    let columns: Vec<&str> = header.split('\t').collect();
    let with_probs = match columns.len() {
        3 => false,
        c if c == 3 + LABEL_COUNT => true,
        c => return Err(line_error(n, format!("expected 3 or {} columns, found {c}", 3 + LABEL_COUNT))),
    };
    if columns[..3] != ["doc", "label", "confidence"] {
        return Err(line_error(n, "expected header doc, label, confidence"));
    }
    let mut predictions = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns.len() {
            return Err(line_error(n, format!("expected {} fields, found {}", columns.len(), fields.len())));
        }
        if fields[0].parse::<usize>().ok() != Some(predictions.len()) {
            return Err(line_error(n, format!("expected document index {}", predictions.len())));
        }
        let label: Label = fields[1].parse().map_err(|e: motive_core::label::LabelError| line_error(n, e.to_string()))?;
        let confidence = parse_prob(n, fields[2])?;
        let prediction = if with_probs {
            let probs = fields[3..].iter().map(|v| parse_prob(n, v)).collect::<Result<Vec<_>, _>>()?;
            let p = Prediction::from_probs(probs);
            if p.argmax != label || p.confidence != confidence {
                return Err(line_error(n, "label or confidence disagrees with the probabilities"));
            }
            p
        } else {
            Prediction {
                confidence,
                ..Prediction::one_hot(label)
            }
        };
        predictions.push(prediction);
    }
    Ok(PredictionFile {
        provenance,
        predictions,
        with_probs,
    })
}

pub fn write_train_log(log: &[TrainLogEntry]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
    let mut out = String::from("epoch\tstep\ttrain_loss\tdev_loss\tdev_accuracy\timproved\n");
    for e in log {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.epoch,
            e.step,
            opt(e.train_loss),
            opt(e.dev_loss),
            opt(e.dev_accuracy),
            u8::from(e.improved)
        )
        .unwrap();
    }
    out
}

/// Per-document percentages followed by a `mean` row. Without categories
/// only the header is written.
pub fn write_scores(scores: &CorpusScores) -> String {
    let mut out = String::from("doc");
    for c in &scores.categories {
        write!(out, "\t{c}").unwrap();
    }
    out.push('\n');
    if scores.categories.is_empty() {
        return out;
    }
    for (i, row) in scores.per_document.iter().enumerate() {
        write!(out, "{i}").unwrap();
        for s in row {
            write!(out, "\t{:.4}", s.percentage).unwrap();
        }
        out.push('\n');
    }
    out.push_str("mean");
    for m in &scores.mean_percentage {
        write!(out, "\t{m:.4}").unwrap();
    }
    out.push('\n');
    out
}
