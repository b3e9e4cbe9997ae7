//! Line-delimited JSON post corpora.

use std::path::Path;

use motive_core::corpus::{Corpus, Document};
use serde_json::{Map, Value};

use crate::PathIoError;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error(transparent)]
    Io(#[from] PathIoError),
    #[error("no well-formed records ({malformed} malformed, {other_language} not German)")]
    EmptyCorpus { malformed: usize, other_language: usize },
}

/// Counts from one parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseReport {
    pub accepted: usize,
    /// Lines that are not a JSON object with a non-empty string `text`.
    pub malformed: usize,
    /// Records whose `lang` field is present and not `"de"`.
    pub other_language: usize,
}

/// Parses corpus text. Records carrying a `lang` other than `"de"` are
/// dropped; records without `lang` pass.
pub fn parse_jsonl_str(text: &str, label: &str) -> Result<(Corpus, ParseReport), JsonlError> {
    let mut report = ParseReport::default();
    let mut documents = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Ok(Value::Object(record)) = serde_json::from_str::<Value>(line) else {
            report.malformed += 1;
            continue;
        };
        let Some(Value::String(body)) = record.get("text") else {
            report.malformed += 1;
            continue;
        };
        if body.trim().is_empty() {
            report.malformed += 1;
            continue;
        }
        if let Some(lang) = record.get("lang") {
            if lang.as_str() != Some("de") {
                report.other_language += 1;
                continue;
            }
        }
        let timestamp = record.get("created_at").and_then(Value::as_str).map(str::to_string);
        documents.push(Document {
            text: body.clone(),
            timestamp,
            source_line: i + 1,
        });
    }
    if documents.is_empty() {
        return Err(JsonlError::EmptyCorpus {
            malformed: report.malformed,
            other_language: report.other_language,
        });
    }
    report.accepted = documents.len();
    Ok((Corpus::new(label, documents), report))
}

pub fn parse_jsonl(path: &Path, label: &str) -> Result<(Corpus, ParseReport), JsonlError> {
    parse_jsonl_str(&crate::read_to_string(path)?, label)
}

/// One record per document with `text` and, when known, `created_at`.
pub fn write_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for d in &corpus.documents {
        let mut record = Map::new();
        record.insert("text".into(), Value::String(d.text.clone()));
        if let Some(ts) = &d.timestamp {
            record.insert("created_at".into(), Value::String(ts.clone()));
        }
        out.push_str(&Value::Object(record).to_string());
        out.push('\n');
    }
    out
}
