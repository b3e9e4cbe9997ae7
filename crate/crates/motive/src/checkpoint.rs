//! Text checkpoint format.
//!
//! ```text
//! MOTIVE-MODEL v1
//! key=value            (metadata, one per line)
//!
//! tensor.name
//! ROWS COLS
//! v v v …              (one line per row, shortest round-trip decimals)
//!
//! next.tensor …
//! ```
//!
//! Architecture keys (`input_dim`, `hidden`, `layers`, `attention_dim`,
//! `dropout`) are required; other keys are carried along untouched.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use motive_core::model::{Hyperparams, ModelError, ModelParams};

use crate::PathIoError;

pub const MAGIC: &str = "MOTIVE-MODEL";
pub const VERSION: &str = "v1";

const ARCH_KEYS: [&str; 5] = ["input_dim", "hidden", "layers", "attention_dim", "dropout"];

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] PathIoError),
    #[error("not a model checkpoint (missing \"{MAGIC} {VERSION}\" header)")]
    MissingHeader,
    #[error("unsupported checkpoint version {0:?}, expected {VERSION}")]
    Version(String),
    #[error("line {line}: {message}")]
    Metadata { line: usize, message: String },
    #[error("line {line}: expected tensor {expected:?}, found {found:?}")]
    TensorName { line: usize, expected: String, found: String },
    #[error("line {line}: tensor {tensor} has shape {found}, expected {expected}")]
    Shape {
        line: usize,
        tensor: String,
        expected: String,
        found: String,
    },
    #[error("line {line}: tensor {tensor}: {value:?} is not a finite number")]
    Value { line: usize, tensor: String, value: String },
    #[error("line {line}: tensor {tensor} row has {found} values, expected {expected}")]
    RowLength {
        line: usize,
        tensor: String,
        expected: usize,
        found: usize,
    },
    #[error("file ends inside {0}")]
    Truncated(String),
    #[error("line {0}: unexpected content after the last tensor")]
    Trailing(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    /// Non-architecture metadata, e.g. the token cap used in training.
    pub metadata: BTreeMap<String, String>,
}

impl Checkpoint {
    pub fn new(params: ModelParams) -> Self {
        Checkpoint {
            params,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }
}

pub fn save_string(ckpt: &Checkpoint) -> String {
    let h = &ckpt.params.hyper;
    let mut out = format!("{MAGIC} {VERSION}\n");
    writeln!(out, "input_dim={}", h.input_dim).unwrap();
    writeln!(out, "hidden={}", h.hidden).unwrap();
    writeln!(out, "layers={}", h.layers).unwrap();
    writeln!(out, "attention_dim={}", h.attention_dim).unwrap();
    writeln!(out, "dropout={:?}", h.dropout).unwrap();
    for (k, v) in &ckpt.metadata {
        if !ARCH_KEYS.contains(&k.as_str()) {
            writeln!(out, "{k}={v}").unwrap();
        }
    }
    for (name, m) in ckpt.params.named_tensors() {
        write!(out, "\n{name}\n{} {}\n", m.rows(), m.cols()).unwrap();
        for r in 0..m.rows() {
            let row: Vec<String> = m.row(r).iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn save(ckpt: &Checkpoint, path: &Path) -> anyhow::Result<()> {
    crate::output::write_atomic(path, save_string(ckpt).as_bytes())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_nonblank(&mut self) -> Option<(usize, &'a str)> {
        self.inner.by_ref().map(|(i, l)| (i + 1, l.trim())).find(|(_, l)| !l.is_empty())
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next().map(|(i, l)| (i + 1, l.trim()))
    }
}

fn metadata_error(line: usize, message: impl Into<String>) -> CheckpointError {
    CheckpointError::Metadata {
        line,
        message: message.into(),
    }
}

pub fn load_str(text: &str) -> Result<Checkpoint, CheckpointError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let header = lines.next_line().map(|(_, l)| l).unwrap_or_default();
    match header.split_once(' ') {
        Some((MAGIC, VERSION)) => {}
        Some((MAGIC, other)) => return Err(CheckpointError::Version(other.into())),
        _ => return Err(CheckpointError::MissingHeader),
    }

    let mut metadata = BTreeMap::new();
    let mut arch: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    loop {
        let Some((n, l)) = lines.next_line() else {
            return Err(CheckpointError::Truncated("metadata".into()));
        };
        if l.is_empty() {
            break;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| metadata_error(n, format!("expected key=value, got {l:?}")))?;
        if let Some(&key) = ARCH_KEYS.iter().find(|&&a| a == k) {
            arch.insert(key, (n, v));
        } else {
            metadata.insert(k.to_string(), v.to_string());
        }
    }
    let int = |key: &str| -> Result<usize, CheckpointError> {
        let (n, v) = arch.get(key).ok_or_else(|| metadata_error(1, format!("missing {key}")))?;
        v.parse().map_err(|_| metadata_error(*n, format!("{key}={v} is not an integer")))
    };
    let (dn, dv) = arch.get("dropout").ok_or_else(|| metadata_error(1, "missing dropout"))?;
    let hyper = Hyperparams {
        input_dim: int("input_dim")?,
        hidden: int("hidden")?,
        layers: int("layers")?,
        attention_dim: int("attention_dim")?,
        dropout: dv
            .parse()
            .map_err(|_| metadata_error(*dn, format!("dropout={dv} is not a number")))?,
    };
    hyper.validate()?;

    let mut params = ModelParams::zeros(hyper);
    let expected: Vec<(String, (usize, usize))> = params
        .named_tensors()
        .into_iter()
        .map(|(name, m)| (name, m.shape()))
        .collect();
    for ((name, (rows, cols)), tensor) in expected.into_iter().zip(params.tensors_mut()) {
        let (n, found) = lines
            .next_nonblank()
            .ok_or_else(|| CheckpointError::Truncated(name.clone()))?;
        if found != name {
            return Err(CheckpointError::TensorName {
                line: n,
                expected: name,
                found: found.into(),
            });
        }
        let (n, shape) = lines.next_line().ok_or_else(|| CheckpointError::Truncated(name.clone()))?;
        let want = format!("{rows} {cols}");
        if shape.split_whitespace().collect::<Vec<_>>() != want.split(' ').collect::<Vec<_>>() {
            return Err(CheckpointError::Shape {
                line: n,
                tensor: name,
                expected: want,
                found: shape.into(),
            });
        }
        for r in 0..rows {
            let (n, row) = lines.next_line().ok_or_else(|| CheckpointError::Truncated(name.clone()))?;
            let values: Vec<&str> = row.split_whitespace().collect();
            if values.len() != cols {
                return Err(CheckpointError::RowLength {
                    line: n,
                    tensor: name,
                    expected: cols,
                    found: values.len(),
                });
            }
            for (slot, v) in tensor.row_mut(r).iter_mut().zip(values) {
                *slot = match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => x,
                    _ => {
                        return Err(CheckpointError::Value {
                            line: n,
                            tensor: name,
                            value: v.into(),
                        })
                    }
                };
            }
        }
    }
    if let Some((n, _)) = lines.next_nonblank() {
        return Err(CheckpointError::Trailing(n));
    }
    Ok(Checkpoint { params, metadata })
}

pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
    load_str(&crate::read_to_string(path)?)
}
