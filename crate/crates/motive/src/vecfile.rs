//! Word vectors in the plain text format: a `COUNT DIM` header, then one
//! `word v1 … vDIM` line per word.

use std::fmt::Write;
use std::path::Path;

use motive_core::embeddings::{EmbeddingError, EmbeddingTable};

use crate::PathIoError;

#[derive(Debug, thiserror::Error)]
pub enum VecError {
    #[error(transparent)]
    Io(#[from] PathIoError),
    #[error("line 1: malformed header {0:?}, expected \"COUNT DIM\"")]
    Header(String),
    #[error("line {line}: expected {expected} values, found {found}")]
    Arity { line: usize, expected: usize, found: usize },
    #[error("line {line}: {value:?} is not a finite number")]
    Value { line: usize, value: String },
    #[error(transparent)]
    Table(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VecReport {
    pub declared_count: usize,
    pub rows: usize,
    /// Later rows for a word already seen; the first one is kept.
    pub duplicates: usize,
}

impl VecReport {
    /// Mismatch between the header count and the rows present.
    pub fn count_warning(&self) -> Option<String> {
        (self.declared_count != self.rows)
            .then(|| format!("header declares {} words, file has {}", self.declared_count, self.rows))
    }
}

pub fn parse_vec_str(text: &str) -> Result<(EmbeddingTable, VecReport), VecError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match fields[..] {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d >= 1 => (c, d),
            _ => return Err(VecError::Header(header.into())),
        },
        _ => return Err(VecError::Header(header.into())),
    };
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut duplicates = 0;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-blank line");
        let values: Vec<&str> = parts.collect();
        if values.len() != dim {
            return Err(VecError::Arity {
                line: line_no,
                expected: dim,
                found: values.len(),
            });
        }
        let vector = values
            .iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(VecError::Value {
                    line: line_no,
                    value: (*v).into(),
                }),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if !seen.insert(word.to_string()) {
            duplicates += 1;
        }
        entries.push((word.to_string(), vector));
    }
    let rows = entries.len();
    let table = EmbeddingTable::from_entries(dim, entries)?;
    Ok((
        table,
        VecReport {
            declared_count: count,
            rows,
            duplicates,
        },
    ))
}

pub fn parse_vec_file(path: &Path) -> Result<(EmbeddingTable, VecReport), VecError> {
    parse_vec_str(&crate::read_to_string(path)?)
}

/// Serializes with shortest round-trip decimals, so parsing the result
/// gives an identical table.
pub fn write_vec(table: &EmbeddingTable) -> String {
    let mut out = format!("{} {}\n", table.len(), table.dim());
    for (word, v) in table.entries() {
        out.push_str(word);
        for x in v {
            write!(out, " {x:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_unknown_vector() {
        let (t, r) = parse_vec_str("2 3\na 1 2 3\nb 4 5 6\n").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.unk_vector(), [2.5, 3.5, 4.5]);
        assert_eq!(r.count_warning(), None);
        let (z, _) = parse_vec_str("1 3\nz 0 0 0\n").unwrap();
        assert_eq!(z.unk_vector(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn arity_error_names_line() {
        assert!(matches!(
            parse_vec_str("1 3\na 1 2\n"),
            Err(VecError::Arity { line: 2, expected: 3, found: 2 })
        ));
    }

    #[test]
    fn bad_values_and_headers() {
        assert!(matches!(parse_vec_str("1 2\na 1 x\n"), Err(VecError::Value { line: 2, .. })));
        assert!(matches!(parse_vec_str("1 2\na 1 NaN\n"), Err(VecError::Value { .. })));
        assert!(matches!(parse_vec_str("oops\n"), Err(VecError::Header(_))));
        assert!(matches!(parse_vec_str("2 0\n"), Err(VecError::Header(_))));
        assert!(matches!(parse_vec_str(""), Err(VecError::Header(_))));
    }

    #[test]
    fn duplicates_keep_first_and_count_warns() {
        let (t, r) = parse_vec_str("5 1\na 1\na 2\n").unwrap();
        assert_eq!(t.lookup("a"), [1.0]);
        assert_eq!(r.duplicates, 1);
        assert!(r.count_warning().is_some());
    }

    #[test]
    fn round_trip() {
        let (t, _) = parse_vec_str("2 2\nx 0.1 -3e-300\ny 1e300 -0.0\n").unwrap();
        let (again, _) = parse_vec_str(&write_vec(&t)).unwrap();
        assert_eq!(t, again);
    }
}
