//! Dictionary files: a header block between two `%` lines mapping numeric
//! ids to category names, followed by `pattern id [id…]` lines. Fields are
//! separated by tabs or spaces.

use std::collections::BTreeMap;
use std::path::Path;

use motive_core::lexicon::{Category, Lexicon, LexiconError, Pattern, PatternError};

use crate::PathIoError;

#[derive(Debug, thiserror::Error)]
pub enum DicError {
    #[error(transparent)]
    Io(#[from] PathIoError),
    #[error("missing '%' header block")]
    MissingHeader,
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}: {source}")]
    Pattern {
        line: usize,
        #[source]
        source: PatternError,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

fn line_error(line: usize, message: impl Into<String>) -> DicError {
    DicError::Line {
        line,
        message: message.into(),
    }
}

pub fn parse_dic_str(text: &str) -> Result<Lexicon, DicError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut opened = false;
    for (_, l) in lines.by_ref() {
        if l.is_empty() {
            continue;
        }
        opened = l == "%";
        break;
    }
    if !opened {
        return Err(DicError::MissingHeader);
    }

    let mut ids: BTreeMap<u32, usize> = BTreeMap::new();
    let mut categories: Vec<Category> = Vec::new();
    let mut closed = false;
    for (n, l) in lines.by_ref() {
        if l.is_empty() {
            continue;
        }
        if l == "%" {
            closed = true;
            break;
        }
        let mut parts = l.split_whitespace();
        let (Some(id), Some(name), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(line_error(n, format!("expected \"id name\", got {l:?}")));
        };
        let id: u32 = id.parse().map_err(|_| line_error(n, format!("invalid category id {id:?}")))?;
        if ids.insert(id, categories.len()).is_some() {
            return Err(line_error(n, format!("category id {id} declared twice")));
        }
        categories.push(Category {
            name: name.to_string(),
            patterns: Vec::new(),
        });
    }
    if !closed {
        return Err(DicError::MissingHeader);
    }

    for (n, l) in lines {
        if l.is_empty() {
            continue;
        }
        let mut parts = l.split_whitespace();
        let raw = parts.next().expect("non-blank line");
        let pattern = Pattern::parse(raw).map_err(|source| DicError::Pattern { line: n, source })?;
        let mut any = false;
        for id in parts {
            any = true;
            let slot = id
                .parse::<u32>()
                .ok()
                .and_then(|id| ids.get(&id))
                .ok_or_else(|| line_error(n, format!("undeclared category id {id:?}")))?;
            let patterns = &mut categories[*slot].patterns;
            if !patterns.contains(&pattern) {
                patterns.push(pattern.clone());
            }
        }
        if !any {
            return Err(line_error(n, format!("pattern {raw:?} has no category id")));
        }
    }
    Ok(Lexicon::new(categories)?)
}

pub fn parse_dic(path: &Path) -> Result<Lexicon, DicError> {
    parse_dic_str(&crate::read_to_string(path)?)
}

/// The small open demonstration lexicon shipped with the crate.
pub fn demo_lexicon() -> Lexicon {
    parse_dic_str(DEMO_LEXICON).expect("bundled lexicon is valid")
}

pub const DEMO_LEXICON: &str = include_str!("../data/demo_lexicon.dic");
