//! Social-unrest indicators and the two-corpus comparison report.
//!
//! Indicators per corpus:
//!
//! * activity inhibition, motive based: share of documents labeled power
//!   level 4 (`M4`);
//! * activity inhibition, negation based: mean negations per document;
//! * leadership motive pattern: power share minus affiliation share;
//! * responsibility proxy: mean of the `family` and `insight` lexicon
//!   percentages.
//!
//! No combined unrest score is derived from them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::label::{Label, Level, Motive};
use crate::lexicon::{CorpusScores, NegationList};
use crate::model::Prediction;
use crate::stats::{
    frequency_table, pct_delta, summarize, welch_t_test, GroupBy, StatsError, TTestResult,
};

pub const FAMILY_CATEGORY: &str = "family";
pub const INSIGHT_CATEGORY: &str = "insight";

/// Words longer than this many characters count as long words.
pub const LONG_WORD_LETTERS: usize = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IndicatorError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("inputs disagree in length: {0}")]
    Length(String),
    #[error("corpora were classified by different models ({0} vs {1})")]
    ModelMismatch(String, String),
}

fn power_four() -> Label {
    Label::new(Motive::Power, Level::new(4).unwrap())
}

/// Per-corpus means over pre-truncation token streams.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticStats {
    /// Mean tokens per document (posts are treated as one sentence).
    pub avg_words: f64,
    /// Percentage of all tokens longer than six characters.
    pub long_word_pct: f64,
}

fn long_words<S: AsRef<str>>(doc: &[S]) -> usize {
    doc.iter()
        .filter(|t| t.as_ref().chars().count() > LONG_WORD_LETTERS)
        .count()
}

pub fn linguistic_stats<S: AsRef<str>>(tokens: &[Vec<S>]) -> Result<LinguisticStats, IndicatorError> {
    if tokens.is_empty() {
        return Err(IndicatorError::EmptyCorpus);
    }
    let total: usize = tokens.iter().map(Vec::len).sum();
    let long: usize = tokens.iter().map(|d| long_words(d)).sum();
    Ok(LinguisticStats {
        avg_words: total as f64 / tokens.len() as f64,
        long_word_pct: if total == 0 {
            0.0
        } else {
            100.0 * long as f64 / total as f64
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSet {
    /// Percentage of documents whose label is `M4`.
    pub activity_inhibition_motive: f64,
    /// Mean negation tokens per document.
    pub activity_inhibition_negation: f64,
    /// Power share minus affiliation share, in percentage points.
    pub lmp: f64,
    /// Mean of family and insight percentages; `None` if the lexicon lacks
    /// either category.
    pub responsibility_proxy: Option<f64>,
    /// Percentages per motive in `Motive::ALL` order.
    pub motive_shares: Vec<f64>,
    /// Percentages per level 0..=5.
    pub level_shares: Vec<f64>,
}

/// Responsibility proxy from corpus-mean lexicon percentages.
pub fn responsibility(liwc: &CorpusScores) -> Option<f64> {
    Some(0.5 * (liwc.mean_of(FAMILY_CATEGORY)? + liwc.mean_of(INSIGHT_CATEGORY)?))
}

pub fn compute_indicators<S: AsRef<str>>(
    predictions: &[Prediction],
    liwc: &CorpusScores,
    tokens: &[Vec<S>],
    negations: &NegationList,
) -> Result<IndicatorSet, IndicatorError> {
    if predictions.is_empty() {
        return Err(IndicatorError::EmptyCorpus);
    }
    if tokens.len() != predictions.len() || liwc.per_document.len() != predictions.len() {
        return Err(IndicatorError::Length(format!(
            "{} predictions, {} token streams, {} lexicon rows",
            predictions.len(),
            tokens.len(),
            liwc.per_document.len()
        )));
    }
    let labels = || predictions.iter().map(|p| p.argmax);
    let full = frequency_table(labels(), GroupBy::Label).map_err(|_| IndicatorError::EmptyCorpus)?;
    let motives = frequency_table(labels(), GroupBy::Motive).map_err(|_| IndicatorError::EmptyCorpus)?;
    let levels = frequency_table(labels(), GroupBy::Level).map_err(|_| IndicatorError::EmptyCorpus)?;
    let negation_total: usize = tokens.iter().map(|d| negations.count(d)).sum();
    let motive_shares = motives.percentages();
    Ok(IndicatorSet {
        activity_inhibition_motive: full.percentage(power_four().index()),
        activity_inhibition_negation: negation_total as f64 / tokens.len() as f64,
        lmp: motive_shares[Motive::Power.index()] - motive_shares[Motive::Affiliation.index()],
        responsibility_proxy: responsibility(liwc),
        motive_shares,
        level_shares: levels.percentages(),
    })
}

/// Everything computed for one corpus sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusArtifacts {
    /// Corpus tag such as "2019".
    pub label: String,
    /// Identifies the classifier that produced `predictions`.
    pub model_id: String,
    pub predictions: Vec<Prediction>,
    /// Full normalized token streams (stop words kept, no cap).
    pub tokens: Vec<Vec<String>>,
    pub liwc: CorpusScores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowGroup {
    Indicator,
    Motive,
    Level,
    Linguistic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Significance {
    Tested(TTestResult),
    /// Both samples constant and equal.
    Degenerate,
    /// Fewer than two documents on a side.
    Unavailable,
}

impl Significance {
    pub fn result(&self) -> Option<&TTestResult> {
        match self {
            Significance::Tested(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub group: RowGroup,
    pub value_a: f64,
    pub value_b: f64,
    /// `None` when `value_a` is zero.
    pub pct_delta: Option<f64>,
    pub significance: Significance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub label_a: String,
    pub label_b: String,
    pub fingerprint: String,
    pub rows: Vec<ReportRow>,
}

fn test_samples(a: &[f64], b: &[f64]) -> Significance {
    let (Ok(sa), Ok(sb)) = (summarize(a), summarize(b)) else {
        return Significance::Unavailable;
    };
    match welch_t_test(&sa, &sb) {
        Ok(r) => Significance::Tested(r),
        Err(StatsError::Degenerate) => Significance::Degenerate,
        Err(_) => Significance::Unavailable,
    }
}

fn row(metric: String, group: RowGroup, value_a: f64, value_b: f64, docs_a: &[f64], docs_b: &[f64]) -> ReportRow {
    ReportRow {
        metric,
        group,
        value_a,
        value_b,
        pct_delta: pct_delta(value_a, value_b).ok(),
        significance: test_samples(docs_a, docs_b),
    }
}

fn check_artifacts(c: &CorpusArtifacts) -> Result<(), IndicatorError> {
    if c.predictions.is_empty() {
        return Err(IndicatorError::EmptyCorpus);
    }
    if c.tokens.len() != c.predictions.len() || c.liwc.per_document.len() != c.predictions.len() {
        return Err(IndicatorError::Length(format!(
            "corpus {:?}: {} predictions, {} token streams, {} lexicon rows",
            c.label,
            c.predictions.len(),
            c.tokens.len(),
            c.liwc.per_document.len()
        )));
    }
    Ok(())
}

/// Per-document mass of labels matching `pred`.
fn masses(c: &CorpusArtifacts, pred: impl Fn(Label) -> bool + Copy) -> Vec<f64> {
    c.predictions.iter().map(|p| p.mass(pred)).collect()
}

/// Compares corpus `b` against baseline `a`.
///
/// Share rows (motive, level, `power_4`) are argmax percentages, tested on
/// per-document probability mass of the same labels. Lexicon rows are
/// corpus-mean percentages tested on per-document percentages.
pub fn compare_corpora(
    a: &CorpusArtifacts,
    b: &CorpusArtifacts,
    negations: &NegationList,
    fingerprint: &str,
) -> Result<DeltaReport, IndicatorError> {
    check_artifacts(a)?;
    check_artifacts(b)?;
    if a.model_id != b.model_id {
        return Err(IndicatorError::ModelMismatch(a.model_id.clone(), b.model_id.clone()));
    }
    let ia = compute_indicators(&a.predictions, &a.liwc, &a.tokens, negations)?;
    let ib = compute_indicators(&b.predictions, &b.liwc, &b.tokens, negations)?;
    let mut rows = Vec::new();

    let m4 = power_four();
    rows.push(row(
        "power_4".into(),
        RowGroup::Indicator,
        ia.activity_inhibition_motive,
        ib.activity_inhibition_motive,
        &masses(a, |l| l == m4),
        &masses(b, |l| l == m4),
    ));
    let neg = |c: &CorpusArtifacts| -> Vec<f64> {
        c.tokens.iter().map(|d| negations.count(d) as f64).collect()
    };
    rows.push(row(
        "negations".into(),
        RowGroup::Indicator,
        ia.activity_inhibition_negation,
        ib.activity_inhibition_negation,
        &neg(a),
        &neg(b),
    ));
    let lmp_docs = |c: &CorpusArtifacts| -> Vec<f64> {
        c.predictions
            .iter()
            .map(|p| 100.0 * (p.mass(|l| l.motive == Motive::Power) - p.mass(|l| l.motive == Motive::Affiliation)))
            .collect()
    };
    rows.push(row("lmp".into(), RowGroup::Indicator, ia.lmp, ib.lmp, &lmp_docs(a), &lmp_docs(b)));

    if let (Some(ra), Some(rb)) = (ia.responsibility_proxy, ib.responsibility_proxy) {
        let docs = |c: &CorpusArtifacts| -> Vec<f64> {
            let f = c.liwc.categories.iter().position(|n| n == FAMILY_CATEGORY).unwrap();
            let i = c.liwc.categories.iter().position(|n| n == INSIGHT_CATEGORY).unwrap();
            c.liwc
                .per_document
                .iter()
                .map(|r| 0.5 * (r[f].percentage + r[i].percentage))
                .collect()
        };
        rows.push(row("responsibility".into(), RowGroup::Indicator, ra, rb, &docs(a), &docs(b)));
    }
    for (ci, name) in a.liwc.categories.iter().enumerate() {
        let Some(cj) = b.liwc.categories.iter().position(|n| n == name) else {
            continue;
        };
        rows.push(row(
            format!("liwc:{name}"),
            RowGroup::Indicator,
            a.liwc.mean_percentage[ci],
            b.liwc.mean_percentage[cj],
            &a.liwc.column(ci),
            &b.liwc.column(cj),
        ));
    }

    for m in Motive::ALL {
        rows.push(row(
            format!("motive:{}", m.code()),
            RowGroup::Motive,
            ia.motive_shares[m.index()],
            ib.motive_shares[m.index()],
            &masses(a, |l| l.motive == m),
            &masses(b, |l| l.motive == m),
        ));
    }
    for lv in Level::all() {
        let k = usize::from(lv.get());
        rows.push(row(
            format!("level:{k}"),
            RowGroup::Level,
            ia.level_shares[k],
            ib.level_shares[k],
            &masses(a, |l| l.level == lv),
            &masses(b, |l| l.level == lv),
        ));
    }

    let la = linguistic_stats(&a.tokens)?;
    let lb = linguistic_stats(&b.tokens)?;
    let words = |c: &CorpusArtifacts| -> Vec<f64> { c.tokens.iter().map(|d| d.len() as f64).collect() };
    rows.push(row("avg_words".into(), RowGroup::Linguistic, la.avg_words, lb.avg_words, &words(a), &words(b)));
    let long = |c: &CorpusArtifacts| -> Vec<f64> {
        c.tokens
            .iter()
            .map(|d| if d.is_empty() { 0.0 } else { 100.0 * long_words(d) as f64 / d.len() as f64 })
            .collect()
    };
    rows.push(row(
        "long_words_pct".into(),
        RowGroup::Linguistic,
        la.long_word_pct,
        lb.long_word_pct,
        &long(a),
        &long(b),
    ));

    rows.sort_by_key(|r| r.group);
    Ok(DeltaReport {
        label_a: a.label.clone(),
        label_b: b.label.clone(),
        fingerprint: fingerprint.to_string(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Markdown,
}

pub const REPORT_COLUMNS: [&str; 8] = ["metric", "value_a", "value_b", "pct_delta", "t", "df", "p", "stars"];

fn fmt_num(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        "NA".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let s = format!("{x:.decimals$}");
        // avoid "-0.0000"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }
}

fn row_cells(r: &ReportRow) -> [String; 8] {
    let (t, df, p, stars) = match &r.significance {
        Significance::Tested(res) => (
            fmt_num(res.t, 4),
            fmt_num(res.df, 2),
            format!("{:.4e}", res.p_two_sided),
            res.stars.to_string(),
        ),
        Significance::Degenerate => ("NA".into(), "NA".into(), "NA".into(), "degenerate".into()),
        Significance::Unavailable => ("NA".into(), "NA".into(), "NA".into(), String::new()),
    };
    [
        r.metric.clone(),
        fmt_num(r.value_a, 4),
        fmt_num(r.value_b, 4),
        r.pct_delta.map_or_else(|| "NA".into(), |d| fmt_num(d, 2)),
        t,
        df,
        p,
        stars,
    ]
}

/// Renders rows in report order. Both formats carry the same cell strings.
pub fn render_report(report: &DeltaReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str(&REPORT_COLUMNS.join("\t"));
            out.push('\n');
            for r in &report.rows {
                out.push_str(&row_cells(r).join("\t"));
                out.push('\n');
            }
        }
        ReportFormat::Markdown => {
            let _ = writeln!(out, "| {} |", REPORT_COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(REPORT_COLUMNS.len()));
            for r in &report.rows {
                let _ = writeln!(out, "| {} |", row_cells(r).join(" | "));
            }
        }
    }
    out
}
