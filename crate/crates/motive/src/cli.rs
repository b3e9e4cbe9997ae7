//! Command line interface. Every subcommand writes its main output to
//! `--out` (atomically) or stdout, and diagnostics to stderr.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use motive_core::corpus::{filter_documents, sample, DEFAULT_MIN_CONTENT_WORDS};
use motive_core::indicators::{compare_corpora, render_report, CorpusArtifacts, ReportFormat};
use motive_core::label::Label;
use motive_core::lexicon::{score_corpus, Lexicon, NegationList};
use motive_core::model::{forward, train, LabeledSequence, OptimizerKind, TrainConfig};
use motive_core::synth::{generate, SynthSpec};
use motive_core::textprep::{Preprocessor, StopWordList, DEFAULT_MAX_LEN};

use crate::checkpoint::{self, Checkpoint};
use crate::fingerprint::{model_id, report_fingerprint, sha256_hex};
use crate::output::{emit, write_atomic};
use crate::tsv::{self, PredictionFile, TrainingRow};
use crate::{dic, jsonl, vecfile};

#[derive(Debug, Parser)]
#[command(name = "motive", version, about = "Implicit motive classification and corpus comparison")]
pub struct Cli {
    /// Seed for every random choice in this run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, filter and sample a JSONL post corpus.
    Prep(PrepArgs),
    /// Train a classifier on text⇥motive⇥level rows.
    Train(TrainArgs),
    /// Label every post of a corpus.
    Classify(ClassifyArgs),
    /// Lexicon category percentages per post and corpus mean.
    ScoreLiwc(ScoreArgs),
    /// Indicator deltas and significance between two classified corpora.
    Compare(CompareArgs),
    /// Synthetic training corpus with a matching embedding table.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PrepSettings {
    /// Stop-word file (one word per line); defaults to the bundled German list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

impl PrepSettings {
    fn stop_words(&self) -> Result<StopWordList> {
        match &self.stopwords {
            None => Ok(StopWordList::german()),
            Some(p) => {
                let text = crate::read_to_string(p)?;
                StopWordList::parse(&text).with_context(|| format!("{}", p.display()))
            }
        }
    }
}

fn stop_words_id(list: &StopWordList) -> String {
    let joined: Vec<&str> = list.iter().collect();
    sha256_hex(joined.join("\n").as_bytes())[..16].to_string()
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Minimum number of non-stop-word tokens a post needs.
    #[arg(long, default_value_t = DEFAULT_MIN_CONTENT_WORDS)]
    pub min_content_words: usize,
    /// Number of posts to draw after filtering; all when absent.
    #[arg(long)]
    pub sample: Option<usize>,
    #[command(flatten)]
    pub prep: PrepSettings,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training rows: text⇥motive⇥level.
    #[arg(long)]
    pub data: PathBuf,
    /// Word vectors in text format.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Checkpoint path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-evaluation training log (TSV).
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.3)]
    pub dropout: f64,
    /// Hidden units per direction.
    #[arg(long, default_value_t = 128)]
    pub hidden: usize,
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    /// Attention projection width; twice the hidden size when absent.
    #[arg(long)]
    pub attention_dim: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub patience: usize,
    #[arg(long, default_value_t = 0.1)]
    pub dev_fraction: f64,
    /// Extra dev evaluation every this many steps; 0 disables.
    #[arg(long, default_value_t = 200)]
    pub eval_every: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// Token cap per post.
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: usize,
    #[command(flatten)]
    pub prep: PrepSettings,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// JSONL corpus.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write all 30 label probabilities.
    #[arg(long)]
    pub probs: bool,
    #[command(flatten)]
    pub prep: PrepSettings,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// JSONL corpus.
    #[arg(long)]
    pub input: PathBuf,
    /// Dictionary file.
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Baseline corpus (JSONL).
    #[arg(long)]
    pub corpus_a: PathBuf,
    /// Predictions for the baseline corpus.
    #[arg(long)]
    pub predictions_a: PathBuf,
    #[arg(long)]
    pub corpus_b: PathBuf,
    #[arg(long)]
    pub predictions_b: PathBuf,
    /// Dictionary file; the bundled demo lexicon when absent.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value = "a")]
    pub label_a: String,
    #[arg(long, default_value = "b")]
    pub label_b: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of classes, taken from the label list in index order.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u16).range(1..=30))]
    pub classes: u16,
    #[arg(long, default_value_t = 200)]
    pub per_class: usize,
    /// Marker words per class.
    #[arg(long, default_value_t = 3)]
    pub markers: usize,
    /// Size of the shared distractor vocabulary.
    #[arg(long, default_value_t = 50)]
    pub distractors: usize,
    #[arg(long, default_value_t = 3)]
    pub min_len: usize,
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
    /// Training rows output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the matching embedding table here.
    #[arg(long)]
    pub embeddings_out: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prep(a) => cmd_prep(&a, cli.seed),
        Command::Train(a) => cmd_train(&a, cli.seed),
        Command::Classify(a) => cmd_classify(&a),
        Command::ScoreLiwc(a) => cmd_score_liwc(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Synth(a) => cmd_synth(&a, cli.seed),
    }
}

fn require(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        bail!("{what} {} does not exist", path.display());
    }
    Ok(())
}

fn load_corpus(path: &Path, label: &str) -> Result<motive_core::corpus::Corpus> {
    let (corpus, report) = jsonl::parse_jsonl(path, label)?;
    if report.malformed + report.other_language > 0 {
        eprintln!(
            "{}: skipped {} malformed and {} non-German records",
            path.display(),
            report.malformed,
            report.other_language
        );
    }
    Ok(corpus)
}

pub fn cmd_prep(a: &PrepArgs, seed: u64) -> Result<()> {
    require(&a.input, "input")?;
    let stop = a.prep.stop_words()?;
    let prep = Preprocessor::new(stop, DEFAULT_MAX_LEN);
    let corpus = load_corpus(&a.input, "corpus")?;
    let before = corpus.len();
    let filtered = filter_documents(corpus, a.min_content_words, &prep);
    eprintln!("kept {} of {before} posts after filtering", filtered.len());
    let out = match a.sample {
        Some(n) => sample(&filtered, n, seed)?,
        None => filtered,
    };
    emit(a.out.as_deref(), &jsonl::write_jsonl(&out))
}

pub fn cmd_train(a: &TrainArgs, seed: u64) -> Result<()> {
    require(&a.data, "training data")?;
    require(&a.embeddings, "embeddings")?;
    if a.max_len == 0 {
        bail!("--max-len must be at least 1");
    }
    let stop = a.prep.stop_words()?;
    let stop_id = stop_words_id(&stop);
    let prep = Preprocessor::new(stop, a.max_len);
    let rows = tsv::parse_training(&crate::read_to_string(&a.data)?).with_context(|| a.data.display().to_string())?;
    let (table, report) = vecfile::parse_vec_file(&a.embeddings)?;
    if let Some(w) = report.count_warning() {
        eprintln!("{}: {w}", a.embeddings.display());
    }
    let dataset: Vec<LabeledSequence> = rows
        .iter()
        .map(|r| LabeledSequence {
            tokens: prep.prepare(&r.text),
            label: r.label,
        })
        .collect();
    let config = TrainConfig {
        batch_size: a.batch_size,
        max_epochs: a.epochs,
        dropout: a.dropout,
        learning_rate: a.lr,
        seed,
        patience: a.patience,
        dev_fraction: a.dev_fraction,
        eval_every: (a.eval_every > 0).then_some(a.eval_every),
        optimizer: match a.optimizer {
            OptimizerArg::Adam => OptimizerKind::Adam,
            OptimizerArg::Sgd => OptimizerKind::Sgd,
        },
        hidden: a.hidden,
        layers: a.layers,
        attention_dim: a.attention_dim,
    };
    let outcome = train(&dataset, &config, &table)?;
    if outcome.single_class {
        eprintln!("warning: training data contains a single label");
    }
    if outcome.skipped_empty > 0 {
        eprintln!("skipped {} rows with no tokens after preparation", outcome.skipped_empty);
    }
    eprintln!(
        "trained {} steps on {} rows (dev {}), best dev loss {}",
        outcome.steps,
        outcome.train_size,
        outcome.dev_size,
        outcome.best_dev_loss.map_or("NA".into(), |l| format!("{l:.4}"))
    );
    let ckpt = Checkpoint::new(outcome.params)
        .with("max_len", a.max_len)
        .with("seed", seed)
        .with("stopwords", stop_id);
    let text = checkpoint::save_string(&ckpt);
    // write the log first so a failure leaves no checkpoint behind
    if let Some(log) = &a.log {
        write_atomic(log, tsv::write_train_log(&outcome.log).as_bytes())?;
    }
    emit(a.out.as_deref(), &text)
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<()> {
    require(&a.model, "model")?;
    require(&a.embeddings, "embeddings")?;
    require(&a.input, "input")?;
    let ckpt_text = crate::read_to_string(&a.model)?;
    let ckpt = checkpoint::load_str(&ckpt_text).with_context(|| a.model.display().to_string())?;
    let (table, _) = vecfile::parse_vec_file(&a.embeddings)?;
    if table.dim() != ckpt.params.hyper.input_dim {
        bail!(
            "embedding dimension {} does not match the model's {}",
            table.dim(),
            ckpt.params.hyper.input_dim
        );
    }
    let max_len: usize = match ckpt.get("max_len") {
        Some(v) => v.parse().context("invalid max_len in checkpoint")?,
        None => DEFAULT_MAX_LEN,
    };
    let stop = a.prep.stop_words()?;
    let stop_id = stop_words_id(&stop);
    if ckpt.get("stopwords").is_some_and(|s| s != stop_id) {
        eprintln!("warning: stop-word list differs from the one used in training");
    }
    let prep = Preprocessor::new(stop, max_len);
    let corpus = load_corpus(&a.input, "corpus")?;
    let predictions = corpus
        .documents
        .iter()
        .map(|d| forward(&prep.prepare(&d.text), &table, &ckpt.params))
        .collect::<Result<Vec<_>, _>>()?;
    let file = PredictionFile {
        provenance: vec![
            ("model".into(), model_id(&ckpt_text)),
            ("max_len".into(), max_len.to_string()),
            ("stopwords".into(), stop_id),
        ],
        predictions,
        with_probs: a.probs,
    };
    emit(a.out.as_deref(), &tsv::write_predictions(&file))
}

fn full_tokens(corpus: &motive_core::corpus::Corpus) -> Vec<Vec<String>> {
    let prep = Preprocessor::default();
    corpus.texts().map(|t| prep.full_tokens(t)).collect()
}

pub fn cmd_score_liwc(a: &ScoreArgs) -> Result<()> {
    require(&a.input, "input")?;
    require(&a.lexicon, "lexicon")?;
    let lexicon = dic::parse_dic(&a.lexicon)?;
    let corpus = load_corpus(&a.input, "corpus")?;
    let scores = score_corpus(&full_tokens(&corpus), &lexicon);
    emit(a.out.as_deref(), &tsv::write_scores(&scores))
}

fn load_artifacts(corpus: &Path, predictions: &Path, label: &str, lexicon: &Lexicon) -> Result<(CorpusArtifacts, PredictionFile)> {
    require(corpus, "corpus")?;
    require(predictions, "predictions")?;
    let corpus = load_corpus(corpus, label)?;
    let preds = tsv::parse_predictions(&crate::read_to_string(predictions)?)
        .with_context(|| predictions.display().to_string())?;
    if preds.predictions.len() != corpus.len() {
        bail!(
            "{} has {} predictions for {} posts",
            predictions.display(),
            preds.predictions.len(),
            corpus.len()
        );
    }
    let tokens = full_tokens(&corpus);
    let artifacts = CorpusArtifacts {
        label: label.to_string(),
        model_id: preds.get("model").unwrap_or("unknown").to_string(),
        predictions: preds.predictions.clone(),
        liwc: score_corpus(&tokens, lexicon),
        tokens,
    };
    Ok((artifacts, preds))
}

pub fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let lexicon_bytes = match &a.lexicon {
        Some(p) => {
            require(p, "lexicon")?;
            crate::read_to_string(p)?
        }
        None => dic::DEMO_LEXICON.to_string(),
    };
    let lexicon = dic::parse_dic_str(&lexicon_bytes)?;
    let (art_a, pred_a) = load_artifacts(&a.corpus_a, &a.predictions_a, &a.label_a, &lexicon)?;
    let (art_b, _) = load_artifacts(&a.corpus_b, &a.predictions_b, &a.label_b, &lexicon)?;
    let prep_settings = format!(
        "max_len={};stopwords={}",
        pred_a.get("max_len").unwrap_or("NA"),
        pred_a.get("stopwords").unwrap_or("NA")
    );
    let fingerprint = report_fingerprint(&art_a.model_id, lexicon_bytes.as_bytes(), &prep_settings);
    let report = compare_corpora(&art_a, &art_b, &NegationList::default(), &fingerprint)?;
    let format = match a.format {
        FormatArg::Tsv => ReportFormat::Tsv,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    emit(a.out.as_deref(), &render_report(&report, format))
}

pub fn cmd_synth(a: &SynthArgs, seed: u64) -> Result<()> {
    let labels: Vec<Label> = Label::all().take(usize::from(a.classes)).collect();
    let spec = SynthSpec::uniform(&labels, a.markers, a.distractors, (a.min_len, a.max_len), seed)?;
    let n = a.per_class * labels.len();
    let rows: Vec<TrainingRow> = generate(&spec, n)?
        .into_iter()
        .map(|i| TrainingRow {
            text: i.text(),
            label: i.label,
        })
        .collect();
    if let Some(p) = &a.embeddings_out {
        if a.dim == 0 {
            bail!("--dim must be positive");
        }
        write_atomic(p, vecfile::write_vec(&spec.embeddings(a.dim, seed)).as_bytes())?;
    }
    emit(a.out.as_deref(), &tsv::write_training(&rows))
}
