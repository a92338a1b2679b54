use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Sarcasm detection on conversational tweets.
#[derive(Debug, Parser)]
#[command(name = "sarcasm", version, about)]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the preprocessed tokens of a dataset as JSON Lines.
    Preprocess(PreprocessArgs),
    /// Write the feature vector of every record.
    Embed(EmbedArgs),
    /// Fit a classifier, report validation metrics and save the model.
    Train(TrainArgs),
    /// Label a test file with a saved model (`id,LABEL` lines).
    Predict(PredictArgs),
    /// Score a predictions file against gold labels.
    Evaluate(EvaluateArgs),
    /// Run every classifier on both feature layouts.
    Ablate(AblateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Both,
    Response,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Lr,
    Lsvc,
    Gnb,
    Rf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BertModeArg {
    Pooled,
    Sequence,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    #[arg(long, value_name = "JSONL")]
    pub train_file: Option<PathBuf>,
    #[arg(long, value_name = "JSONL")]
    pub test_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// GloVe text vectors.
    #[arg(long, value_name = "FILE")]
    pub glove: Option<PathBuf>,
    /// Precomputed encoder vectors (`dim=... mode=...` interchange file).
    #[arg(long, value_name = "FILE")]
    pub precomputed: Option<PathBuf>,
    /// Expected mode of the precomputed file.
    #[arg(long, value_enum)]
    pub bert_mode: Option<BertModeArg>,
    /// Re-pad SEQUENCE vectors to this many token rows.
    #[arg(long)]
    pub seq_len: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PipelineArgs {
    /// Replaces the built-in stopword list (one word per line).
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Extra slang entries (`word<TAB>replacement`).
    #[arg(long, value_name = "FILE")]
    pub slang: Option<PathBuf>,
    /// Extra emoticon entries (`emoticon<TAB>word`).
    #[arg(long, value_name = "FILE")]
    pub emoticons: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SplitArgs {
    /// Fraction of the training file held out for validation.
    #[arg(long)]
    pub holdout: Option<f64>,
    /// Use k-fold cross-validation instead of a holdout.
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Vocabulary used to decide how elongated words collapse.
    #[arg(long, value_name = "FILE")]
    pub glove: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, value_enum)]
    pub layout: Option<LayoutArg>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, value_enum)]
    pub layout: Option<LayoutArg>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Where to save the model.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the validation report as JSON.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Defaults to the layout the model was trained with.
    #[arg(long, value_enum)]
    pub layout: Option<LayoutArg>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// `id,LABEL` lines as written by `predict`.
    #[arg(long, value_name = "CSV")]
    pub predictions: PathBuf,
    /// Gold labels, either `id,LABEL` lines or a labeled JSON Lines file.
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    /// Also write the report as JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Also write every cell's report as JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
