//! Run configuration: an optional JSON file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use sarcasm_core::classifiers::{GnbConfig, LrConfig, LsvcConfig, ModelKind, RfConfig, TrainConfig};
use sarcasm_core::embeddings::{load_glove, load_precomputed, Layout, VectorMode};
use sarcasm_core::featurize::FeatureSource;
use sarcasm_core::preprocess::resources::{load_pairs, load_word_list};
use sarcasm_core::preprocess::PipelineConfig;

use crate::args::{BertModeArg, DataArgs, LayoutArg, ModelArg, PipelineArgs, SourceArgs, SplitArgs};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_HOLDOUT: f64 = 0.2;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train_file: Option<PathBuf>,
    pub test_file: Option<PathBuf>,
    pub glove: Option<PathBuf>,
    pub precomputed: Option<PathBuf>,
    pub bert_mode: Option<VectorMode>,
    pub seq_len: Option<usize>,
    pub stopwords: Option<PathBuf>,
    pub slang: Option<PathBuf>,
    pub emoticons: Option<PathBuf>,
    pub layout: Option<Layout>,
    pub model: Option<ModelKind>,
    pub seed: Option<u64>,
    pub holdout: Option<f64>,
    pub folds: Option<usize>,
    pub out: Option<PathBuf>,
    pub lr: Option<LrConfig>,
    pub lsvc: Option<LsvcConfig>,
    pub gnb: Option<GnbConfig>,
    pub rf: Option<RfConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Split {
    Holdout(f64),
    KFold(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Glove(PathBuf),
    Precomputed {
        path: PathBuf,
        mode: Option<VectorMode>,
        seq_len: Option<usize>,
    },
}

fn overlay<T: Clone>(slot: &mut Option<T>, flag: &Option<T>) {
    if flag.is_some() {
        slot.clone_from(flag);
    }
}

impl From<LayoutArg> for Layout {
    fn from(arg: LayoutArg) -> Layout {
        match arg {
            LayoutArg::Both => Layout::ContextThenResponse,
            LayoutArg::Response => Layout::ResponseOnly,
        }
    }
}

impl From<ModelArg> for ModelKind {
    fn from(arg: ModelArg) -> ModelKind {
        match arg {
            ModelArg::Lr => ModelKind::Lr,
            ModelArg::Lsvc => ModelKind::Lsvc,
            ModelArg::Gnb => ModelKind::Gnb,
            ModelArg::Rf => ModelKind::Rf,
        }
    }
}

impl From<BertModeArg> for VectorMode {
    fn from(arg: BertModeArg) -> VectorMode {
        match arg {
            BertModeArg::Pooled => VectorMode::Pooled,
            BertModeArg::Sequence => VectorMode::Sequence,
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's own directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(base) = path.parent() {
            for slot in [
                &mut cfg.train_file,
                &mut cfg.test_file,
                &mut cfg.glove,
                &mut cfg.precomputed,
                &mut cfg.stopwords,
                &mut cfg.slang,
                &mut cfg.emoticons,
                &mut cfg.out,
            ] {
                if let Some(p) = slot.as_mut().filter(|p| p.is_relative()) {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: Option<&Path>) -> Result<RunConfig> {
        path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
    }

    pub fn with_data(mut self, args: &DataArgs) -> Self {
        overlay(&mut self.train_file, &args.train_file);
        overlay(&mut self.test_file, &args.test_file);
        self
    }

    pub fn with_source(mut self, args: &SourceArgs) -> Self {
        overlay(&mut self.glove, &args.glove);
        overlay(&mut self.precomputed, &args.precomputed);
        overlay(&mut self.bert_mode, &args.bert_mode.map(VectorMode::from));
        overlay(&mut self.seq_len, &args.seq_len);
        self
    }

    pub fn with_pipeline(mut self, args: &PipelineArgs) -> Self {
        overlay(&mut self.stopwords, &args.stopwords);
        overlay(&mut self.slang, &args.slang);
        overlay(&mut self.emoticons, &args.emoticons);
        self
    }

    pub fn with_split(mut self, args: &SplitArgs) -> Self {
        overlay(&mut self.holdout, &args.holdout);
        overlay(&mut self.folds, &args.folds);
        overlay(&mut self.seed, &args.seed);
        self
    }

    pub fn with_layout(mut self, layout: Option<LayoutArg>) -> Self {
        overlay(&mut self.layout, &layout.map(Layout::from));
        self
    }

    pub fn with_model(mut self, model: Option<ModelArg>) -> Self {
        overlay(&mut self.model, &model.map(ModelKind::from));
        self
    }

    pub fn with_out(mut self, out: &Option<PathBuf>) -> Self {
        overlay(&mut self.out, out);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn layout(&self) -> Layout {
        self.layout.unwrap_or(Layout::ContextThenResponse)
    }

    pub fn train_file(&self) -> Result<&Path> {
        self.train_file.as_deref().context("--train-file is required")
    }

    pub fn test_file(&self) -> Result<&Path> {
        self.test_file.as_deref().context("--test-file is required")
    }

    /// `--folds` wins over `--holdout` when both are given.
    pub fn split(&self) -> Result<Split> {
        match (self.folds, self.holdout) {
            (Some(k), _) if k >= 2 => Ok(Split::KFold(k)),
            (Some(k), _) => bail!("--folds must be at least 2, got {k}"),
            (None, Some(f)) if f > 0.0 && f < 1.0 => Ok(Split::Holdout(f)),
            (None, Some(f)) => bail!("--holdout must be strictly between 0 and 1, got {f}"),
            (None, None) => Ok(Split::Holdout(DEFAULT_HOLDOUT)),
        }
    }

    fn precomputed_spec(&self, path: &Path) -> Result<SourceSpec> {
        if self.seq_len == Some(0) {
            bail!("--seq-len must be at least 1");
        }
        Ok(SourceSpec::Precomputed {
            path: path.to_path_buf(),
            mode: self.bert_mode,
            seq_len: self.seq_len,
        })
    }

    /// The single embedding source of a train/embed/predict run.
    pub fn source(&self) -> Result<SourceSpec> {
        match (&self.glove, &self.precomputed) {
            (Some(g), None) => Ok(SourceSpec::Glove(g.clone())),
            (None, Some(p)) => self.precomputed_spec(p),
            (Some(_), Some(_)) => bail!("invalid configuration: set exactly one of --glove and --precomputed, not both"),
            (None, None) => bail!("invalid configuration: one of --glove or --precomputed is required"),
        }
    }

    /// Every configured source; `ablate` runs the grid once per source.
    pub fn sources(&self) -> Result<Vec<SourceSpec>> {
        let mut out = Vec::new();
        if let Some(g) = &self.glove {
            out.push(SourceSpec::Glove(g.clone()));
        }
        if let Some(p) = &self.precomputed {
            out.push(self.precomputed_spec(p)?);
        }
        if out.is_empty() {
            bail!("at least one of --glove or --precomputed is required");
        }
        Ok(out)
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.stopwords {
            cfg = cfg.with_stopwords(load_word_list(path)?);
        }
        if let Some(path) = &self.slang {
            cfg = cfg.extend_slang(load_pairs(path)?)?;
        }
        if let Some(path) = &self.emoticons {
            cfg = cfg.extend_emoticons(load_pairs(path)?)?;
        }
        Ok(cfg)
    }

    /// Hyperparameters for `kind`, seeded from the run seed.
    pub fn train_config(&self, kind: ModelKind) -> TrainConfig {
        let seed = self.seed();
        match kind {
            ModelKind::Lr => TrainConfig::Lr(LrConfig { seed, ..self.lr.clone().unwrap_or_default() }),
            ModelKind::Lsvc => TrainConfig::Lsvc(LsvcConfig { seed, ..self.lsvc.clone().unwrap_or_default() }),
            ModelKind::Gnb => TrainConfig::Gnb(self.gnb.clone().unwrap_or_default()),
            ModelKind::Rf => TrainConfig::Rf(RfConfig { seed, ..self.rf.clone().unwrap_or_default() }),
        }
    }
}

impl SourceSpec {
    pub fn load(&self) -> Result<FeatureSource> {
        match self {
            SourceSpec::Glove(path) => {
                let table = load_glove(path)?;
                log::info!("loaded {} GloVe vectors of dim {}", table.len(), table.dim());
                Ok(FeatureSource::Glove(table))
            }
            SourceSpec::Precomputed { path, mode, seq_len } => {
                let store = load_precomputed(path)?;
                if let Some(m) = mode.filter(|m| *m != store.mode()) {
                    bail!("{} holds {} vectors but --bert-mode is {m}", path.display(), store.mode());
                }
                if seq_len.is_some() && store.mode() == VectorMode::Pooled {
                    bail!("--seq-len only applies to SEQUENCE vectors");
                }
                log::info!("loaded precomputed vectors for {} records", store.len());
                Ok(FeatureSource::Precomputed {
                    store,
                    seq_len: *seq_len,
                })
            }
        }
    }
}
