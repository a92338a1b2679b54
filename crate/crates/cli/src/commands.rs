use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use sarcasm_core::classifiers::{fit, LabeledMatrix, ModelKind, TrainedModel};
use sarcasm_core::dataset::{load_dataset, DatasetKind};
use sarcasm_core::embeddings::{write_feature_cache, Layout};
use sarcasm_core::eval::{mean_std, render_grid, report, EvalReport, GridCell};
use sarcasm_core::featurize::{featurize, preprocess_record, FeatureSource, Featurized};
use sarcasm_core::preprocess::{PipelineConfig, TokenSeq};
use sarcasm_core::Label;

use crate::config::{RunConfig, SourceSpec, Split};
use crate::split;

/// Writes to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn log_stats(f: &Featurized) {
    let s = f.stats;
    if s.oov_responses > 0 || s.oov_contexts > 0 {
        log::warn!(
            "{} of {} records have no known response token, {} no known context token",
            s.oov_responses,
            s.records,
            s.oov_contexts
        );
    }
}

fn layout_title(layout: Layout) -> &'static str {
    match layout {
        Layout::ResponseOnly => "response only",
        Layout::ContextThenResponse => "context + response",
    }
}

pub fn classifier_title(kind: ModelKind) -> String {
    format!("{} ({})", kind.display_name(), kind.short_name().to_uppercase())
}

#[derive(Serialize)]
struct TokenizedRecord<'a> {
    key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
    response: &'a TokenSeq,
    context: &'a [TokenSeq],
}

pub fn cmd_preprocess(cfg: &RunConfig) -> Result<()> {
    let (path, kind) = match (&cfg.train_file, &cfg.test_file) {
        (Some(p), None) => (p, DatasetKind::Train),
        (None, Some(p)) => (p, DatasetKind::Test),
        _ => bail!("give exactly one of --train-file or --test-file"),
    };
    let data = load_dataset(path, kind)?;
    let pipeline = cfg.pipeline()?;
    let vocab = cfg.glove.as_deref().map(sarcasm_core::embeddings::load_glove).transpose()?;
    let mut out = String::new();
    for record in &data.records {
        let (response, context) = preprocess_record(&record.response, &record.context, &pipeline, vocab.as_ref());
        let line = TokenizedRecord {
            key: record.key(),
            label: record.label,
            response: &response,
            context: &context,
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    emit(cfg.out.as_deref(), &out)
}

pub fn cmd_embed(cfg: &RunConfig) -> Result<()> {
    let (path, kind) = match (&cfg.train_file, &cfg.test_file) {
        (Some(p), None) => (p, DatasetKind::Train),
        (None, Some(p)) => (p, DatasetKind::Test),
        _ => bail!("give exactly one of --train-file or --test-file"),
    };
    let data = load_dataset(path, kind)?;
    let source = cfg.source()?.load()?;
    let layout = cfg.layout();
    let feats = featurize(&data, &cfg.pipeline()?, &source, layout)?;
    log_stats(&feats);
    let mut buf = Vec::new();
    write_feature_cache(
        &mut buf,
        feats.keys.iter().map(String::as_str).zip(&feats.features),
        source.feature_len(layout),
    )?;
    emit(cfg.out.as_deref(), std::str::from_utf8(&buf)?)
}

/// Validation results of a training run.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "split", rename_all = "snake_case")]
pub enum Validation {
    Holdout {
        fraction: f64,
        train_size: usize,
        report: EvalReport,
    },
    KFold {
        folds: Vec<EvalReport>,
        mean_f1: f64,
        std_f1: f64,
        mean_macro_f1: f64,
        std_macro_f1: f64,
    },
}

impl Validation {
    pub fn summary(&self) -> String {
        match self {
            Validation::Holdout { fraction, train_size, report } => {
                format!("holdout {fraction} (trained on {train_size} records)\n{report}")
            }
            Validation::KFold {
                folds,
                mean_f1,
                std_f1,
                mean_macro_f1,
                std_macro_f1,
            } => {
                let mut s = String::new();
                for (i, r) in folds.iter().enumerate() {
                    let _ = writeln!(s, "fold {}: F1 {:.4}  macro-F1 {:.4}", i + 1, r.headline_f1(), r.macro_f1);
                }
                let _ = write!(
                    s,
                    "{} folds: F1 {mean_f1:.4} ± {std_f1:.4}  macro-F1 {mean_macro_f1:.4} ± {std_macro_f1:.4}",
                    folds.len()
                );
                s
            }
        }
    }
}

pub struct TrainOutcome {
    pub model: TrainedModel,
    pub validation: Validation,
}

fn evaluate_on(model: &TrainedModel, data: &LabeledMatrix) -> Result<EvalReport> {
    let preds = model.predict_labels(data.rows())?;
    Ok(report(&preds, data.labels())?)
}

fn source_metadata(model: &mut TrainedModel, spec: &SourceSpec, source: &FeatureSource, layout: Layout) {
    let meta = &mut model.metadata;
    meta.insert("source".into(), source.name().into());
    meta.insert("layout".into(), layout.to_string());
    meta.insert("block_len".into(), source.block_len().to_string());
    if let SourceSpec::Precomputed { seq_len: Some(l), .. } = spec {
        meta.insert("seq_len".into(), l.to_string());
    }
}

/// Featurizes the training file, fits on the training part of the split and
/// scores the held-out part. With k folds the saved model is refit on all
/// records after cross-validation.
pub fn train(cfg: &RunConfig) -> Result<TrainOutcome> {
    let data = load_dataset(cfg.train_file()?, DatasetKind::Train)?;
    let spec = cfg.source()?;
    let source = spec.load()?;
    let layout = cfg.layout();
    let kind = cfg.model.unwrap_or(ModelKind::Lr);
    let feats = featurize(&data, &cfg.pipeline()?, &source, layout)?;
    log_stats(&feats);
    let matrix = feats.to_matrix()?;
    let train_cfg = cfg.train_config(kind);

    let (mut model, validation) = match cfg.split()? {
        Split::Holdout(fraction) => {
            let (train_idx, val_idx) = split::holdout(matrix.n(), fraction, cfg.seed())?;
            let model = fit(&matrix.subset(&train_idx), &train_cfg)?;
            let report = evaluate_on(&model, &matrix.subset(&val_idx))?;
            let validation = Validation::Holdout {
                fraction,
                train_size: train_idx.len(),
                report,
            };
            (model, validation)
        }
        Split::KFold(k) => {
            let mut folds = Vec::with_capacity(k);
            for (train_idx, val_idx) in split::k_fold(matrix.n(), k, cfg.seed())? {
                let model = fit(&matrix.subset(&train_idx), &train_cfg)?;
                folds.push(evaluate_on(&model, &matrix.subset(&val_idx))?);
            }
            let (mean_f1, std_f1) = mean_std(&folds.iter().map(EvalReport::headline_f1).collect::<Vec<_>>());
            let (mean_macro_f1, std_macro_f1) = mean_std(&folds.iter().map(|r| r.macro_f1).collect::<Vec<_>>());
            let validation = Validation::KFold {
                folds,
                mean_f1,
                std_f1,
                mean_macro_f1,
                std_macro_f1,
            };
            (fit(&matrix, &train_cfg)?, validation)
        }
    };
    source_metadata(&mut model, &spec, &source, layout);
    Ok(TrainOutcome { model, validation })
}

pub fn cmd_train(cfg: &RunConfig, report_path: Option<&Path>) -> Result<()> {
    let out = cfg.out.as_deref().context("--out is required to save the model")?;
    let outcome = train(cfg)?;
    outcome.model.save(out)?;
    if let Some(path) = report_path {
        let json = serde_json::to_string_pretty(&outcome.validation)? + "\n";
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(None, &format!("{}\nmodel saved to {}\n", outcome.validation.summary(), out.display()))?;
    Ok(())
}

/// `id,LABEL` lines for every record of the test file.
pub fn predict(cfg: &RunConfig, model: &TrainedModel) -> Result<String> {
    let data = load_dataset(cfg.test_file()?, DatasetKind::Test)?;
    let layout = match (cfg.layout, model.metadata.get("layout")) {
        (Some(l), _) => l,
        (None, Some(stored)) => stored.parse()?,
        (None, None) => Layout::ContextThenResponse,
    };
    let source = cfg.source()?.load()?;
    if let Some(trained_on) = model.metadata.get("source").filter(|s| s.as_str() != source.name()) {
        log::warn!("model was trained on {trained_on} features, predicting with {}", source.name());
    }
    let expected = source.feature_len(layout);
    if expected != model.d {
        bail!("expected d={}, got {expected}", model.d);
    }
    let feats = featurize(&data, &cfg.pipeline()?, &source, layout)?;
    log_stats(&feats);
    let mut out = String::new();
    for (key, feature) in feats.keys.iter().zip(&feats.features) {
        let label = model.predict(&feature.values)?.label;
        let _ = writeln!(out, "{key},{label}");
    }
    Ok(out)
}

pub fn cmd_predict(cfg: &RunConfig, model_path: &Path) -> Result<()> {
    let model = TrainedModel::load(model_path)?;
    let out = predict(cfg, &model)?;
    emit(cfg.out.as_deref(), &out)
}

/// Parses `id,LABEL` lines. Blank lines are skipped.
pub fn read_label_csv(path: &Path) -> Result<Vec<(String, Label)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (id, label) = line
            .rsplit_once(',')
            .with_context(|| format!("{}:{}: expected id,LABEL", path.display(), i + 1))?;
        let label = label
            .trim()
            .parse()
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        rows.push((id.trim().to_string(), label));
    }
    Ok(rows)
}

fn read_gold(path: &Path) -> Result<HashMap<String, Label>> {
    let is_jsonl = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("json"));
    let pairs = if is_jsonl {
        load_dataset(path, DatasetKind::Test)?
            .records
            .into_iter()
            .map(|r| match r.label {
                Some(label) => Ok((r.key(), label)),
                None => bail!("{}: record {} has no label", path.display(), r.key()),
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        read_label_csv(path)?
    };
    let mut gold = HashMap::with_capacity(pairs.len());
    for (id, label) in pairs {
        if gold.insert(id.clone(), label).is_some() {
            bail!("duplicate gold id {id}");
        }
    }
    Ok(gold)
}

pub fn evaluate(predictions: &Path, gold: &Path) -> Result<EvalReport> {
    let preds = read_label_csv(predictions)?;
    let gold = read_gold(gold)?;
    let mut p = Vec::with_capacity(preds.len());
    let mut t = Vec::with_capacity(preds.len());
    for (id, label) in &preds {
        let truth = gold.get(id).with_context(|| format!("no gold label for {id}"))?;
        p.push(*label);
        t.push(*truth);
    }
    if gold.len() != preds.len() {
        bail!("{} gold labels but {} predictions", gold.len(), preds.len());
    }
    Ok(report(&p, &t)?)
}

pub fn cmd_evaluate(predictions: &Path, gold: &Path, out: Option<&Path>) -> Result<()> {
    let report = evaluate(predictions, gold)?;
    if let Some(path) = out {
        fs::write(path, report.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    emit(None, &format!("{report}\n"))
}

/// Every classifier × {response only, context + response} for every
/// configured source, all scored on the same seeded holdout.
pub fn ablate(cfg: &RunConfig) -> Result<Vec<GridCell>> {
    let fraction = match cfg.split()? {
        Split::Holdout(f) => f,
        Split::KFold(_) => bail!("ablate runs on a holdout split; drop --folds"),
    };
    let data = load_dataset(cfg.train_file()?, DatasetKind::Train)?;
    let pipeline: PipelineConfig = cfg.pipeline()?;
    let (train_idx, val_idx) = split::holdout(data.len(), fraction, cfg.seed())?;
    let mut cells = Vec::new();
    for spec in cfg.sources()? {
        let source = spec.load()?;
        for layout in [Layout::ResponseOnly, Layout::ContextThenResponse] {
            let feats = featurize(&data, &pipeline, &source, layout)?;
            log_stats(&feats);
            let matrix = feats.to_matrix()?;
            let (train, val) = (matrix.subset(&train_idx), matrix.subset(&val_idx));
            for kind in ModelKind::ALL {
                let model = fit(&train, &cfg.train_config(kind))?;
                cells.push(GridCell {
                    source: source.name().to_string(),
                    layout: layout_title(layout).to_string(),
                    classifier: classifier_title(kind),
                    report: evaluate_on(&model, &val)?,
                });
            }
        }
    }
    Ok(cells)
}

pub fn cmd_ablate(cfg: &RunConfig) -> Result<()> {
    let cells = ablate(cfg)?;
    if let Some(path) = &cfg.out {
        let json = serde_json::to_string_pretty(&cells)? + "\n";
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(None, &render_grid(&cells))
}
