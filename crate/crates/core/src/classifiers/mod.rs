//! Binary classifiers over dense feature vectors.
//!
//! Labels are encoded as ±1 with SARCASM = +1. Every exact tie resolves to
//! NOT_SARCASM. All fits are deterministic functions of the data order, the
//! configuration and the seed.

pub mod forest;
pub mod linear;
pub mod naive_bayes;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use forest::{fit_rf, predict_rf, Forest, RfConfig};
pub use linear::{fit_lr, fit_lsvc, predict_linear, LinearParams, LrConfig, LsvcConfig};
pub use naive_bayes::{fit_gnb, predict_gnb, GnbConfig, GnbParams};

use crate::dataset::Label;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Standard deviations are floored at this value.
pub const STD_FLOOR: f64 = 1e-8;

/// Row-major feature matrix with aligned labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    d: usize,
    values: Vec<f64>,
    labels: Vec<Label>,
}

impl LabeledMatrix {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::validation(format!(
                "row {i} has length {}, expected {d}",
                row.len()
            )));
        }
        Self::from_flat(d, rows.concat(), labels)
    }

    pub fn from_flat(d: usize, values: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("training data is empty"));
        }
        if d == 0 {
            return Err(Error::validation("feature vectors are empty"));
        }
        if values.len() != d * labels.len() {
            return Err(Error::validation(format!(
                "{} values do not form {} rows of length {d}",
                values.len(),
                labels.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("training data contains non-finite values"));
        }
        Ok(LabeledMatrix { d, values, labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    /// (NOT_SARCASM count, SARCASM count).
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == Label::Sarcasm).count();
        (self.labels.len() - pos, pos)
    }

    pub fn require_both_classes(&self) -> Result<()> {
        match self.class_counts() {
            (0, _) | (_, 0) => Err(Error::validation(
                "training data must contain both SARCASM and NOT_SARCASM rows",
            )),
            _ => Ok(()),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        LabeledMatrix {
            d: self.d,
            values,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Same labels, every row transformed by `scaler`.
    pub fn scaled(&self, scaler: &Scaler) -> LabeledMatrix {
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            values.extend(scaler.apply(row));
        }
        LabeledMatrix {
            d: self.d,
            values,
            labels: self.labels.clone(),
        }
    }

    /// Adds `shift` to every feature.
    pub fn shifted(&self, shift: f64) -> LabeledMatrix {
        LabeledMatrix {
            d: self.d,
            values: self.values.iter().map(|v| v + shift).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Per-feature standardization fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Population mean and standard deviation, std floored at [`STD_FLOOR`].
    pub fn fit(data: &LabeledMatrix) -> Scaler {
        let n = data.n() as f64;
        let mut mean = vec![0.0; data.d()];
        for row in data.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; data.d()];
        for row in data.rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
        Scaler { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "LR")]
    Lr,
    #[serde(rename = "LSVC")]
    Lsvc,
    #[serde(rename = "GNB")]
    Gnb,
    #[serde(rename = "RF")]
    Rf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Lsvc, ModelKind::Lr, ModelKind::Gnb, ModelKind::Rf];

    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::Lsvc => "lsvc",
            ModelKind::Gnb => "gnb",
            ModelKind::Rf => "rf",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Lr => "Logistic Regression",
            ModelKind::Lsvc => "Linear Support Vector Classifier",
            ModelKind::Gnb => "Gaussian Naive Bayes",
            ModelKind::Rf => "Random Forest",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ModelKind::Lr),
            "lsvc" => Ok(ModelKind::Lsvc),
            "gnb" => Ok(ModelKind::Gnb),
            "rf" => Ok(ModelKind::Rf),
            _ => Err(Error::validation(format!("unknown classifier {s:?}"))),
        }
    }
}

/// Hyperparameters for one of the four classifiers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TrainConfig {
    Lr(LrConfig),
    Lsvc(LsvcConfig),
    Gnb(GnbConfig),
    Rf(RfConfig),
}

impl TrainConfig {
    pub fn default_for(kind: ModelKind, seed: u64) -> TrainConfig {
        match kind {
            ModelKind::Lr => TrainConfig::Lr(LrConfig { seed, ..LrConfig::default() }),
            ModelKind::Lsvc => TrainConfig::Lsvc(LsvcConfig { seed, ..LsvcConfig::default() }),
            ModelKind::Gnb => TrainConfig::Gnb(GnbConfig::default()),
            ModelKind::Rf => TrainConfig::Rf(RfConfig { seed, ..RfConfig::default() }),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TrainConfig::Lr(_) => ModelKind::Lr,
            TrainConfig::Lsvc(_) => ModelKind::Lsvc,
            TrainConfig::Gnb(_) => ModelKind::Gnb,
            TrainConfig::Rf(_) => ModelKind::Rf,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            TrainConfig::Lr(c) => c.seed,
            TrainConfig::Lsvc(c) => c.seed,
            TrainConfig::Gnb(_) => 0,
            TrainConfig::Rf(c) => c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Linear(LinearParams),
    NaiveBayes(GnbParams),
    Forest(Forest),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub d: usize,
    pub scaler: Option<Scaler>,
    pub params: Params,
    pub seed: u64,
    pub train_config: TrainConfig,
    /// Free-form provenance (feature source, layout, ...), written verbatim.
    pub metadata: BTreeMap<String, String>,
}

/// Output of a single prediction.
///
/// `score` is the signed margin `w·x + b` for linear models, the difference
/// of log-posteriors (SARCASM minus NOT_SARCASM) for naive Bayes, and the
/// SARCASM vote fraction for the forest. `probability` is the model's
/// estimate of P(SARCASM) where one exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
    pub probability: Option<f64>,
}

pub fn fit(data: &LabeledMatrix, config: &TrainConfig) -> Result<TrainedModel> {
    match config {
        TrainConfig::Lr(cfg) => fit_lr(data, cfg),
        TrainConfig::Lsvc(cfg) => fit_lsvc(data, cfg),
        TrainConfig::Gnb(cfg) => fit_gnb(data, cfg),
        TrainConfig::Rf(cfg) => fit_rf(data, cfg),
    }
}

impl TrainedModel {
    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::validation(format!(
                "expected d={}, got {}",
                self.d,
                x.len()
            )));
        }
        Ok(())
    }

    /// Applies the stored scaler, if any.
    pub fn prepare(&self, x: &[f64]) -> Vec<f64> {
        match &self.scaler {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match &self.params {
            Params::Linear(_) => predict_linear(self, x),
            Params::NaiveBayes(_) => {
                let (label, log_post) = predict_gnb(self, x)?;
                Ok(Prediction {
                    label,
                    score: log_post.sarcasm - log_post.not_sarcasm,
                    probability: Some(log_post.sarcasm.exp()),
                })
            }
            Params::Forest(_) => {
                let (label, fraction) = predict_rf(self, x)?;
                Ok(Prediction {
                    label,
                    score: fraction,
                    probability: Some(fraction),
                })
            }
        }
    }

    pub fn predict_labels<'a>(&self, rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<Label>> {
        rows.into_iter()
            .map(|x| self.predict(x).map(|p| p.label))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let params = match &self.params {
            Params::Linear(p) => serde_json::to_value(p),
            Params::NaiveBayes(p) => serde_json::to_value(p),
            Params::Forest(p) => serde_json::to_value(p),
        }
        .expect("model parameters serialize");
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            kind: self.kind,
            d: self.d,
            scaler: self.scaler.clone(),
            params,
            seed: self.seed,
            train_config: serde_json::to_value(&self.train_config).expect("config serializes"),
            metadata: self.metadata.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let version: Version = serde_json::from_str(text)
            .map_err(|e| Error::format(format!("not a model file: {e}")))?;
        if version.format_version != FORMAT_VERSION {
            return Err(Error::format(format!(
                "model format_version {} is not supported (expected {FORMAT_VERSION})",
                version.format_version
            )));
        }
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::format(format!("corrupted model file: {e}")))?;
        let bad = |e: serde_json::Error| Error::format(format!("bad {} parameters: {e}", file.kind));
        let params = match file.kind {
            ModelKind::Lr | ModelKind::Lsvc => {
                Params::Linear(serde_json::from_value(file.params).map_err(bad)?)
            }
            ModelKind::Gnb => Params::NaiveBayes(serde_json::from_value(file.params).map_err(bad)?),
            ModelKind::Rf => Params::Forest(serde_json::from_value(file.params).map_err(bad)?),
        };
        let train_config = match file.kind {
            ModelKind::Lr => TrainConfig::Lr(serde_json::from_value(file.train_config).map_err(bad)?),
            ModelKind::Lsvc => TrainConfig::Lsvc(serde_json::from_value(file.train_config).map_err(bad)?),
            ModelKind::Gnb => TrainConfig::Gnb(serde_json::from_value(file.train_config).map_err(bad)?),
            ModelKind::Rf => TrainConfig::Rf(serde_json::from_value(file.train_config).map_err(bad)?),
        };
        let model = TrainedModel {
            kind: file.kind,
            d: file.d,
            scaler: file.scaler,
            params,
            seed: file.seed,
            train_config,
            metadata: file.metadata,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let d = self.d;
        if d == 0 {
            return Err(Error::format("model has d=0"));
        }
        if let Some(s) = &self.scaler {
            if s.mean.len() != d || s.std.len() != d || s.std.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::format("scaler does not match d"));
            }
        }
        match &self.params {
            Params::Linear(p) if p.weights.len() != d => {
                Err(Error::format("weight vector length does not match d"))
            }
            Params::NaiveBayes(p) => p.validate(d),
            Params::Forest(f) => f.validate(d),
            _ => Ok(()),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TrainedModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrainedModel::from_json(&text)
    }
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    model.save(path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    TrainedModel::load(path)
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    kind: ModelKind,
    d: usize,
    scaler: Option<Scaler>,
    params: serde_json::Value,
    seed: u64,
    train_config: serde_json::Value,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}
