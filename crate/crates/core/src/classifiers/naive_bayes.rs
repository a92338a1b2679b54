use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{LabeledMatrix, ModelKind, Params, TrainConfig, TrainedModel};
use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnbConfig {
    /// Added variance as a fraction of the largest per-feature variance.
    pub var_smoothing: f64,
    pub standardize: bool,
}

impl Default for GnbConfig {
    fn default() -> Self {
        GnbConfig {
            var_smoothing: 1e-9,
            standardize: false,
        }
    }
}

/// Per-class Gaussian for one label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassGaussian {
    pub prior: f64,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    pub not_sarcasm: ClassGaussian,
    pub sarcasm: ClassGaussian,
    /// The smoothing term that was added to every variance.
    pub epsilon: f64,
}

impl GnbParams {
    pub(crate) fn validate(&self, d: usize) -> Result<()> {
        for class in [&self.not_sarcasm, &self.sarcasm] {
            if class.mean.len() != d || class.var.len() != d {
                return Err(Error::format("naive Bayes parameters do not match d"));
            }
            if class.var.iter().any(|&v| !(v > 0.0)) || !(class.prior > 0.0) {
                return Err(Error::format("naive Bayes variances and priors must be positive"));
            }
        }
        Ok(())
    }

    fn joint_log_likelihood(class: &ClassGaussian, x: &[f64]) -> f64 {
        let mut total = class.prior.ln();
        for ((v, m), s2) in x.iter().zip(&class.mean).zip(&class.var) {
            total -= 0.5 * ((2.0 * PI * s2).ln() + (v - m) * (v - m) / s2);
        }
        total
    }
}

/// Normalized log-posteriors for both classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPosteriors {
    pub not_sarcasm: f64,
    pub sarcasm: f64,
}

fn class_gaussian(data: &LabeledMatrix, label: Label) -> ClassGaussian {
    let rows: Vec<&[f64]> = data
        .rows()
        .zip(data.labels())
        .filter(|(_, &l)| l == label)
        .map(|(r, _)| r)
        .collect();
    let n = rows.len() as f64;
    let mut mean = vec![0.0; data.d()];
    for row in &rows {
        for (m, v) in mean.iter_mut().zip(*row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; data.d()];
    for row in &rows {
        for ((s, v), m) in var.iter_mut().zip(*row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    var.iter_mut().for_each(|s| *s /= n);
    ClassGaussian {
        prior: n / data.n() as f64,
        mean,
        var,
    }
}

fn max_feature_variance(data: &LabeledMatrix) -> f64 {
    let n = data.n() as f64;
    (0..data.d())
        .map(|j| {
            let mean = data.rows().map(|r| r[j]).sum::<f64>() / n;
            data.rows().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n
        })
        .fold(0.0, f64::max)
}

pub fn fit_gnb(data: &LabeledMatrix, cfg: &GnbConfig) -> Result<TrainedModel> {
    if !(cfg.var_smoothing > 0.0) {
        return Err(Error::validation("var_smoothing must be positive"));
    }
    data.require_both_classes()?;
    let scaler = cfg.standardize.then(|| super::Scaler::fit(data));
    let scaled = scaler.as_ref().map(|s| data.scaled(s));
    let train = scaled.as_ref().unwrap_or(data);

    // all-constant data has no variance scale to borrow, smooth absolutely
    let epsilon = match cfg.var_smoothing * max_feature_variance(train) {
        e if e > 0.0 => e,
        _ => cfg.var_smoothing,
    };
    let mut not_sarcasm = class_gaussian(train, Label::NotSarcasm);
    let mut sarcasm = class_gaussian(train, Label::Sarcasm);
    for class in [&mut not_sarcasm, &mut sarcasm] {
        class.var.iter_mut().for_each(|v| *v += epsilon);
    }
    Ok(TrainedModel {
        kind: ModelKind::Gnb,
        d: data.d(),
        scaler,
        params: Params::NaiveBayes(GnbParams {
            not_sarcasm,
            sarcasm,
            epsilon,
        }),
        seed: 0,
        train_config: TrainConfig::Gnb(cfg.clone()),
        metadata: BTreeMap::new(),
    })
}

/// Most probable label (ties go to NOT_SARCASM) and both log-posteriors.
pub fn predict_gnb(model: &TrainedModel, x: &[f64]) -> Result<(Label, LogPosteriors)> {
    let Params::NaiveBayes(params) = &model.params else {
        return Err(Error::validation(format!("{} is not a naive Bayes model", model.kind)));
    };
    model.check_dim(x)?;
    let x = model.prepare(x);
    let neg = GnbParams::joint_log_likelihood(&params.not_sarcasm, &x);
    let pos = GnbParams::joint_log_likelihood(&params.sarcasm, &x);
    let top = neg.max(pos);
    let norm = top + ((neg - top).exp() + (pos - top).exp()).ln();
    let label = if pos > neg { Label::Sarcasm } else { Label::NotSarcasm };
    Ok((
        label,
        LogPosteriors {
            not_sarcasm: neg - norm,
            sarcasm: pos - norm,
        },
    ))
}
