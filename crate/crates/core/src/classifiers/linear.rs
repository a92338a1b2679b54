//! Logistic regression and a linear SVM.
//!
//! Logistic regression minimizes
//! `mean_i log(1 + exp(-y_i (w·x_i + b))) + (l2/2)‖w‖²`
//! by full-batch gradient descent. The step for epoch `t` starts at
//! `lr0 / (1 + t)` and is halved until the objective decreases sufficiently
//! (Armijo), so the objective never increases. Training stops after `epochs`
//! steps or once the gradient's ∞-norm drops below `tol`.
//!
//! The SVM minimizes `(λ/2)‖w‖² + mean_i max(0, 1 - y_i (w·x_i + b))` with
//! per-example subgradient steps over seeded shuffles of the data. The step
//! size is `1 / (λ (t0 + t))` with `t0 = 1 / (λ η0)` and `η0 = λ^(-1/4)`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LabeledMatrix, ModelKind, Params, Prediction, Scaler, TrainConfig, TrainedModel};
use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearParams {
    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrConfig {
    pub lr0: f64,
    pub epochs: usize,
    pub l2: f64,
    pub tol: f64,
    pub seed: u64,
    pub standardize: bool,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            lr0: 0.1,
            epochs: 500,
            l2: 1e-4,
            tol: 1e-6,
            seed: 42,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LsvcConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub standardize: bool,
}

impl Default for LsvcConfig {
    fn default() -> Self {
        LsvcConfig {
            lambda: 1e-4,
            epochs: 50,
            seed: 42,
            standardize: true,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `log(1 + exp(-z))` without overflow.
fn log1p_exp_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `1 / (1 + exp(z))`.
fn sigmoid_neg(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

pub fn sigmoid(z: f64) -> f64 {
    sigmoid_neg(-z)
}

/// Regularized mean log-loss.
pub fn logistic_objective(params: &LinearParams, data: &LabeledMatrix, l2: f64) -> f64 {
    let loss: f64 = data
        .rows()
        .zip(data.labels())
        .map(|(x, y)| log1p_exp_neg(y.sign() * params.score(x)))
        .sum();
    loss / data.n() as f64 + 0.5 * l2 * dot(&params.weights, &params.weights)
}

/// Objective value and gradient with respect to (w, b).
pub fn logistic_gradient(params: &LinearParams, data: &LabeledMatrix, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = data.n() as f64;
    let mut grad_w = vec![0.0; data.d()];
    let mut grad_b = 0.0;
    let mut loss = 0.0;
    for (x, y) in data.rows().zip(data.labels()) {
        let y = y.sign();
        let margin = y * params.score(x);
        loss += log1p_exp_neg(margin);
        let coeff = -y * sigmoid_neg(margin);
        for (g, v) in grad_w.iter_mut().zip(x) {
            *g += coeff * v;
        }
        grad_b += coeff;
    }
    for (g, w) in grad_w.iter_mut().zip(&params.weights) {
        *g = *g / n + l2 * w;
    }
    let objective = loss / n + 0.5 * l2 * dot(&params.weights, &params.weights);
    (objective, grad_w, grad_b / n)
}

/// Regularized mean hinge loss.
pub fn hinge_objective(params: &LinearParams, data: &LabeledMatrix, lambda: f64) -> f64 {
    let loss: f64 = data
        .rows()
        .zip(data.labels())
        .map(|(x, y)| (1.0 - y.sign() * params.score(x)).max(0.0))
        .sum();
    loss / data.n() as f64 + 0.5 * lambda * dot(&params.weights, &params.weights)
}

/// A subgradient of [`hinge_objective`]; the gradient wherever no margin is exactly 1.
pub fn hinge_subgradient(params: &LinearParams, data: &LabeledMatrix, lambda: f64) -> (Vec<f64>, f64) {
    let n = data.n() as f64;
    let mut grad_w = vec![0.0; data.d()];
    let mut grad_b = 0.0;
    for (x, y) in data.rows().zip(data.labels()) {
        let y = y.sign();
        if y * params.score(x) < 1.0 {
            for (g, v) in grad_w.iter_mut().zip(x) {
                *g -= y * v;
            }
            grad_b -= y;
        }
    }
    for (g, w) in grad_w.iter_mut().zip(&params.weights) {
        *g = *g / n + lambda * w;
    }
    (grad_w, grad_b / n)
}

fn prepare(data: &LabeledMatrix, standardize: bool) -> (Option<Scaler>, Option<LabeledMatrix>) {
    if standardize {
        let scaler = Scaler::fit(data);
        let scaled = data.scaled(&scaler);
        (Some(scaler), Some(scaled))
    } else {
        (None, None)
    }
}

fn check_finite(params: &LinearParams) -> Result<()> {
    if params.bias.is_finite() && params.weights.iter().all(|w| w.is_finite()) {
        Ok(())
    } else {
        Err(Error::validation("training diverged to non-finite weights"))
    }
}

/// Per-epoch objective values recorded by [`fit_lr_traced`].
pub type ObjectiveTrace = Vec<f64>;

pub fn fit_lr(data: &LabeledMatrix, cfg: &LrConfig) -> Result<TrainedModel> {
    fit_lr_traced(data, cfg).map(|(model, _)| model)
}

/// Fits logistic regression and returns the objective after every accepted step.
pub fn fit_lr_traced(data: &LabeledMatrix, cfg: &LrConfig) -> Result<(TrainedModel, ObjectiveTrace)> {
    if !(cfg.lr0 > 0.0) || !(cfg.l2 >= 0.0) || !(cfg.tol >= 0.0) {
        return Err(Error::validation("LR needs lr0 > 0, l2 ≥ 0 and tol ≥ 0"));
    }
    data.require_both_classes()?;
    let (scaler, scaled) = prepare(data, cfg.standardize);
    let train = scaled.as_ref().unwrap_or(data);

    let mut params = LinearParams {
        weights: vec![0.0; train.d()],
        bias: 0.0,
    };
    let (mut objective, mut grad_w, mut grad_b) = logistic_gradient(&params, train, cfg.l2);
    let mut trace = vec![objective];
    for epoch in 0..cfg.epochs {
        let inf_norm = grad_w.iter().fold(grad_b.abs(), |m, g| m.max(g.abs()));
        if inf_norm < cfg.tol {
            break;
        }
        let grad_sq = dot(&grad_w, &grad_w) + grad_b * grad_b;
        let mut step = cfg.lr0 / (1.0 + epoch as f64);
        let accepted = loop {
            let candidate = LinearParams {
                weights: params
                    .weights
                    .iter()
                    .zip(&grad_w)
                    .map(|(w, g)| w - step * g)
                    .collect(),
                bias: params.bias - step * grad_b,
            };
            let value = logistic_objective(&candidate, train, cfg.l2);
            if value <= objective - 1e-4 * step * grad_sq {
                break Some(candidate);
            }
            step *= 0.5;
            if step < 1e-16 {
                break None;
            }
        };
        let Some(next) = accepted else {
            // no descent possible at machine precision
            break;
        };
        params = next;
        (objective, grad_w, grad_b) = logistic_gradient(&params, train, cfg.l2);
        trace.push(objective);
    }
    check_finite(&params)?;
    let model = TrainedModel {
        kind: ModelKind::Lr,
        d: data.d(),
        scaler,
        params: Params::Linear(params),
        seed: cfg.seed,
        train_config: TrainConfig::Lr(cfg.clone()),
        metadata: BTreeMap::new(),
    };
    Ok((model, trace))
}

pub fn fit_lsvc(data: &LabeledMatrix, cfg: &LsvcConfig) -> Result<TrainedModel> {
    if !(cfg.lambda > 0.0) {
        return Err(Error::validation("LSVC needs lambda > 0"));
    }
    data.require_both_classes()?;
    let (scaler, scaled) = prepare(data, cfg.standardize);
    let train = scaled.as_ref().unwrap_or(data);

    let lambda = cfg.lambda;
    let eta0 = lambda.powf(-0.25);
    let t0 = 1.0 / (lambda * eta0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train.n()).collect();
    let mut weights = vec![0.0; train.d()];
    let mut bias = 0.0;
    let mut t = 0.0;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1.0;
            let eta = 1.0 / (lambda * (t0 + t));
            let x = train.row(i);
            let y = train.label(i).sign();
            let margin = y * (dot(&weights, x) + bias);
            let shrink = 1.0 - eta * lambda;
            weights.iter_mut().for_each(|w| *w *= shrink);
            if margin < 1.0 {
                for (w, v) in weights.iter_mut().zip(x) {
                    *w += eta * y * v;
                }
                bias += eta * y;
            }
        }
    }
    let params = LinearParams { weights, bias };
    check_finite(&params)?;
    Ok(TrainedModel {
        kind: ModelKind::Lsvc,
        d: data.d(),
        scaler,
        params: Params::Linear(params),
        seed: cfg.seed,
        train_config: TrainConfig::Lsvc(cfg.clone()),
        metadata: BTreeMap::new(),
    })
}

/// Label and score `w·scale(x) + b`; LR models also report `σ(score)`.
pub fn predict_linear(model: &TrainedModel, x: &[f64]) -> Result<Prediction> {
    let Params::Linear(params) = &model.params else {
        return Err(Error::validation(format!("{} is not a linear model", model.kind)));
    };
    model.check_dim(x)?;
    let score = params.score(&model.prepare(x));
    Ok(Prediction {
        label: Label::from_score(score),
        score,
        probability: (model.kind == ModelKind::Lr).then(|| sigmoid(score)),
    })
}
