//! Random forest of CART trees split on Gini impurity.
//!
//! Each tree draws its own random stream from the forest seed (ChaCha stream
//! number = tree index), so trees can be grown in parallel and the result is
//! identical to growing them one after another.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LabeledMatrix, ModelKind, Params, TrainConfig, TrainedModel};
use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfConfig {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features tried per split; `None` means ⌊√d⌋.
    pub mtry: Option<usize>,
    pub seed: u64,
    pub bootstrap: bool,
}

impl Default for RfConfig {
    fn default() -> Self {
        RfConfig {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            mtry: None,
            seed: 42,
            bootstrap: true,
        }
    }
}

impl RfConfig {
    pub fn resolved_mtry(&self, d: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1))
    }

    fn validate(&self, d: usize) -> Result<()> {
        let mtry = self.resolved_mtry(d);
        if self.n_trees == 0 {
            return Err(Error::validation("n_trees must be at least 1"));
        }
        if self.min_leaf == 0 {
            return Err(Error::validation("min_leaf must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::validation("max_depth must be at least 1"));
        }
        if mtry == 0 || mtry > d {
            return Err(Error::validation(format!("mtry must be in 1..={d}, got {mtry}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// In-bag class counts as `[NOT_SARCASM, SARCASM]`.
    Leaf { counts: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// `nodes[0]` is the root.
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_counts(&self, x: &[f64]) -> [usize; 2] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Majority class of the reached leaf; ties go to NOT_SARCASM.
    pub fn vote(&self, x: &[f64]) -> Label {
        let [neg, pos] = self.leaf_counts(x);
        if pos > neg {
            Label::Sarcasm
        } else {
            Label::NotSarcasm
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    pub(crate) fn validate(&self, d: usize) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::format("forest has no trees"));
        }
        for tree in &self.trees {
            let n = tree.nodes.len();
            if n == 0 {
                return Err(Error::format("tree has no nodes"));
            }
            for (i, node) in tree.nodes.iter().enumerate() {
                if let Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } = node
                {
                    // children always come after their parent, so walks terminate
                    if *feature >= d || !threshold.is_finite() || *left <= i || *right <= i || *left >= n || *right >= n {
                        return Err(Error::format(format!("invalid split node {i}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Fraction of trees voting SARCASM.
    pub fn vote_fraction(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.vote(x) == Label::Sarcasm).count();
        votes as f64 / self.trees.len() as f64
    }
}

/// Random stream for tree `index` of a forest seeded with `seed`.
pub fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Purity of a split as the exact fraction Σ_children (a² + b²) / n, where
/// a and b are the child's class counts. Maximizing it is the same as
/// minimizing the size-weighted Gini impurity, and the integer form keeps
/// ties exact so the first candidate found really does win them.
fn split_purity(left: [usize; 2], right: [usize; 2]) -> (u128, u128) {
    let sq = |c: [usize; 2]| (c[0] as u128).pow(2) + (c[1] as u128).pow(2);
    let (nl, nr) = ((left[0] + left[1]) as u128, (right[0] + right[1]) as u128);
    (sq(left) * nr + sq(right) * nl, nl * nr)
}

fn class_index(label: Label) -> usize {
    match label {
        Label::NotSarcasm => 0,
        Label::Sarcasm => 1,
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    purity: (u128, u128),
    left_size: usize,
}

/// Parameters of a single CART tree.
#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub mtry: usize,
}

/// Grows one CART tree on the rows listed in `sample` (repeats allowed).
///
/// At every node `mtry` distinct features are drawn from `rng`; thresholds
/// are midpoints between consecutive distinct values in the node. The split
/// with the lowest size-weighted child Gini impurity wins, earlier sampled
/// features and smaller thresholds winning exact ties.
pub fn grow_tree(data: &LabeledMatrix, mut sample: Vec<usize>, params: TreeParams, rng: &mut impl Rng) -> Tree {
    struct Task {
        start: usize,
        end: usize,
        depth: usize,
        node: usize,
    }
    let mut nodes = vec![Node::Leaf { counts: [0, 0] }];
    let mut stack = vec![Task {
        start: 0,
        end: sample.len(),
        depth: 0,
        node: 0,
    }];
    let mut pairs: Vec<(f64, usize)> = Vec::new();
    while let Some(task) = stack.pop() {
        let rows = &mut sample[task.start..task.end];
        let mut counts = [0usize; 2];
        for &i in rows.iter() {
            counts[class_index(data.label(i))] += 1;
        }
        let n = rows.len();
        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_reached = params.max_depth.is_some_and(|m| task.depth >= m);
        if pure || depth_reached || n < 2 * params.min_leaf {
            nodes[task.node] = Node::Leaf { counts };
            continue;
        }

        let mut best: Option<BestSplit> = None;
        for feature in index::sample(rng, data.d(), params.mtry).into_iter() {
            pairs.clear();
            pairs.extend(rows.iter().map(|&i| (data.row(i)[feature], class_index(data.label(i)))));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0usize; 2];
            for k in 1..n {
                left[pairs[k - 1].1] += 1;
                let (lo, hi) = (pairs[k - 1].0, pairs[k].0);
                if lo == hi || k < params.min_leaf || n - k < params.min_leaf {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let purity = split_purity(left, right);
                let better = best
                    .as_ref()
                    .is_none_or(|b| purity.0 * b.purity.1 > b.purity.0 * purity.1);
                if better {
                    let mid = lo + (hi - lo) / 2.0;
                    best = Some(BestSplit {
                        feature,
                        threshold: if mid < hi { mid } else { lo },
                        purity,
                        left_size: k,
                    });
                }
            }
        }
        let Some(split) = best else {
            nodes[task.node] = Node::Leaf { counts };
            continue;
        };

        // stable partition: rows going left first, order otherwise preserved
        let (mut go_left, go_right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| data.row(i)[split.feature] <= split.threshold);
        debug_assert_eq!(go_left.len(), split.left_size);
        let left_len = go_left.len();
        go_left.extend(go_right);
        rows.copy_from_slice(&go_left);

        let left_node = nodes.len();
        let right_node = left_node + 1;
        nodes.push(Node::Leaf { counts: [0, 0] });
        nodes.push(Node::Leaf { counts: [0, 0] });
        nodes[task.node] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_node,
            right: right_node,
        };
        let mid = task.start + left_len;
        stack.push(Task {
            start: mid,
            end: task.end,
            depth: task.depth + 1,
            node: right_node,
        });
        stack.push(Task {
            start: task.start,
            end: mid,
            depth: task.depth + 1,
            node: left_node,
        });
    }
    Tree { nodes }
}

/// Grows the forest without the two-class check. Single-class data simply
/// yields single-leaf trees.
pub fn grow_forest(data: &LabeledMatrix, cfg: &RfConfig) -> Result<Forest> {
    cfg.validate(data.d())?;
    let params = TreeParams {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf,
        mtry: cfg.resolved_mtry(data.d()),
    };
    let n = data.n();
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(cfg.seed, t);
            let sample: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(data, sample, params, &mut rng)
        })
        .collect();
    Ok(Forest { trees })
}

pub fn fit_rf(data: &LabeledMatrix, cfg: &RfConfig) -> Result<TrainedModel> {
    cfg.validate(data.d())?;
    data.require_both_classes()?;
    let forest = grow_forest(data, cfg)?;
    Ok(TrainedModel {
        kind: ModelKind::Rf,
        d: data.d(),
        scaler: None,
        params: Params::Forest(forest),
        seed: cfg.seed,
        train_config: TrainConfig::Rf(cfg.clone()),
        metadata: BTreeMap::new(),
    })
}

/// Majority vote (ties go to NOT_SARCASM) and the SARCASM vote fraction.
pub fn predict_rf(model: &TrainedModel, x: &[f64]) -> Result<(Label, f64)> {
    let Params::Forest(forest) = &model.params else {
        return Err(Error::validation(format!("{} is not a random forest", model.kind)));
    };
    model.check_dim(x)?;
    let fraction = forest.vote_fraction(x);
    let label = if fraction > 0.5 { Label::Sarcasm } else { Label::NotSarcasm };
    Ok((label, fraction))
}
