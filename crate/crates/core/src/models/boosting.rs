//! Least-squares gradient boosting with leaf-wise regression trees.
//!
//! Trees grow best-gain-first up to `num_leaves` leaves and `max_depth`
//! levels; leaf values and split gains include L1 (`reg_alpha`) and L2
//! (`reg_lambda`) penalties in the usual second-order form.

use serde::{Deserialize, Serialize};

use super::{require_len, rmse, Family, ModelError};

/// Lagged values used as features; the time index is appended.
pub const LAGS: usize = 5;
/// Minimum rows per leaf.
pub const MIN_DATA_IN_LEAF: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoosterParams {
    pub num_leaves: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub reg_alpha: f64,
    pub reg_lambda: f64,
}

impl Default for BoosterParams {
    fn default() -> Self {
        BoosterParams {
            num_leaves: 31,
            max_depth: 5,
            learning_rate: 0.1,
            n_estimators: 100,
            reg_alpha: 0.1,
            reg_lambda: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

fn soft_threshold(g: f64, alpha: f64) -> f64 {
    g.signum() * (g.abs() - alpha).max(0.0)
}

fn leaf_score(g: f64, h: f64, p: &BoosterParams) -> f64 {
    let t = soft_threshold(g, p.reg_alpha);
    t * t / (h + p.reg_lambda)
}

fn leaf_value(g: f64, h: f64, p: &BoosterParams) -> f64 {
    -soft_threshold(g, p.reg_alpha) / (h + p.reg_lambda)
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn best_split(x: &[Vec<f64>], grad: &[f64], rows: &[usize], p: &BoosterParams) -> Option<Candidate> {
    let n = rows.len();
    if n < 2 * MIN_DATA_IN_LEAF {
        return None;
    }
    let g_total: f64 = rows.iter().map(|&r| grad[r]).sum();
    let parent = leaf_score(g_total, n as f64, p);
    let mut best: Option<(f64, usize, f64)> = None;
    let nfeat = x[rows[0]].len();
    let mut order = rows.to_vec();
    for f in 0..nfeat {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut g_left = 0.0;
        for k in 0..n - 1 {
            g_left += grad[order[k]];
            let n_left = k + 1;
            if n_left < MIN_DATA_IN_LEAF || n - n_left < MIN_DATA_IN_LEAF {
                continue;
            }
            let (lo, hi) = (x[order[k]][f], x[order[k + 1]][f]);
            if lo == hi {
                continue;
            }
            let gain = leaf_score(g_left, n_left as f64, p) + leaf_score(g_total - g_left, (n - n_left) as f64, p) - parent;
            if gain > 1e-12 && best.is_none_or(|(bg, _, _)| gain > bg) {
                best = Some((gain, f, 0.5 * (lo + hi)));
            }
        }
    }
    let (gain, feature, threshold) = best?;
    let (left, right) = rows.iter().partition(|&&r| x[r][feature] <= threshold);
    Some(Candidate {
        gain,
        feature,
        threshold,
        left,
        right,
    })
}

fn grow_tree(x: &[Vec<f64>], grad: &[f64], p: &BoosterParams) -> Tree {
    struct Open {
        node: usize,
        depth: usize,
        split: Option<Candidate>,
    }
    let all: Vec<usize> = (0..x.len()).collect();
    let g: f64 = grad.iter().sum();
    let mut nodes = vec![Node::Leaf(leaf_value(g, all.len() as f64, p))];
    let candidate = |rows: &[usize], depth: usize| {
        if depth < p.max_depth {
            best_split(x, grad, rows, p)
        } else {
            None
        }
    };
    let mut open = vec![Open {
        node: 0,
        depth: 0,
        split: candidate(&all, 0),
    }];
    let mut leaves = 1;
    while leaves < p.num_leaves {
        let pick = open
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.split.as_ref().map(|c| (i, c.gain)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((idx, _)) = pick else { break };
        let leaf = open.swap_remove(idx);
        let c = leaf.split.expect("picked leaf has a split");
        let mut child = |rows: Vec<usize>| {
            let g: f64 = rows.iter().map(|&r| grad[r]).sum();
            nodes.push(Node::Leaf(leaf_value(g, rows.len() as f64, p)));
            let id = nodes.len() - 1;
            open.push(Open {
                node: id,
                depth: leaf.depth + 1,
                split: candidate(&rows, leaf.depth + 1),
            });
            id
        };
        let left = child(c.left);
        let right = child(c.right);
        nodes[leaf.node] = Node::Split {
            feature: c.feature,
            threshold: c.threshold,
            left,
            right,
        };
        leaves += 1;
    }
    Tree { nodes }
}

/// A boosted ensemble on arbitrary feature rows.
#[derive(Debug, Clone)]
pub struct GradientBooster {
    params: BoosterParams,
    base: f64,
    trees: Vec<Tree>,
}

impl GradientBooster {
    pub fn train(x: &[Vec<f64>], y: &[f64], params: &BoosterParams) -> Self {
        let base = y.iter().sum::<f64>() / y.len().max(1) as f64;
        let mut pred = vec![base; y.len()];
        let mut trees = Vec::with_capacity(params.n_estimators);
        for _ in 0..params.n_estimators {
            let grad: Vec<f64> = pred.iter().zip(y).map(|(p, t)| p - t).collect();
            let tree = grow_tree(x, &grad, params);
            for (p, row) in pred.iter_mut().zip(x) {
                *p += params.learning_rate * tree.predict(row);
            }
            trees.push(tree);
        }
        GradientBooster {
            params: *params,
            base,
            trees,
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base + self.params.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// Training MSE after each boosting round.
    pub fn staged_mse(&self, x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let mut pred = vec![self.base; y.len()];
        self.trees
            .iter()
            .map(|tree| {
                for (p, row) in pred.iter_mut().zip(x) {
                    *p += self.params.learning_rate * tree.predict(row);
                }
                pred.iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / y.len() as f64
            })
            .collect()
    }
}

/// Feature row for predicting index `i` from the values before it.
pub(crate) fn feature_row(y: &[f64], i: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (1..=LAGS).map(|k| y[i - k]).collect();
    row.push(i as f64);
    row
}

/// Lag-feature matrix and targets for a series.
pub(crate) fn lag_matrix(y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x = (LAGS..y.len()).map(|i| feature_row(y, i)).collect();
    (x, y[LAGS..].to_vec())
}

#[derive(Debug, Clone)]
pub(crate) struct BoostingFit {
    model: GradientBooster,
    history: Vec<f64>,
    pub rmse: f64,
}

pub(crate) fn fit(y: &[f64], params: &BoosterParams) -> Result<BoostingFit, ModelError> {
    if params.num_leaves < 2 || params.n_estimators == 0 || params.learning_rate <= 0.0 {
        return Err(ModelError::InvalidSpec(format!("booster params {params:?}")));
    }
    require_len(Family::GradientBoosting, LAGS + 10, y.len())?;
    let (x, target) = lag_matrix(y);
    let model = GradientBooster::train(&x, &target, params);
    let residuals: Vec<f64> = x.iter().zip(&target).map(|(r, t)| t - model.predict(r)).collect();
    Ok(BoostingFit {
        model,
        history: y.to_vec(),
        rmse: rmse(&residuals),
    })
}

impl BoostingFit {
    pub fn forecast(&self, h: usize) -> Vec<f64> {
        let mut ext = self.history.clone();
        let n = ext.len();
        for i in n..n + h {
            let v = self.model.predict(&feature_row(&ext, i));
            ext.push(v);
        }
        ext[n..].to_vec()
    }
}
