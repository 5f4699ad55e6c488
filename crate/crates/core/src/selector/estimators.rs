//! Classifiers and transforms used by the two selection pipelines.
//!
//! Semantics follow the reference Python toolchain the pipelines were
//! exported from: classes are the sorted distinct training labels, predicted
//! class is the first class of maximal probability, and probabilities are
//! normalised per row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major sample matrix.
pub type Rows = Vec<Vec<f64>>;

pub(crate) fn check_shape(x: &[Vec<f64>], cols: usize) -> Result<()> {
    match x.iter().position(|r| r.len() != cols) {
        Some(i) => Err(Error::validation(format!("row {i} has {} columns, expected {cols}", x[i].len()))),
        None => Ok(()),
    }
}

fn check_fit_input(x: &[Vec<f64>], y: &[usize]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::validation("cannot fit on an empty training set"));
    }
    if x.len() != y.len() {
        return Err(Error::validation(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let cols = x[0].len();
    check_shape(x, cols)?;
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::validation("training data contains non-finite values"));
    }
    Ok(cols)
}

/// Sorted distinct labels and each sample's index into them.
pub fn encode_classes(y: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let idx = y.iter().map(|l| classes.binary_search(l).unwrap()).collect();
    (classes, idx)
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

fn softmax_rows(jll: Vec<Vec<f64>>) -> Rows {
    jll.into_iter()
        .map(|row| {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            row.iter().map(|v| (v - lse).exp()).collect()
        })
        .collect()
}

/// k-nearest neighbours with Manhattan distance and uniform weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KNeighbors {
    pub k: usize,
    pub classes: Vec<usize>,
    pub train_x: Rows,
    pub train_y: Vec<usize>,
}

impl KNeighbors {
    /// `k` is clamped to `n - 1` (at least 1) when the training set is small.
    pub fn fit(x: &[Vec<f64>], y: &[usize], k: usize) -> Result<Self> {
        check_fit_input(x, y)?;
        if k == 0 {
            return Err(Error::validation("k must be positive"));
        }
        let limit = (x.len() - 1).max(1);
        let k_eff = k.min(limit);
        if k_eff < k {
            log::debug!("k-NN: k={k} clamped to {k_eff} for {} training rows", x.len());
        }
        let (classes, train_y) = encode_classes(y);
        Ok(KNeighbors { k: k_eff, classes, train_x: x.to_vec(), train_y })
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        check_shape(x, self.train_x[0].len())?;
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(self.train_x.len());
        Ok(x
            .iter()
            .map(|row| {
                order.clear();
                order.extend(self.train_x.iter().enumerate().map(|(i, t)| {
                    (t.iter().zip(row).map(|(a, b)| (a - b).abs()).sum::<f64>(), i)
                }));
                order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut p = vec![0.0; self.classes.len()];
                for &(_, i) in &order[..self.k] {
                    p[self.train_y[i]] += 1.0;
                }
                p.iter_mut().for_each(|v| *v /= self.k as f64);
                p
            })
            .collect())
    }
}

/// Multinomial naive Bayes with additive smoothing and uniform class priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialNb {
    pub alpha: f64,
    pub classes: Vec<usize>,
    pub feature_log_prob: Rows,
    pub class_log_prior: Vec<f64>,
}

fn check_non_negative(x: &[Vec<f64>]) -> Result<()> {
    if x.iter().flatten().any(|&v| v < 0.0) {
        return Err(Error::validation("multinomial naive Bayes input must be non-negative"));
    }
    Ok(())
}

impl MultinomialNb {
    pub fn fit(x: &[Vec<f64>], y: &[usize], alpha: f64) -> Result<Self> {
        let cols = check_fit_input(x, y)?;
        check_non_negative(x)?;
        let (classes, idx) = encode_classes(y);
        let mut counts = vec![vec![alpha; cols]; classes.len()];
        for (row, &c) in x.iter().zip(&idx) {
            for (acc, v) in counts[c].iter_mut().zip(row) {
                *acc += v;
            }
        }
        let feature_log_prob = counts
            .into_iter()
            .map(|row| {
                let total = row.iter().sum::<f64>().ln();
                row.iter().map(|v| v.ln() - total).collect()
            })
            .collect();
        let prior = -(classes.len() as f64).ln();
        Ok(MultinomialNb { alpha, class_log_prior: vec![prior; classes.len()], classes, feature_log_prob })
    }

    pub fn joint_log_likelihood(&self, x: &[Vec<f64>]) -> Result<Rows> {
        check_shape(x, self.feature_log_prob[0].len())?;
        check_non_negative(x)?;
        Ok(x.iter()
            .map(|row| {
                self.feature_log_prob
                    .iter()
                    .zip(&self.class_log_prior)
                    .map(|(flp, prior)| prior + row.iter().zip(flp).map(|(a, b)| a * b).sum::<f64>())
                    .collect()
            })
            .collect())
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        Ok(softmax_rows(self.joint_log_likelihood(x)?))
    }
}

/// Bernoulli naive Bayes on `x > threshold` indicators, uniform class priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliNb {
    pub alpha: f64,
    pub binarize: f64,
    pub classes: Vec<usize>,
    pub feature_log_prob: Rows,
    pub neg_log_prob: Rows,
    pub class_log_prior: Vec<f64>,
}

impl BernoulliNb {
    pub fn fit(x: &[Vec<f64>], y: &[usize], alpha: f64, binarize: f64) -> Result<Self> {
        let cols = check_fit_input(x, y)?;
        let (classes, idx) = encode_classes(y);
        let mut ones = vec![vec![0.0; cols]; classes.len()];
        let mut count = vec![0.0; classes.len()];
        for (row, &c) in x.iter().zip(&idx) {
            count[c] += 1.0;
            for (acc, &v) in ones[c].iter_mut().zip(row) {
                if v > binarize {
                    *acc += 1.0;
                }
            }
        }
        let probs: Vec<Vec<f64>> = ones
            .iter()
            .zip(&count)
            .map(|(row, n)| row.iter().map(|o| (o + alpha) / (n + 2.0 * alpha)).collect())
            .collect();
        let prior = -(classes.len() as f64).ln();
        Ok(BernoulliNb {
            alpha,
            binarize,
            feature_log_prob: probs.iter().map(|r| r.iter().map(|p| p.ln()).collect()).collect(),
            neg_log_prob: probs.iter().map(|r| r.iter().map(|p| (1.0 - p).ln()).collect()).collect(),
            class_log_prior: vec![prior; classes.len()],
            classes,
        })
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        check_shape(x, self.feature_log_prob[0].len())?;
        let jll = x
            .iter()
            .map(|row| {
                (0..self.classes.len())
                    .map(|c| {
                        let mut s = self.class_log_prior[c];
                        for (j, &v) in row.iter().enumerate() {
                            s += if v > self.binarize {
                                self.feature_log_prob[c][j]
                            } else {
                                self.neg_log_prob[c][j]
                            };
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        Ok(softmax_rows(jll))
    }
}

/// Gaussian naive Bayes with empirical priors and variance smoothing
/// `1e-9 * max feature variance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub classes: Vec<usize>,
    pub theta: Rows,
    pub var: Rows,
    pub class_prior: Vec<f64>,
    pub epsilon: f64,
}

pub const GAUSSIAN_VAR_SMOOTHING: f64 = 1e-9;

impl GaussianNb {
    pub fn fit(x: &[Vec<f64>], y: &[usize]) -> Result<Self> {
        let cols = check_fit_input(x, y)?;
        let (classes, idx) = encode_classes(y);
        let n = x.len() as f64;
        let max_var = (0..cols)
            .map(|j| {
                let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
                x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n
            })
            .fold(0.0, f64::max);
        let epsilon = GAUSSIAN_VAR_SMOOTHING * max_var;
        let k = classes.len();
        let mut count = vec![0.0; k];
        let mut theta = vec![vec![0.0; cols]; k];
        for (row, &c) in x.iter().zip(&idx) {
            count[c] += 1.0;
            for (t, v) in theta[c].iter_mut().zip(row) {
                *t += v;
            }
        }
        for (t, n_c) in theta.iter_mut().zip(&count) {
            t.iter_mut().for_each(|v| *v /= n_c);
        }
        let mut var = vec![vec![0.0; cols]; k];
        for (row, &c) in x.iter().zip(&idx) {
            for j in 0..cols {
                var[c][j] += (row[j] - theta[c][j]).powi(2);
            }
        }
        for (v, n_c) in var.iter_mut().zip(&count) {
            v.iter_mut().for_each(|s| *s = *s / n_c + epsilon);
        }
        if var.iter().flatten().any(|&v| v <= 0.0) {
            return Err(Error::numerical("Gaussian naive Bayes: zero variance with zero smoothing"));
        }
        Ok(GaussianNb { classes, theta, var, class_prior: count.iter().map(|c| c / n).collect(), epsilon })
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        check_shape(x, self.theta[0].len())?;
        let two_pi = 2.0 * std::f64::consts::PI;
        let jll = x
            .iter()
            .map(|row| {
                (0..self.classes.len())
                    .map(|c| {
                        let mut s = self.class_prior[c].ln();
                        for (j, &v) in row.iter().enumerate() {
                            let var = self.var[c][j];
                            s -= 0.5 * (two_pi * var).ln() + 0.5 * (v - self.theta[c][j]).powi(2) / var;
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        Ok(softmax_rows(jll))
    }
}

/// Hyperparameters of [`DecisionTree`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    /// `None` for a leaf.
    pub feature: Option<usize>,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
    /// Class fractions of the training samples reaching this node.
    pub value: Vec<f64>,
    pub samples: usize,
    pub impurity: f64,
}

/// Entropy-criterion decision tree with best-first-by-feature exhaustive splits.
///
/// Inputs are rounded to single precision before comparison, as the reference
/// implementation does; thresholds are midpoints of consecutive distinct
/// values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub params: TreeParams,
    pub classes: Vec<usize>,
    pub n_features: usize,
    pub nodes: Vec<TreeNode>,
}

const FEATURE_THRESHOLD: f64 = 1e-7;

/// Entropy in bits of a vector of class counts.
pub fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    -counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            p * p.log2()
        })
        .sum::<f64>()
}

impl DecisionTree {
    pub fn fit(x: &[Vec<f64>], y: &[usize], params: TreeParams) -> Result<Self> {
        let cols = check_fit_input(x, y)?;
        if params.min_samples_leaf == 0 || params.min_samples_split < 2 {
            return Err(Error::validation("min_samples_leaf >= 1 and min_samples_split >= 2 required"));
        }
        let (classes, idx) = encode_classes(y);
        let xf: Rows = x.iter().map(|r| r.iter().map(|&v| v as f32 as f64).collect()).collect();
        let mut tree = DecisionTree { params, classes, n_features: cols, nodes: Vec::new() };
        let samples: Vec<usize> = (0..x.len()).collect();
        tree.grow(&xf, &idx, samples, 0);
        Ok(tree)
    }

    fn grow(&mut self, x: &[Vec<f64>], y: &[usize], samples: Vec<usize>, depth: usize) -> usize {
        let k = self.classes.len();
        let mut counts = vec![0.0; k];
        for &s in &samples {
            counts[y[s]] += 1.0;
        }
        let n = samples.len();
        let impurity = entropy(&counts);
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            feature: None,
            threshold: 0.0,
            left: 0,
            right: 0,
            value: counts.iter().map(|c| c / n as f64).collect(),
            samples: n,
            impurity,
        });
        let p = self.params;
        if depth >= p.max_depth || n < p.min_samples_split || n < 2 * p.min_samples_leaf || impurity <= f64::EPSILON {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(x, y, &samples, &counts) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&s| x[s][feature] <= threshold);
        let left = self.grow(x, y, l, depth + 1);
        let right = self.grow(x, y, r, depth + 1);
        let node = &mut self.nodes[id];
        node.feature = Some(feature);
        node.threshold = threshold;
        node.left = left;
        node.right = right;
        id
    }

    fn best_split(&self, x: &[Vec<f64>], y: &[usize], samples: &[usize], counts: &[f64]) -> Option<(usize, f64)> {
        let min_leaf = self.params.min_samples_leaf;
        let n = samples.len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order = samples.to_vec();
        #[allow(clippy::needless_range_loop)]
        for f in 0..self.n_features {
            order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]));
            if x[order[n - 1]][f] <= x[order[0]][f] + FEATURE_THRESHOLD {
                continue;
            }
            let mut left = vec![0.0; counts.len()];
            for pos in 1..n {
                left[y[order[pos - 1]]] += 1.0;
                let (lo, hi) = (x[order[pos - 1]][f], x[order[pos]][f]);
                if hi <= lo + FEATURE_THRESHOLD || pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let right: Vec<f64> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                let proxy = -(pos as f64) * entropy(&left) - ((n - pos) as f64) * entropy(&right);
                if best.is_none_or(|(b, _, _)| proxy > b) {
                    let mut threshold = lo / 2.0 + hi / 2.0;
                    if threshold == hi || !threshold.is_finite() {
                        threshold = lo;
                    }
                    best = Some((proxy, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn leaf(&self, row: &[f64]) -> &TreeNode {
        let mut node = &self.nodes[0];
        while let Some(f) = node.feature {
            let v = row[f] as f32 as f64;
            node = &self.nodes[if v <= node.threshold { node.left } else { node.right }];
        }
        node
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        check_shape(x, self.n_features)?;
        Ok(x.iter().map(|r| self.leaf(r).value.clone()).collect())
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.feature.is_none()).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i].feature {
                None => 0,
                Some(_) => 1 + walk(t, t.nodes[i].left).max(walk(t, t.nodes[i].right)),
            }
        }
        walk(self, 0)
    }
}

/// Scales each row to unit Euclidean norm; zero rows are left unchanged.
pub fn l2_normalize(x: &[Vec<f64>]) -> Rows {
    x.iter()
        .map(|r| {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                r.clone()
            } else {
                r.iter().map(|v| v / norm).collect()
            }
        })
        .collect()
}

/// 1 where `x > threshold`, else 0.
pub fn binarize(x: &[Vec<f64>], threshold: f64) -> Rows {
    x.iter()
        .map(|r| r.iter().map(|&v| if v > threshold { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// One-way ANOVA F statistic of every column against the labels.
///
/// A column constant across all samples scores 0; one constant within every
/// class but not overall scores `+inf`.
pub fn f_classif(x: &[Vec<f64>], y: &[usize]) -> Result<Vec<f64>> {
    let cols = check_fit_input(x, y)?;
    let (classes, idx) = encode_classes(y);
    let k = classes.len();
    let n = x.len();
    if k < 2 || n <= k {
        return Err(Error::validation("ANOVA F needs at least two classes and more samples than classes"));
    }
    let mut count = vec![0.0; k];
    for &c in &idx {
        count[c] += 1.0;
    }
    Ok((0..cols)
        .map(|j| {
            let grand = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            let mut class_mean = vec![0.0; k];
            for (r, &c) in x.iter().zip(&idx) {
                class_mean[c] += r[j];
            }
            class_mean.iter_mut().zip(&count).for_each(|(m, c)| *m /= c);
            let between: f64 = class_mean.iter().zip(&count).map(|(m, c)| c * (m - grand).powi(2)).sum();
            let within: f64 = x.iter().zip(&idx).map(|(r, &c)| (r[j] - class_mean[c]).powi(2)).sum();
            if between == 0.0 {
                0.0
            } else if within == 0.0 {
                f64::INFINITY
            } else {
                (between / (k - 1) as f64) / (within / (n - k) as f64)
            }
        })
        .collect())
}

/// Columns kept by a percentile filter: strictly above the linear-interpolated
/// `(100 - percentile)`-th score percentile, then tied columns in index order
/// until `floor(cols * percentile / 100)` are kept.
pub fn select_percentile_mask(scores: &[f64], percentile: f64) -> Vec<bool> {
    let m = scores.len();
    if percentile >= 100.0 {
        return vec![true; m];
    }
    if percentile <= 0.0 || m == 0 {
        return vec![false; m];
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (100.0 - percentile) / 100.0 * (m - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    // Same rounding as numpy's linear percentile.
    let (a, b, t) = (sorted[lo], sorted[hi], pos - lo as f64);
    let threshold = if a == b {
        a
    } else if t >= 0.5 {
        b - (b - a) * (1.0 - t)
    } else {
        a + (b - a) * t
    };
    let mut mask: Vec<bool> = scores.iter().map(|&s| s > threshold).collect();
    let max_feats = (m as f64 * percentile / 100.0) as usize;
    let mut room = max_feats.saturating_sub(mask.iter().filter(|&&b| b).count());
    for (i, &s) in scores.iter().enumerate() {
        if room == 0 {
            break;
        }
        if s == threshold {
            mask[i] = true;
            room -= 1;
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_are_sorted() {
        let (c, i) = encode_classes(&[3, 1, 3, 2]);
        assert_eq!(c, vec![1, 2, 3]);
        assert_eq!(i, vec![2, 0, 2, 1]);
    }

    #[test]
    fn knn_k1_reproduces_training_labels() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 3.0]];
        let y = [0, 1, 1, 0];
        let m = KNeighbors::fit(&x, &y, 1).unwrap();
        let p = m.predict_proba(&x).unwrap();
        let pred: Vec<usize> = p.iter().map(|r| m.classes[argmax(r)]).collect();
        assert_eq!(pred, y);
    }

    #[test]
    fn knn_clamps_k() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert_eq!(KNeighbors::fit(&x, &[0, 1, 1], 41).unwrap().k, 2);
    }

    #[test]
    fn multinomial_rejects_negative_input() {
        let x = vec![vec![1.0], vec![-0.5]];
        assert!(MultinomialNb::fit(&x, &[0, 1], 0.1).is_err());
    }

    #[test]
    fn tree_on_threshold_data() {
        let x: Rows = (0..40).map(|i| vec![i as f64, 0.0]).collect();
        let y: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let params = TreeParams { max_depth: 2, min_samples_leaf: 13, min_samples_split: 9 };
        let t = DecisionTree::fit(&x, &y, params).unwrap();
        assert_eq!(t.nodes[0].feature, Some(0));
        assert_eq!(t.nodes[0].threshold, 19.5);
        assert!(t.n_leaves() <= 4);
        let p = t.predict_proba(&[vec![3.0, 0.0], vec![30.0, 0.0]]).unwrap();
        assert_eq!(p, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn percentile_mask_ties() {
        // 20 columns, 95% keeps 19: the single lowest score is dropped.
        let mut scores: Vec<f64> = (0..20).map(|i| i as f64).collect();
        scores[7] = -1.0;
        let mask = select_percentile_mask(&scores, 95.0);
        assert_eq!(mask.iter().filter(|&&b| b).count(), 19);
        assert!(!mask[7]);
        // All equal: ties fill up to the limit in index order.
        let mask = select_percentile_mask(&[1.0; 4], 50.0);
        assert_eq!(mask, vec![true, true, false, false]);
    }

    #[test]
    fn f_classif_constant_columns() {
        let x = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 1.0]];
        let f = f_classif(&x, &[0, 0, 1, 1]).unwrap();
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], f64::INFINITY);
    }
}
