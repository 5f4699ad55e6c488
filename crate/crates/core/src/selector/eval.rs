//! Cross-validation and model inspection.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimators::{encode_classes, Rows};
use super::pipeline::{fit_pipeline, FittedPipeline, PipelineSpec};
use crate::error::{Error, Result};
use crate::{rng, stats};

/// Mean recall over the classes present in `y_true`.
pub fn balanced_accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.len() != y_pred.len() || y_true.is_empty() {
        return Err(Error::validation("balanced accuracy needs equal-length, non-empty label vectors"));
    }
    let (classes, _) = encode_classes(y_true);
    let recalls: Vec<f64> = classes.iter().map(|&c| recall(y_true, y_pred, c)).collect();
    Ok(stats::mean(&recalls))
}

/// Fraction of samples of class `c` predicted as `c`; `NaN` when `c` is absent.
pub fn recall(y_true: &[usize], y_pred: &[usize], c: usize) -> f64 {
    let (mut hit, mut total) = (0usize, 0usize);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t == c {
            total += 1;
            hit += usize::from(p == c);
        }
    }
    hit as f64 / total as f64
}

/// `m[i][j]` counts samples of `classes[i]` predicted as `classes[j]`.
pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], classes: &[usize]) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; classes.len()]; classes.len()];
    for (t, p) in y_true.iter().zip(y_pred) {
        if let (Some(i), Some(j)) = (classes.iter().position(|c| c == t), classes.iter().position(|c| c == p)) {
            m[i][j] += 1;
        }
    }
    m
}

/// Fold index of every sample.
///
/// Members of each class are shuffled with a seeded generator and dealt
/// round-robin; the dealing position carries over from one class to the next
/// so fold sizes stay within one of each other.
pub fn stratified_folds(y: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::validation("need at least 2 folds"));
    }
    let (classes, idx) = encode_classes(y);
    let mut folds = vec![0; y.len()];
    let mut offset = 0;
    for (ci, &c) in classes.iter().enumerate() {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| idx[i] == ci).collect();
        if members.len() < k {
            return Err(Error::validation(format!(
                "class {c} has {} members, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng::seeded(rng::mix(seed, c as u64)));
        for (r, &i) in members.iter().enumerate() {
            folds[i] = (offset + r) % k;
        }
        offset += members.len();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub classes: Vec<usize>,
    pub fold_of_sample: Vec<usize>,
    pub fold_balanced_accuracy: Vec<f64>,
    pub mean_balanced_accuracy: f64,
    /// Recall of class label 1 per fold.
    pub fold_recall_class1: Vec<f64>,
    pub fold_confusion: Vec<Vec<Vec<usize>>>,
}

impl CvReport {
    pub fn mean_recall_class1(&self) -> f64 {
        stats::mean(&self.fold_recall_class1)
    }
}

/// Balanced accuracy, class-1 recall and confusion matrix of one fold.
type FoldScore = (f64, f64, Vec<Vec<usize>>);

/// Stratified `k`-fold cross-validation of the pipeline `spec`.
pub fn cross_validate(x: &[Vec<f64>], y: &[usize], spec: &PipelineSpec, k: usize, seed: u64) -> Result<CvReport> {
    if x.len() != y.len() {
        return Err(Error::validation(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let folds = stratified_folds(y, k, seed)?;
    let (classes, _) = encode_classes(y);
    let per_fold: Vec<Result<FoldScore>> = (0..k)
        .into_par_iter()
        .map(|f| {
            let (mut xtr, mut ytr, mut xte, mut yte) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for i in 0..x.len() {
                if folds[i] == f {
                    xte.push(x[i].clone());
                    yte.push(y[i]);
                } else {
                    xtr.push(x[i].clone());
                    ytr.push(y[i]);
                }
            }
            let model = fit_pipeline(spec, &xtr, &ytr)?;
            let pred = model.predict(&xte)?;
            Ok((
                balanced_accuracy(&yte, &pred)?,
                recall(&yte, &pred, 1),
                confusion_matrix(&yte, &pred, &classes),
            ))
        })
        .collect();
    let mut report = CvReport {
        k,
        seed,
        classes,
        fold_of_sample: folds,
        fold_balanced_accuracy: Vec::new(),
        mean_balanced_accuracy: 0.0,
        fold_recall_class1: Vec::new(),
        fold_confusion: Vec::new(),
    };
    for r in per_fold {
        let (ba, rec, cm) = r?;
        report.fold_balanced_accuracy.push(ba);
        report.fold_recall_class1.push(rec);
        report.fold_confusion.push(cm);
    }
    report.mean_balanced_accuracy = stats::mean(&report.fold_balanced_accuracy);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub feature: String,
    pub mean_drop: f64,
    /// Population standard deviation over repeats.
    pub std_drop: f64,
    pub drops: Vec<f64>,
}

/// Drop in balanced accuracy when each input column is shuffled.
pub fn permutation_importance(
    model: &FittedPipeline,
    x: &[Vec<f64>],
    y: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<Vec<Importance>> {
    if repeats == 0 {
        return Err(Error::validation("permutation importance needs at least one repeat"));
    }
    let baseline = balanced_accuracy(y, &model.predict(x)?)?;
    (0..model.feature_names.len())
        .map(|j| {
            let mut drops = Vec::with_capacity(repeats);
            for r in 0..repeats {
                let mut perm: Vec<usize> = (0..x.len()).collect();
                perm.shuffle(&mut rng::stream(rng::mix(seed, j as u64), r as u64));
                let shuffled: Rows = x
                    .iter()
                    .zip(&perm)
                    .map(|(row, &p)| {
                        let mut row = row.clone();
                        row[j] = x[p][j];
                        row
                    })
                    .collect();
                drops.push(baseline - balanced_accuracy(y, &model.predict(&shuffled)?)?);
            }
            Ok(Importance {
                feature: model.feature_names[j].clone(),
                mean_drop: stats::mean(&drops),
                std_drop: stats::std_dev(&drops),
                drops,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpGrid {
    pub feature_a: String,
    pub feature_b: String,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    /// `values[i][j]`: mean class-1 probability with column a set to
    /// `a_values[i]` and column b to `b_values[j]` on every row.
    pub values: Vec<Vec<f64>>,
}

/// `grid` evenly spaced points from the column minimum to its maximum
/// (a single point is the minimum).
pub fn grid_axis(x: &[Vec<f64>], col: usize, grid: usize) -> Vec<f64> {
    let lo = x.iter().map(|r| r[col]).fold(f64::INFINITY, f64::min);
    let hi = x.iter().map(|r| r[col]).fold(f64::NEG_INFINITY, f64::max);
    if grid == 1 {
        return vec![lo];
    }
    (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect()
}

pub fn partial_dependence(
    model: &FittedPipeline,
    x: &[Vec<f64>],
    feature_a: &str,
    feature_b: &str,
    grid: usize,
) -> Result<PdpGrid> {
    let col = |name: &str| {
        model
            .feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::validation(format!("feature {name:?} is not a model input")))
    };
    let (a, b) = (col(feature_a)?, col(feature_b)?);
    if grid == 0 || x.is_empty() {
        return Err(Error::validation("partial dependence needs grid >= 1 and data"));
    }
    let a_values = grid_axis(x, a, grid);
    let b_values = grid_axis(x, b, grid);
    let values = a_values
        .iter()
        .map(|&va| {
            b_values
                .iter()
                .map(|&vb| {
                    let modified: Rows = x
                        .iter()
                        .map(|r| {
                            let mut r = r.clone();
                            r[a] = va;
                            r[b] = vb;
                            r
                        })
                        .collect();
                    Ok(stats::mean(&model.positive_proba(&modified)?))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PdpGrid { feature_a: feature_a.into(), feature_b: feature_b.into(), a_values, b_values, values })
}
