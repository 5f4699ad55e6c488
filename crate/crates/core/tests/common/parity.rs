//! Classifier and transform parity checks: hand-derived Bayes-rule fixtures
//! plus reference outputs frozen in `fixtures/ml_parity.json`. Each check
//! panics on mismatch.

use maxcut_select::selector::estimators::{
    binarize, entropy, f_classif, l2_normalize, select_percentile_mask, BernoulliNb, DecisionTree, GaussianNb,
    KNeighbors, MultinomialNb, Rows, TreeParams,
};
use maxcut_select::selector::{balanced_accuracy, fit_pipeline, stratified_folds, PipelineSpec};
use serde_json::Value;

const TOL: f64 = 1e-9;

fn fixtures() -> Value {
    serde_json::from_str(include_str!("../fixtures/ml_parity.json")).unwrap()
}

fn rows(v: &Value) -> Rows {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

fn labels(v: &Value) -> Vec<usize> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect()
}

fn assert_close(got: &[Vec<f64>], want: &[Vec<f64>], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: row count");
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert_eq!(g.len(), w.len(), "{what}: row {i} width");
        for (a, b) in g.iter().zip(w) {
            assert!((a - b).abs() <= tol, "{what}: row {i}: {g:?} vs {w:?}");
        }
    }
}

fn basic() -> (Rows, Vec<usize>, Rows, Value) {
    let f = fixtures();
    let b = &f["basic"];
    (rows(&b["x_train"]), labels(&b["y_train"]), rows(&b["x_test"]), f)
}

// Hand-derived fixtures: four rows, two classes, explicit Bayes arithmetic.

pub fn multinomial_nb_hand_posterior() {
    let x = vec![vec![2.0, 0.0], vec![1.0, 1.0], vec![0.0, 3.0], vec![1.0, 2.0]];
    let y = [0, 0, 1, 1];
    let m = MultinomialNb::fit(&x, &y, 1.0).unwrap();
    // Class 0 counts (3, 1) + 1 -> theta = (4/6, 2/6); class 1 counts (1, 5) + 1 -> (2/8, 6/8).
    let (t0, t1): ([f64; 2], [f64; 2]) = ([4.0 / 6.0, 2.0 / 6.0], [2.0 / 8.0, 6.0 / 8.0]);
    let q = [1.0, 1.0];
    let l0 = t0[0].powf(q[0]) * t0[1].powf(q[1]);
    let l1 = t1[0].powf(q[0]) * t1[1].powf(q[1]);
    let p = m.predict_proba(&[q.to_vec()]).unwrap();
    assert!((p[0][0] - l0 / (l0 + l1)).abs() < TOL);
    assert!((p[0][0] + p[0][1] - 1.0).abs() < TOL);
}

pub fn bernoulli_nb_hand_posterior() {
    let x = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]];
    let y = [0, 0, 1, 1];
    let m = BernoulliNb::fit(&x, &y, 1.0, 0.0).unwrap();
    // P(x_j = 1 | c) = (ones + 1) / (2 + 2): class 0 -> (3/4, 2/4), class 1 -> (1/4, 2/4).
    let l0 = 0.75 * (1.0 - 0.5);
    let l1 = 0.25 * (1.0 - 0.5);
    let p = m.predict_proba(&[vec![1.0, 0.0]]).unwrap();
    assert!((p[0][0] - l0 / (l0 + l1)).abs() < TOL);
}

pub fn gaussian_nb_hand_posterior() {
    let x = vec![vec![0.0], vec![2.0], vec![4.0], vec![6.0]];
    let y = [0, 0, 1, 1];
    let m = GaussianNb::fit(&x, &y).unwrap();
    // Means 1 and 5, within-class variances 1, smoothing 1e-9 * var(x) = 1e-9 * 5.
    let var = 1.0 + 5e-9;
    let dens = |x: f64, mu: f64| (-(x - mu) * (x - mu) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
    let q = 2.5;
    let (l0, l1) = (0.5 * dens(q, 1.0), 0.5 * dens(q, 5.0));
    let p = m.predict_proba(&[vec![q]]).unwrap();
    assert!((p[0][0] - l0 / (l0 + l1)).abs() < TOL);
    assert!((m.epsilon - 5e-9).abs() < 1e-20);
}

pub fn knn_hand_neighbours() {
    let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![3.0, 0.0], vec![0.0, 5.0]];
    let m = KNeighbors::fit(&x, &[0, 1, 1, 0], 3).unwrap();
    // Manhattan distances from (1, 0): 1, 1, 2, 6 -> neighbours 0, 1, 2.
    let p = m.predict_proba(&[vec![1.0, 0.0]]).unwrap();
    assert!((p[0][0] - 1.0 / 3.0).abs() < TOL && (p[0][1] - 2.0 / 3.0).abs() < TOL);
}

pub fn tree_hand_split_and_entropy() {
    assert!((entropy(&[1.0, 1.0]) - 1.0).abs() < TOL);
    assert!((entropy(&[1.0, 3.0]) - (-(0.25f64).log2() * 0.25 - 0.75 * (0.75f64).log2())).abs() < TOL);
    let x: Rows = (0..30).map(|i| vec![((i * 17) % 30) as f64]).collect();
    let y: Vec<usize> = x.iter().map(|r| usize::from(r[0] >= 14.0)).collect();
    let t = DecisionTree::fit(&x, &y, TreeParams { max_depth: 2, min_samples_leaf: 13, min_samples_split: 9 }).unwrap();
    // Only positions 13..=17 satisfy the leaf minimum; the purest is 13.5.
    assert_eq!(t.nodes[0].threshold, 13.5);
    assert!(t.n_leaves() <= 4 && t.depth() <= 2);
}

pub fn transforms_hand_values() {
    let n = l2_normalize(&[vec![3.0, 4.0], vec![0.0, 0.0]]);
    assert_eq!(n, vec![vec![0.6, 0.8], vec![0.0, 0.0]]);
    assert_eq!(binarize(&[vec![0.25, 0.2500001, -1.0]], 0.25), vec![vec![0.0, 1.0, 0.0]]);
    // Class means 1 and 3, grand mean 2: SSB = 4, SSW = 4, F = (4/1)/(4/2) = 2.
    let f = f_classif(&[vec![0.0], vec![2.0], vec![2.0], vec![4.0]], &[0, 0, 1, 1]).unwrap();
    assert!((f[0] - 2.0).abs() < TOL);
    assert!((balanced_accuracy(&[1, 1, 0, 0], &[1, 0, 0, 0]).unwrap() - 0.75).abs() < TOL);
}

// Frozen reference outputs.

pub fn knn_matches_reference() {
    let (xtr, ytr, xte, f) = basic();
    let m = KNeighbors::fit(&xtr, &ytr, 5).unwrap();
    assert_close(&m.predict_proba(&xte).unwrap(), &rows(&f["knn_k5"]), TOL, "knn");
}

pub fn naive_bayes_matches_reference() {
    let (xtr, ytr, xte, f) = basic();
    let m = MultinomialNb::fit(&xtr, &ytr, 0.1).unwrap();
    assert_close(&m.predict_proba(&xte).unwrap(), &rows(&f["multinomial_nb"]), TOL, "multinomial");
    let m = BernoulliNb::fit(&xtr, &ytr, 10.0, 0.5).unwrap();
    assert_close(&m.predict_proba(&xte).unwrap(), &rows(&f["bernoulli_nb_binarize_half"]), TOL, "bernoulli");
    let m = GaussianNb::fit(&xtr, &ytr).unwrap();
    assert_close(&m.predict_proba(&xte).unwrap(), &rows(&f["gaussian_nb"]), TOL, "gaussian");
}

pub fn tree_matches_reference() {
    let (xtr, ytr, xte, f) = basic();
    let t = DecisionTree::fit(&xtr, &ytr, TreeParams { max_depth: 2, min_samples_leaf: 13, min_samples_split: 9 }).unwrap();
    let r = &f["tree"];
    assert_eq!(t.nodes[0].feature, Some(r["root_feature"].as_u64().unwrap() as usize));
    assert!((t.nodes[0].threshold - r["root_threshold"].as_f64().unwrap()).abs() < TOL);
    assert_eq!(t.n_leaves(), r["n_leaves"].as_u64().unwrap() as usize);
    assert_close(&t.predict_proba(&xte).unwrap(), &rows(&r["proba"]), TOL, "tree");
}

pub fn transforms_match_reference() {
    let (_, _, xte, f) = basic();
    assert_close(&l2_normalize(&xte), &rows(&f["normalizer"]), TOL, "normalizer");
    assert_close(&binarize(&xte, 0.25), &rows(&f["binarizer"]), 0.0, "binarizer");
}

pub fn anova_matches_reference() {
    let f = fixtures();
    let a = &f["anova"];
    let scores = f_classif(&rows(&a["x"]), &labels(&a["y"])).unwrap();
    for (s, w) in scores.iter().zip(a["f_scores"].as_array().unwrap()) {
        let w = w.as_f64().unwrap();
        assert!((s - w).abs() <= TOL * w.abs().max(1.0), "{s} vs {w}");
    }
    let want: Vec<bool> = a["percentile_60_mask"].as_array().unwrap().iter().map(|b| b.as_bool().unwrap()).collect();
    assert_eq!(select_percentile_mask(&scores, 60.0), want);
}

pub fn balanced_accuracy_matches_reference() {
    let f = fixtures();
    let b = &f["balanced_accuracy"];
    let got = balanced_accuracy(&labels(&b["y_true"]), &labels(&b["y_pred"])).unwrap();
    assert!((got - b["value"].as_f64().unwrap()).abs() < TOL);
}

pub fn crit1_pipeline_matches_reference() {
    let f = fixtures();
    let c = &f["crit1_pipeline"];
    let m = fit_pipeline(&PipelineSpec::crit1(), &rows(&c["x_train"]), &labels(&c["y_train"])).unwrap();
    let xte = rows(&c["x_test"]);
    assert_close(&m.predict_proba(&xte).unwrap(), &rows(&c["proba"]), TOL, "crit1 pipeline");
    assert_eq!(m.predict(&xte).unwrap(), labels(&c["pred"]));
}

pub fn stratified_folds_hand_counts() {
    // Four of each class over two folds: every fold holds two of each.
    let y = [0, 1, 0, 1, 1, 0, 0, 1];
    for seed in 0..5 {
        let folds = stratified_folds(&y, 2, seed).unwrap();
        for f in 0..2 {
            for c in 0..2 {
                let count = y.iter().zip(&folds).filter(|&(&l, &fo)| l == c && fo == f).count();
                assert_eq!(count, 2, "seed {seed} fold {f} class {c}");
            }
        }
    }
    // Seven and three over three folds: class sizes (3, 2, 2) and (1, 1, 1).
    let y = [0, 0, 0, 0, 0, 0, 0, 1, 1, 1];
    let folds = stratified_folds(&y, 3, 9).unwrap();
    let mut zeros: Vec<usize> = (0..3).map(|f| (0..7).filter(|&i| folds[i] == f).count()).collect();
    zeros.sort_unstable();
    assert_eq!(zeros, vec![2, 2, 3]);
    assert!((0..3).all(|f| (7..10).filter(|&i| folds[i] == f).count() == 1));
}

pub fn constant_predictor_scores_half() {
    let y = [0, 1, 0, 1, 1, 0];
    assert_eq!(balanced_accuracy(&y, &[1; 6]).unwrap(), 0.5);
    assert_eq!(balanced_accuracy(&y, &[0; 6]).unwrap(), 0.5);
}

pub fn pipelines_separate_separable_data() {
    let crit2 = PipelineSpec::crit2();
    for (spec, dims) in [(PipelineSpec::crit1(), 2), (crit2.clone(), crit2.features.len())] {
        let (x, y) = super::separable_rows(30, dims, 1);
        let (xt, yt) = super::separable_rows(15, dims, 2);
        let m = fit_pipeline(&spec, &x, &y).unwrap();
        let ba = balanced_accuracy(&yt, &m.predict(&xt).unwrap()).unwrap();
        assert_eq!(ba, 1.0, "{:?} on held-out rows", spec.criterion);
    }
}

/// Every check, by name.
pub const CHECKS: &[(&str, fn())] = &[
    ("multinomial_nb_hand_posterior", multinomial_nb_hand_posterior),
    ("bernoulli_nb_hand_posterior", bernoulli_nb_hand_posterior),
    ("gaussian_nb_hand_posterior", gaussian_nb_hand_posterior),
    ("knn_hand_neighbours", knn_hand_neighbours),
    ("tree_hand_split_and_entropy", tree_hand_split_and_entropy),
    ("transforms_hand_values", transforms_hand_values),
    ("knn_matches_reference", knn_matches_reference),
    ("naive_bayes_matches_reference", naive_bayes_matches_reference),
    ("tree_matches_reference", tree_matches_reference),
    ("transforms_match_reference", transforms_match_reference),
    ("anova_matches_reference", anova_matches_reference),
    ("balanced_accuracy_matches_reference", balanced_accuracy_matches_reference),
    ("crit1_pipeline_matches_reference", crit1_pipeline_matches_reference),
    ("stratified_folds_hand_counts", stratified_folds_hand_counts),
    ("constant_predictor_scores_half", constant_predictor_scores_half),
    ("pipelines_separate_separable_data", pipelines_separate_separable_data),
];
