"""Regenerates ml_parity.json with scikit-learn as the reference implementation.

Usage: python3 make_ml_fixtures.py > ml_parity.json
"""

import json
import sys
from copy import copy

import numpy as np
import sklearn
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectPercentile, f_classif
from sklearn.metrics import balanced_accuracy_score
from sklearn.naive_bayes import BernoulliNB, GaussianNB, MultinomialNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import make_pipeline, make_union
from sklearn.preprocessing import Binarizer, FunctionTransformer, Normalizer
from sklearn.tree import DecisionTreeClassifier


class StackingEstimator(BaseEstimator, TransformerMixin):
    """Prepends an estimator's prediction and class probabilities to X."""

    def __init__(self, estimator):
        self.estimator = estimator

    def fit(self, X, y=None):
        self.estimator.fit(X, y)
        return self

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        out = np.hstack((self.estimator.predict_proba(X), X))
        return np.hstack((np.reshape(self.estimator.predict(X), (-1, 1)), out))


def rows(a):
    return np.asarray(a, dtype=float).tolist()


def dataset(rng, n, d, noise):
    x = rng.uniform(0.0, 1.0, size=(n, d))
    score = x[:, 0] - 0.6 * x[:, 1] + noise * rng.normal(size=n)
    y = (score > np.median(score)).astype(int)
    return x, y


def main():
    rng = np.random.default_rng(20240611)
    out = {"sklearn_version": sklearn.__version__}

    x, y = dataset(rng, 60, 3, 0.2)
    xtr, ytr, xte = x[:45], y[:45], x[45:]
    out["basic"] = {"x_train": rows(xtr), "y_train": ytr.tolist(), "x_test": rows(xte)}

    knn = KNeighborsClassifier(n_neighbors=5, p=1, weights="uniform").fit(xtr, ytr)
    out["knn_k5"] = rows(knn.predict_proba(xte))
    mnb = MultinomialNB(alpha=0.1, fit_prior=False).fit(xtr, ytr)
    out["multinomial_nb"] = rows(mnb.predict_proba(xte))
    bnb = BernoulliNB(alpha=10.0, fit_prior=False, binarize=0.5).fit(xtr, ytr)
    out["bernoulli_nb_binarize_half"] = rows(bnb.predict_proba(xte))
    gnb = GaussianNB().fit(xtr, ytr)
    out["gaussian_nb"] = rows(gnb.predict_proba(xte))
    tree = DecisionTreeClassifier(
        criterion="entropy", max_depth=2, min_samples_leaf=13, min_samples_split=9, random_state=0
    ).fit(xtr, ytr)
    out["tree"] = {
        "proba": rows(tree.predict_proba(xte)),
        "root_feature": int(tree.tree_.feature[0]),
        "root_threshold": float(tree.tree_.threshold[0]),
        "n_leaves": int(tree.get_n_leaves()),
    }
    out["normalizer"] = rows(Normalizer(norm="l2").fit_transform(xte))
    out["binarizer"] = rows(Binarizer(threshold=0.25).fit_transform(xte))

    xf, yf = dataset(rng, 50, 6, 0.3)
    xf[:, 4] = 0.5
    scores, _ = f_classif(xf[:, [0, 1, 2, 3, 5]], yf)
    sel = SelectPercentile(f_classif, percentile=60).fit(xf[:, [0, 1, 2, 3, 5]], yf)
    out["anova"] = {
        "x": rows(xf[:, [0, 1, 2, 3, 5]]),
        "y": yf.tolist(),
        "f_scores": scores.tolist(),
        "percentile_60_mask": sel.get_support().tolist(),
    }

    y_true = rng.integers(0, 2, size=30)
    y_pred = rng.integers(0, 2, size=30)
    out["balanced_accuracy"] = {
        "y_true": y_true.tolist(),
        "y_pred": y_pred.tolist(),
        "value": balanced_accuracy_score(y_true, y_pred),
    }

    # Criterion-1 pipeline on two non-negative features.
    x1 = np.column_stack((rng.uniform(0.85, 1.0, 120), rng.uniform(0.01, 0.12, 120)))
    y1 = ((x1[:, 1] < 0.05) & (x1[:, 0] > 0.9) | (rng.uniform(size=120) < 0.1)).astype(int)
    crit1 = make_pipeline(
        make_union(Normalizer(norm="l2"), FunctionTransformer(copy)),
        StackingEstimator(estimator=KNeighborsClassifier(n_neighbors=41, p=1, weights="uniform")),
        MultinomialNB(alpha=0.1, fit_prior=False),
    ).fit(x1[:90], y1[:90])
    out["crit1_pipeline"] = {
        "x_train": rows(x1[:90]),
        "y_train": y1[:90].tolist(),
        "x_test": rows(x1[90:]),
        "proba": rows(crit1.predict_proba(x1[90:])),
        "pred": crit1.predict(x1[90:]).tolist(),
    }

    json.dump(out, sys.stdout, indent=1)


if __name__ == "__main__":
    main()
