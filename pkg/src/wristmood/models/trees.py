"""CART decision tree (Gini) and a bagged random forest built on it."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .base import BinaryClassifier


def _best_split(X: np.ndarray, y: np.ndarray, feature_idx: np.ndarray):
    """Exhaustive scan over midpoint thresholds of sorted unique values.
    Returns (feature, threshold, weighted_gini) or None if nothing splits.
    Ties go to the lowest feature index, then the lowest threshold."""
    n = len(y)
    best = None  # (gini, feature, threshold)
    for f in feature_idx:
        v = X[:, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        ys = y[order]
        boundaries = np.nonzero(vs[:-1] < vs[1:])[0]
        if boundaries.size == 0:
            continue
        cp = np.cumsum(ys)
        total_p = cp[-1]
        n1 = boundaries + 1
        n2 = n - n1
        p1 = cp[boundaries]
        p2 = total_p - p1
        g1 = 1.0 - (p1 / n1) ** 2 - ((n1 - p1) / n1) ** 2
        g2 = 1.0 - (p2 / n2) ** 2 - ((n2 - p2) / n2) ** 2
        gini = (n1 * g1 + n2 * g2) / n
        i = int(np.argmin(gini))  # first min = lowest threshold
        if best is None or gini[i] < best[0]:
            thr = float((vs[boundaries[i]] + vs[boundaries[i] + 1]) / 2.0)
            best = (float(gini[i]), int(f), thr)
    if best is None:
        return None
    return best[1], best[2], best[0]


def _grow(X, y, depth, max_depth, min_samples_split, max_features, rng):
    n = len(y)
    pleasant_frac = float(y.mean())
    if (pleasant_frac in (0.0, 1.0) or n < min_samples_split
            or (max_depth is not None and depth >= max_depth)):
        return {"leaf": pleasant_frac, "n": n}
    d = X.shape[1]
    if max_features is not None and max_features < d:
        feature_idx = np.sort(rng.choice(d, size=max_features, replace=False))
    else:
        feature_idx = np.arange(d)
    split = _best_split(X, y, feature_idx)
    if split is None:
        return {"leaf": pleasant_frac, "n": n}
    f, thr, _ = split
    left = X[:, f] <= thr
    return {
        "feature": f,
        "threshold": thr,
        "left": _grow(X[left], y[left], depth + 1, max_depth,
                      min_samples_split, max_features, rng),
        "right": _grow(X[~left], y[~left], depth + 1, max_depth,
                       min_samples_split, max_features, rng),
    }


def _tree_proba(node, row):
    while "leaf" not in node:
        node = node["left"] if row[node["feature"]] <= node["threshold"] else node["right"]
    return node["leaf"]


class DecisionTree(BinaryClassifier):
    """CART with Gini impurity; stops at pure nodes, max_depth, or
    min_samples_split. Leaf probability is the pleasant fraction."""

    kind = "dtree"

    def __init__(self, max_depth: Optional[int] = None, min_samples_split: int = 2,
                 max_features: Optional[int] = None, seed: int = 0):
        super().__init__()
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.seed = seed

    def _fit(self, Xn, y):
        rng = np.random.default_rng(self.seed)
        self.root_ = _grow(Xn, y, 0, self.max_depth, self.min_samples_split,
                           self.max_features, rng)

    def _proba(self, Xn):
        return np.array([_tree_proba(self.root_, row) for row in Xn])

    def _state(self):
        return {"root": self.root_}

    def _load_state(self, state):
        self.root_ = state["root"]


class RandomForest(BinaryClassifier):
    """Bagging over CART trees: bootstrap samples of size n, per-split feature
    subsample of ceil(sqrt(d)), per-tree RNGs derived from the master seed.
    predict_proba is the fraction of trees voting pleasant."""

    kind = "rforest"

    def __init__(self, n_trees: int = 100, max_depth: Optional[int] = None,
                 min_samples_split: int = 2, bootstrap: bool = True,
                 feature_subsample: bool = True, seed: int = 0):
        super().__init__()
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.bootstrap = bootstrap
        self.feature_subsample = feature_subsample
        self.seed = seed

    def _fit(self, Xn, y):
        n, d = Xn.shape
        max_features = int(np.ceil(np.sqrt(d))) if self.feature_subsample else None
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        self.trees_ = []
        for ss in seeds:
            rng = np.random.default_rng(ss)
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                Xb, yb = Xn[idx], y[idx]
            else:
                Xb, yb = Xn, y
            self.trees_.append(_grow(Xb, yb, 0, self.max_depth,
                                     self.min_samples_split, max_features, rng))

    def tree_votes(self, X) -> np.ndarray:
        """Per-tree binary votes, shape (n_rows, n_trees)."""
        X = self._check_width(X)
        Xn = self.normalizer.transform(X)
        votes = np.array([[_tree_proba(t, row) >= 0.5 for t in self.trees_]
                          for row in Xn])
        return votes.astype(int)

    def _proba(self, Xn):
        votes = np.array([[_tree_proba(t, row) >= 0.5 for t in self.trees_]
                          for row in Xn])
        return votes.mean(axis=1)

    def _state(self):
        return {"trees": self.trees_}

    def _load_state(self, state):
        self.trees_ = state["trees"]
