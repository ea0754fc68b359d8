"""Logistic regression and Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np

from .base import BinaryClassifier, UNPLEASANT


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticRegression(BinaryClassifier):
    """Full-batch gradient descent on the log-loss, zero-initialized weights,
    no regularization by default (l2 configurable)."""

    kind = "logreg"

    def __init__(self, learning_rate: float = 0.1, epochs: int = 1000, l2: float = 0.0):
        super().__init__()
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2

    def _fit(self, Xn, y):
        n, d = Xn.shape
        self.weights_ = np.zeros(d)
        self.bias_ = 0.0
        for _ in range(self.epochs):
            p = _sigmoid(Xn @ self.weights_ + self.bias_)
            err = p - y
            grad_w = Xn.T @ err / n + self.l2 * self.weights_
            grad_b = err.mean()
            self.weights_ -= self.learning_rate * grad_w
            self.bias_ -= self.learning_rate * grad_b

    def _proba(self, Xn):
        return _sigmoid(Xn @ self.weights_ + self.bias_)

    def _state(self):
        return {"weights": self.weights_.tolist(), "bias": self.bias_}

    def _load_state(self, state):
        self.weights_ = np.asarray(state["weights"], dtype=float)
        self.bias_ = float(state["bias"])


class GaussianNB(BinaryClassifier):
    """Per-class mean and population variance (floored at var_floor); class
    priors from training frequency. A posterior tie predicts unpleasant."""

    kind = "gnb"

    def __init__(self, var_floor: float = 1e-9):
        super().__init__()
        self.var_floor = var_floor

    def _fit(self, Xn, y):
        self.class_log_prior_ = np.empty(2)
        self.theta_ = np.empty((2, Xn.shape[1]))
        self.var_ = np.empty((2, Xn.shape[1]))
        for c in (0, 1):
            rows = Xn[y == c]
            self.class_log_prior_[c] = np.log(len(rows) / len(Xn))
            self.theta_[c] = rows.mean(axis=0)
            self.var_[c] = np.maximum(rows.var(axis=0), self.var_floor)

    def _joint_log_likelihood(self, Xn):
        jll = np.empty((Xn.shape[0], 2))
        for c in (0, 1):
            log_det = np.sum(np.log(2.0 * np.pi * self.var_[c]))
            sq = ((Xn - self.theta_[c]) ** 2 / self.var_[c]).sum(axis=1)
            jll[:, c] = self.class_log_prior_[c] - 0.5 * (log_det + sq)
        return jll

    def _proba(self, Xn):
        jll = self._joint_log_likelihood(Xn)
        m = jll.max(axis=1, keepdims=True)
        ex = np.exp(jll - m)
        return ex[:, 1] / ex.sum(axis=1)

    def predict(self, X):
        X = self._check_width(X)
        jll = self._joint_log_likelihood(self.normalizer.transform(X))
        # strict comparison: equal posteriors fall back to unpleasant
        return (jll[:, 1] > jll[:, 0]).astype(int)

    def _state(self):
        return {
            "class_log_prior": self.class_log_prior_.tolist(),
            "theta": self.theta_.tolist(),
            "var": self.var_.tolist(),
        }

    def _load_state(self, state):
        self.class_log_prior_ = np.asarray(state["class_log_prior"], dtype=float)
        self.theta_ = np.asarray(state["theta"], dtype=float)
        self.var_ = np.asarray(state["var"], dtype=float)
