"""Small fully connected network: input -> 32 (ReLU) -> dropout 0.5 ->
8 (ReLU) -> 1 (sigmoid), trained with Adam on binary cross-entropy."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .base import BinaryClassifier
from .linear import _sigmoid


class Mlp(BinaryClassifier):
    kind = "mlp"

    def __init__(self, hidden1: int = 32, hidden2: int = 8, dropout_rate: float = 0.5,
                 epochs: int = 200, learning_rate: float = 1e-3,
                 batch_size: Optional[int] = None, seed: int = 0,
                 beta1: float = 0.9, beta2: float = 0.999, adam_eps: float = 1e-8):
        super().__init__()
        self.hidden1 = hidden1
        self.hidden2 = hidden2
        self.dropout_rate = dropout_rate
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed
        self.beta1 = beta1
        self.beta2 = beta2
        self.adam_eps = adam_eps

    # -- parameters ----------------------------------------------------------
    def _init_params(self, d: int, rng: np.random.Generator):
        def he_uniform(fan_in, shape):
            limit = np.sqrt(6.0 / fan_in)
            return rng.uniform(-limit, limit, size=shape)

        self.params_ = {
            "W1": he_uniform(d, (d, self.hidden1)),
            "b1": np.zeros(self.hidden1),
            "W2": he_uniform(self.hidden1, (self.hidden1, self.hidden2)),
            "b2": np.zeros(self.hidden2),
            "W3": he_uniform(self.hidden2, (self.hidden2, 1)),
            "b3": np.zeros(1),
        }

    PARAM_ORDER = ("W1", "b1", "W2", "b2", "W3", "b3")

    def get_flat_params(self) -> np.ndarray:
        return np.concatenate([self.params_[k].ravel() for k in self.PARAM_ORDER])

    def set_flat_params(self, flat: np.ndarray) -> None:
        pos = 0
        for k in self.PARAM_ORDER:
            size = self.params_[k].size
            self.params_[k] = flat[pos:pos + size].reshape(self.params_[k].shape).copy()
            pos += size

    @property
    def n_parameters(self) -> int:
        return sum(p.size for p in self.params_.values())

    # -- forward/backward ----------------------------------------------------
    def _forward(self, Xn: np.ndarray, dropout_mask: Optional[np.ndarray] = None):
        p = self.params_
        z1 = Xn @ p["W1"] + p["b1"]
        a1 = np.maximum(z1, 0.0)
        a1d = a1 * dropout_mask if dropout_mask is not None else a1
        z2 = a1d @ p["W2"] + p["b2"]
        a2 = np.maximum(z2, 0.0)
        z3 = a2 @ p["W3"] + p["b3"]
        out = _sigmoid(z3[:, 0])
        return {"z1": z1, "a1": a1, "a1d": a1d, "z2": z2, "a2": a2, "out": out}

    @staticmethod
    def _bce(out: np.ndarray, y: np.ndarray) -> float:
        eps = 1e-12
        p = np.clip(out, eps, 1.0 - eps)
        return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))

    def loss_and_grad(self, Xn: np.ndarray, y: np.ndarray,
                      dropout_mask: Optional[np.ndarray] = None):
        """BCE loss and its exact gradient as a flat vector (dropout applied
        only when a mask is passed)."""
        n = len(y)
        cache = self._forward(Xn, dropout_mask)
        loss = self._bce(cache["out"], y)
        p = self.params_
        dz3 = ((cache["out"] - y) / n)[:, None]
        gW3 = cache["a2"].T @ dz3
        gb3 = dz3.sum(axis=0)
        da2 = dz3 @ p["W3"].T
        dz2 = da2 * (cache["z2"] > 0)
        gW2 = cache["a1d"].T @ dz2
        gb2 = dz2.sum(axis=0)
        da1d = dz2 @ p["W2"].T
        da1 = da1d * dropout_mask if dropout_mask is not None else da1d
        dz1 = da1 * (cache["z1"] > 0)
        gW1 = Xn.T @ dz1
        gb1 = dz1.sum(axis=0)
        grads = {"W1": gW1, "b1": gb1, "W2": gW2, "b2": gb2, "W3": gW3, "b3": gb3}
        flat = np.concatenate([grads[k].ravel() for k in self.PARAM_ORDER])
        return loss, flat

    # -- training ------------------------------------------------------------
    def _fit(self, Xn, y, eval_Xn=None, eval_y=None):
        n, d = Xn.shape
        rng = np.random.default_rng(self.seed)
        self._init_params(d, rng)
        m = np.zeros(self.n_parameters)
        v = np.zeros(self.n_parameters)
        t = 0
        batch = self.batch_size or n
        self.history_ = []
        for epoch in range(self.epochs):
            order = rng.permutation(n) if batch < n else np.arange(n)
            for start in range(0, n, batch):
                idx = order[start:start + batch]
                Xb, yb = Xn[idx], y[idx]
                mask = None
                if self.dropout_rate > 0:
                    keep = 1.0 - self.dropout_rate
                    mask = (rng.random((len(idx), self.hidden1)) < keep) / keep
                _, grad = self.loss_and_grad(Xb, yb, dropout_mask=mask)
                t += 1
                m = self.beta1 * m + (1 - self.beta1) * grad
                v = self.beta2 * v + (1 - self.beta2) * grad ** 2
                m_hat = m / (1 - self.beta1 ** t)
                v_hat = v / (1 - self.beta2 ** t)
                flat = self.get_flat_params()
                flat -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.adam_eps)
                self.set_flat_params(flat)
            record = self._epoch_record(Xn, y, "train")
            if eval_Xn is not None:
                record.update(self._epoch_record(eval_Xn, eval_y, "test"))
            self.history_.append(record)

    def _epoch_record(self, Xn, y, tag):
        out = self._forward(Xn)["out"]
        return {
            f"{tag}_loss": self._bce(out, y),
            f"{tag}_accuracy": float(np.mean((out >= 0.5).astype(int) == y)),
        }

    def fit(self, X, y, eval_set=None):
        from .base import check_training_data

        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.normalizer.fit(X)
        Xn = self.normalizer.transform(X)
        if eval_set is not None:
            eval_Xn = self.normalizer.transform(np.asarray(eval_set[0], dtype=float))
            eval_y = np.asarray(eval_set[1], dtype=int)
            self._fit(Xn, y, eval_Xn, eval_y)
        else:
            self._fit(Xn, y)
        return self

    def _proba(self, Xn):
        return self._forward(Xn)["out"]

    # -- serialization ---------------------------------------------------------
    def _state(self):
        return {k: self.params_[k].tolist() for k in self.PARAM_ORDER}

    def _load_state(self, state):
        self.params_ = {k: np.asarray(state[k], dtype=float) for k in self.PARAM_ORDER}
        # keep 1-D biases and 2-D weights
        for k in ("b1", "b2", "b3"):
            self.params_[k] = self.params_[k].reshape(-1)
