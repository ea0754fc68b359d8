"""K nearest neighbors with deterministic tie handling."""

from __future__ import annotations

import numpy as np

from .base import BinaryClassifier


class KNeighbors(BinaryClassifier):
    """Euclidean KNN (default k=5). Neighbor-distance ties break toward the
    lower training row index; an even-k vote tie predicts unpleasant."""

    kind = "knn"

    def __init__(self, k: int = 5):
        super().__init__()
        self.k = k

    def _fit(self, Xn, y):
        self.train_X_ = Xn.copy()
        self.train_y_ = y.copy()

    def _neighbor_labels(self, Xn):
        d2 = ((Xn[:, None, :] - self.train_X_[None, :, :]) ** 2).sum(axis=2)
        # stable sort: equal distances keep ascending row index
        order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        return self.train_y_[order]

    def _proba(self, Xn):
        return self._neighbor_labels(Xn).mean(axis=1)

    def predict(self, X):
        # fraction > 0.5 wins; an exact 0.5 vote is a tie -> unpleasant
        return (self.predict_proba(X) > 0.5).astype(int)

    def _state(self):
        return {"train_X": self.train_X_.tolist(), "train_y": self.train_y_.tolist()}

    def _load_state(self, state):
        self.train_X_ = np.asarray(state["train_X"], dtype=float)
        self.train_y_ = np.asarray(state["train_y"], dtype=int)
