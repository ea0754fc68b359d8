"""Estimator base: uniform fit/predict contract, per-column normalizer, and
input validation shared by every classifier kind."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..core import BinaryMood
from ..errors import DegenerateLabelError, DomainError, ShapeError

# Label encoding used throughout the zoo.
PLEASANT = 1
UNPLEASANT = 0


def encode_labels(labels: Sequence[BinaryMood]) -> np.ndarray:
    return np.array([PLEASANT if m == BinaryMood.PLEASANT else UNPLEASANT
                     for m in labels], dtype=int)


def decode_labels(y: np.ndarray) -> list[BinaryMood]:
    return [BinaryMood.PLEASANT if v == PLEASANT else BinaryMood.UNPLEASANT for v in y]


class Normalizer:
    """Column-wise standardization fitted on training rows. Constant columns
    (std 0) map to 0."""

    def __init__(self):
        self.mean: Optional[np.ndarray] = None
        self.std: Optional[np.ndarray] = None

    def fit(self, X: np.ndarray) -> "Normalizer":
        X = np.asarray(X, dtype=float)
        self.mean = X.mean(axis=0)
        self.std = X.std(axis=0)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        safe = np.where(self.std == 0, 1.0, self.std)
        z = (X - self.mean) / safe
        return np.where(self.std == 0, 0.0, z)

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        n = cls()
        n.mean = np.asarray(d["mean"], dtype=float)
        n.std = np.asarray(d["std"], dtype=float)
        return n


def check_training_data(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"X {X.shape} does not match y {y.shape}")
    if X.shape[0] < 2:
        raise DegenerateLabelError("need at least 2 training rows")
    if not np.all(np.isfinite(X)):
        raise DomainError("training features must be finite")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelError("training data contains a single class")
    return X, y


class BinaryClassifier:
    """Common surface of the zoo: fit(X, y), predict_proba (probability of
    pleasant), predict (>= 0.5 -> pleasant unless the kind documents its own
    tie rule), get_params/set_params."""

    kind = "base"

    def __init__(self):
        self.normalizer = Normalizer()
        self.n_features_: Optional[int] = None
        self.column_names: Optional[tuple[str, ...]] = None

    # -- estimator API ------------------------------------------------------
    def get_params(self) -> dict:
        return {k: v for k, v in vars(self).items()
                if not k.endswith("_") and k not in ("normalizer", "column_names")}

    def set_params(self, **params) -> "BinaryClassifier":
        for k, v in params.items():
            if not hasattr(self, k):
                raise DomainError(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    # -- fitting ------------------------------------------------------------
    def fit(self, X, y) -> "BinaryClassifier":
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.normalizer.fit(X)
        self._fit(self.normalizer.transform(X), y)
        return self

    def _fit(self, Xn: np.ndarray, y: np.ndarray) -> None:
        raise NotImplementedError

    # -- inference ----------------------------------------------------------
    def _check_width(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_:
            raise ShapeError(
                f"expected {self.n_features_} features, got {X.shape[1]}")
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        return self._proba(self.normalizer.transform(X))

    def _proba(self, Xn: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)

    # -- serialization ------------------------------------------------------
    def _state(self) -> dict:
        raise NotImplementedError

    def _load_state(self, state: dict) -> None:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.get_params(),
            "n_features": self.n_features_,
            "column_names": list(self.column_names) if self.column_names else None,
            "normalizer": self.normalizer.to_dict(),
            "state": self._state(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BinaryClassifier":
        model = cls()
        model.set_params(**d["params"])
        model.n_features_ = d["n_features"]
        model.column_names = tuple(d["column_names"]) if d.get("column_names") else None
        model.normalizer = Normalizer.from_dict(d["normalizer"])
        model._load_state(d["state"])
        return model
