"""Classifier zoo with a uniform fit/predict contract and a portable,
self-describing model file format."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ..core import BinaryMood
from ..errors import FormatError
from .base import BinaryClassifier, Normalizer, encode_labels, decode_labels
from .linear import GaussianNB, LogisticRegression
from .neighbors import KNeighbors
from .trees import DecisionTree, RandomForest
from .mlp import Mlp

MODEL_FILE_VERSION = 1

REGISTRY: dict[str, type[BinaryClassifier]] = {
    cls.kind: cls for cls in (LogisticRegression, GaussianNB, KNeighbors,
                              DecisionTree, RandomForest, Mlp)
}

# Model families requested in reports but deliberately left out of the zoo.
UNSUPPORTED_KINDS = ("svm", "adaboost", "gradboost", "xgboost")


def make_model(kind: str, seed: int = 0, **params) -> BinaryClassifier:
    if kind not in REGISTRY:
        raise FormatError(f"unknown model kind {kind!r}")
    model = REGISTRY[kind]()
    if "seed" in model.get_params():
        model.set_params(seed=seed)
    if params:
        model.set_params(**params)
    return model


def fit_model(kind: str, X: np.ndarray, labels: Sequence[BinaryMood],
              seed: int = 0, column_names: Optional[Sequence[str]] = None,
              **params) -> BinaryClassifier:
    model = make_model(kind, seed=seed, **params)
    model.fit(X, encode_labels(labels))
    if column_names is not None:
        model.column_names = tuple(column_names)
    return model


def save_model(model: BinaryClassifier, path: Union[str, Path]) -> None:
    doc = {"format": "wristmood-model", "version": MODEL_FILE_VERSION}
    doc.update(model.to_dict())
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, indent=1), encoding="utf-8")
    os.replace(tmp, path)


def load_model(path: Union[str, Path]) -> BinaryClassifier:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: not a valid model file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "wristmood-model":
        raise FormatError(f"{path}: not a wristmood model file")
    if doc.get("version") != MODEL_FILE_VERSION:
        raise FormatError(f"{path}: unsupported model file version {doc.get('version')}")
    kind = doc.get("kind")
    if kind not in REGISTRY:
        raise FormatError(f"{path}: unknown model kind {kind!r}")
    return REGISTRY[kind].from_dict(doc)


__all__ = [
    "BinaryClassifier", "Normalizer", "LogisticRegression", "GaussianNB",
    "KNeighbors", "DecisionTree", "RandomForest", "Mlp", "REGISTRY",
    "UNSUPPORTED_KINDS", "make_model", "fit_model", "save_model", "load_model",
    "encode_labels", "decode_labels",
]
