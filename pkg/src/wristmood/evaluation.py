"""Stratified splitting, per-volunteer majority-vote accuracy, group
summaries, and the ablation grid over feature sets x model kinds."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import BinaryMood, SessionRecording, map_emotion
from .errors import DataError, DegenerateLabelError, DomainError, SpecError
from .featurization import (
    FeatureMatrix,
    FeatureSetSpec,
    fit_pca,
    select_features,
)
from .ingestion import clean_recording
from .models import UNSUPPORTED_KINDS, encode_labels, make_model


@dataclass(frozen=True)
class SplitPlan:
    train: tuple[int, ...]
    test: tuple[int, ...]
    test_fraction: float
    seed: int


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(labels: Sequence[BinaryMood], test_fraction: float,
                     seed: int) -> SplitPlan:
    """Seeded per-class shuffle; each class contributes
    round-half-up(fraction * count) test rows, at least 1 and at most
    count - 1 so training keeps both classes."""
    if not 0 < test_fraction < 1:
        raise SpecError(f"test_fraction must be in (0, 1), got {test_fraction}")
    labels = list(labels)
    classes = {m for m in labels}
    if len(classes) < 2:
        raise DegenerateLabelError("both classes must be present")
    rng = np.random.default_rng(seed)
    test: list[int] = []
    train: list[int] = []
    for mood in (BinaryMood.PLEASANT, BinaryMood.UNPLEASANT):
        idx = [i for i, m in enumerate(labels) if m == mood]
        if not idx:
            raise DegenerateLabelError(f"class {mood.value} has 0 rows")
        n_test = min(max(_round_half_up(test_fraction * len(idx)), 1), len(idx) - 1)
        perm = rng.permutation(len(idx))
        test.extend(idx[i] for i in perm[:n_test])
        train.extend(idx[i] for i in perm[n_test:])
    return SplitPlan(train=tuple(sorted(train)), test=tuple(sorted(test)),
                     test_fraction=test_fraction, seed=seed)


def majority_vote(preds: Sequence[BinaryMood]) -> BinaryMood:
    if len(preds) == 0:
        raise DomainError("majority_vote of an empty sequence")
    pleasant = sum(1 for p in preds if p == BinaryMood.PLEASANT)
    unpleasant = len(preds) - pleasant
    # exact tie goes to unpleasant
    return BinaryMood.PLEASANT if pleasant > unpleasant else BinaryMood.UNPLEASANT


def custom_accuracy(per_row_preds: Sequence[BinaryMood],
                    labels: Sequence[BinaryMood],
                    group_ids: Sequence[str]) -> float:
    """Accuracy over volunteers, not rows: each group's final prediction is
    the majority vote of its row predictions."""
    if not (len(per_row_preds) == len(labels) == len(group_ids)):
        raise DomainError("per_row_preds, labels, group_ids lengths differ")
    if len(labels) == 0:
        raise DomainError("no rows")
    groups: dict[str, dict] = {}
    for pred, label, gid in zip(per_row_preds, labels, group_ids):
        entry = groups.setdefault(gid, {"preds": [], "label": label})
        if entry["label"] != label:
            raise DataError(f"group {gid}: conflicting true labels")
        entry["preds"].append(pred)
    correct = sum(1 for e in groups.values()
                  if majority_vote(e["preds"]) == e["label"])
    return 100.0 * correct / len(groups)


@dataclass
class EvalReport:
    flavor: str
    feature_sets: list[str]
    model_kinds: list[str]
    repeats: int
    seed: int
    # (feature_set, kind) -> {"test": [...], "train": [...]} or None (unsupported)
    cells: dict = field(default_factory=dict)

    def mean(self, fs: str, kind: str) -> Optional[float]:
        cell = self.cells.get((fs, kind))
        if cell is None:
            return None
        return sum(cell["test"]) / len(cell["test"])

    def train_mean(self, fs: str, kind: str) -> Optional[float]:
        cell = self.cells.get((fs, kind))
        if cell is None:
            return None
        return sum(cell["train"]) / len(cell["train"])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("feature_set,model,mean_test_accuracy,mean_train_accuracy,"
                     "repeat_test_accuracies\n")
            for fs in self.feature_sets:
                for kind in self.model_kinds:
                    cell = self.cells.get((fs, kind))
                    if cell is None:
                        fh.write(f"{fs},{kind},unsupported,unsupported,\n")
                    else:
                        reps = ";".join(repr(v) for v in cell["test"])
                        fh.write(f"{fs},{kind},{self.mean(fs, kind)!r},"
                                 f"{self.train_mean(fs, kind)!r},{reps}\n")

    def to_text(self) -> str:
        """Aligned table mirroring the result-table layout: feature-set rows,
        model columns, mean test accuracy percent."""
        width = max(len(fs) for fs in self.feature_sets) + 2
        colw = max(max(len(k) for k in self.model_kinds) + 2, 9)
        lines = ["".ljust(width) + "".join(k.rjust(colw) for k in self.model_kinds)]
        for fs in self.feature_sets:
            row = fs.ljust(width)
            for kind in self.model_kinds:
                m = self.mean(fs, kind)
                row += ("n/a" if m is None else f"{m:.3f}").rjust(colw)
            lines.append(row)
        return "\n".join(lines) + "\n"


DEFAULT_MODEL_KINDS = ["logreg", "dtree", "rforest", "gnb", "knn", "mlp"]


def statistical_grid() -> list[FeatureSetSpec]:
    """The 17 feature-set rows of the statistical-dataset result tables."""
    g = lambda *names, **kw: FeatureSetSpec(groups=frozenset(names), **kw)
    return [
        g("hrv", "hr", "acc", "gyro"),
        g("hr", "acc", "gyro"),
        g("hrv", "acc", "gyro"),
        g("hrv", "hr", "acc"),
        g("hrv", "hr", "gyro"),
        g("hrv", "hr"),
        g("hrv"),
        g("hr"),
        g("hrv", "hr", "acc", "gyro", without_age=True),
        g("hrv", "hr", "acc", "gyro", without_gender=True),
        g("hrv", "hr", "acc", "gyro", without_age=True, without_gender=True),
        g("hrv", "hr", "acc", "gyro", without_median_mode=True),
        g("hrv", "hr", "acc", "gyro", without_age=True, without_gender=True,
          without_median_mode=True),
        g("acc", "gyro"),
        g("acc", "gyro", without_gender=True),
        g("acc", "gyro", without_age=True),
        g("acc", "gyro", without_age=True, without_gender=True),
    ]


def nonstatistical_grid() -> list[FeatureSetSpec]:
    """The 7 feature-set rows of the per-instance result table."""
    g = lambda *names, **kw: FeatureSetSpec(groups=frozenset(names), **kw)
    return [
        g("hr", "acc", "gyro"),
        g("hr", "acc", "gyro", without_age=True),
        g("hr", "acc", "gyro", without_gender=True),
        g("hr", "acc", "gyro", without_age=True, without_gender=True),
        g("acc", "gyro", without_age=True, without_gender=True),
        g("hr", without_age=True, without_gender=True),
        g("hr", "acc", "gyro", pca_components=3),
    ]


def _cell_seed(seed: int, repeat: int, fs_index: int, kind_index: int) -> int:
    ss = np.random.SeedSequence(entropy=(seed, repeat, fs_index, kind_index))
    return int(ss.generate_state(1)[0])


def split_matrix(matrix: FeatureMatrix, flavor: str, test_fraction: float,
                 seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Row index arrays (train, test). Statistical rows are sessions and are
    split directly; non-statistical rows are split by group so no session
    leaks across the boundary."""
    if flavor == "statistical":
        plan = stratified_split(matrix.labels, test_fraction, seed)
        return np.array(plan.train, dtype=int), np.array(plan.test, dtype=int)
    # group-level stratified split
    group_order: list[str] = []
    group_label: dict[str, BinaryMood] = {}
    for gid, label in zip(matrix.group_ids, matrix.labels):
        if gid not in group_label:
            group_order.append(gid)
            group_label[gid] = label
        elif group_label[gid] != label:
            raise DataError(f"group {gid}: conflicting labels")
    plan = stratified_split([group_label[g] for g in group_order],
                            test_fraction, seed)
    test_groups = {group_order[i] for i in plan.test}
    gids = np.array(matrix.group_ids)
    test_mask = np.isin(gids, sorted(test_groups))
    return np.nonzero(~test_mask)[0], np.nonzero(test_mask)[0]


def _score(model, matrix: FeatureMatrix, idx: np.ndarray, flavor: str) -> float:
    y_true = encode_labels([matrix.labels[i] for i in idx])
    y_pred = model.predict(matrix.rows[idx])
    if flavor == "statistical":
        return 100.0 * float(np.mean(y_pred == y_true))
    from .models.base import decode_labels

    return custom_accuracy(decode_labels(y_pred),
                           [matrix.labels[i] for i in idx],
                           [matrix.group_ids[i] for i in idx])


def _run_cell(args):
    (matrix, flavor, fs, fs_index, kind, kind_index, repeat, seed,
     test_fraction) = args
    train_idx, test_idx = split_matrix(matrix, flavor, test_fraction, seed + repeat)
    if fs.pca_components is not None:
        selected = select_features(matrix, FeatureSetSpec(groups=fs.groups))
        train_m = FeatureMatrix(selected.column_names, selected.rows[train_idx],
                                tuple(selected.labels[i] for i in train_idx),
                                tuple(selected.group_ids[i] for i in train_idx))
        pca = fit_pca(train_m, fs.pca_components)
        rows = pca.transform(selected).rows
        names = tuple(f"pc{i + 1}" for i in range(fs.pca_components))
        cell_matrix = FeatureMatrix(names, rows, selected.labels, selected.group_ids)
    else:
        cell_matrix = select_features(matrix, fs)
    model = make_model(kind, seed=_cell_seed(seed, repeat, fs_index, kind_index))
    model.fit(cell_matrix.rows[train_idx],
              encode_labels([cell_matrix.labels[i] for i in train_idx]))
    test_acc = _score(model, cell_matrix, test_idx, flavor)
    train_acc = _score(model, cell_matrix, train_idx, flavor)
    return (fs.name, kind, repeat, test_acc, train_acc)


def run_ablation(recordings: Sequence[SessionRecording], flavor: str,
                 feature_sets: Optional[Sequence[FeatureSetSpec]] = None,
                 model_kinds: Optional[Sequence[str]] = None,
                 repeats: int = 10, seed: int = 0,
                 test_fraction: float = 0.2, jobs: int = 1,
                 matrix: Optional[FeatureMatrix] = None) -> EvalReport:
    """Evaluate every (feature set x model kind) cell over `repeats` seeded
    splits. Results are independent of `jobs`."""
    if repeats < 1:
        raise SpecError("repeats must be >= 1")
    if feature_sets is None:
        feature_sets = (statistical_grid() if flavor == "statistical"
                        else nonstatistical_grid())
    if model_kinds is None:
        model_kinds = list(DEFAULT_MODEL_KINDS)
    if matrix is None:
        from .featurization import build_matrix

        cleaned = [clean_recording(r)[0] for r in recordings]
        matrix = build_matrix(cleaned, flavor)
    report = EvalReport(flavor=flavor, feature_sets=[fs.name for fs in feature_sets],
                        model_kinds=list(model_kinds), repeats=repeats, seed=seed)
    tasks = []
    for fi, fs in enumerate(feature_sets):
        for ki, kind in enumerate(model_kinds):
            if kind in UNSUPPORTED_KINDS:
                report.cells[(fs.name, kind)] = None
                continue
            report.cells[(fs.name, kind)] = {"test": [None] * repeats,
                                             "train": [None] * repeats}
            for r in range(repeats):
                tasks.append((matrix, flavor, fs, fi, kind, ki, r, seed,
                              test_fraction))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]
    for fs_name, kind, r, test_acc, train_acc in results:
        report.cells[(fs_name, kind)]["test"][r] = test_acc
        report.cells[(fs_name, kind)]["train"][r] = train_acc
    return report


def group_summary(recordings: Sequence[SessionRecording]) -> dict:
    """Mean heart rate, accelerometer magnitude, and gyroscope magnitude per
    age group, gender, and reported emotion, plus the emotion ranking for
    each measure."""
    if not recordings:
        raise DomainError("empty corpus")

    def accumulate(keyed):
        out = {}
        for key, recs in keyed.items():
            hr_vals, acc_mag, gyro_mag = [], [], []
            for r in recs:
                for s in r.samples:
                    if s.hr_bpm is not None:
                        hr_vals.append(s.hr_bpm)
                    acc_mag.append(math.sqrt(sum(v * v for v in s.acc)))
                    gyro_mag.append(math.sqrt(sum(v * v for v in s.gyro)))
            out[key] = {
                "mean_hr": sum(hr_vals) / len(hr_vals) if hr_vals else float("nan"),
                "mean_acc": sum(acc_mag) / len(acc_mag),
                "mean_gyro": sum(gyro_mag) / len(gyro_mag),
            }
        return out

    def bucket(key_fn):
        keyed: dict[str, list] = {}
        for r in recordings:
            key = key_fn(r)
            if key is not None:
                keyed.setdefault(key, []).append(r)
        return accumulate(keyed)

    by_age = bucket(lambda r: r.meta.age_group.value)
    by_gender = bucket(lambda r: r.meta.gender.value)
    by_emotion = bucket(
        lambda r: r.assessment.emotion.value if r.assessment else None)
    rankings = {
        measure: sorted(by_emotion, key=lambda e: by_emotion[e][measure],
                        reverse=True)
        for measure in ("mean_hr", "mean_acc", "mean_gyro")
    }
    return {"age_group": by_age, "gender": by_gender, "emotion": by_emotion,
            "rankings": rankings}
