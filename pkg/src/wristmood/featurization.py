"""Dataset construction: per-session statistical feature vectors (channel
stats + HRV metrics + demographics), per-instance rows, named feature-set
selection, and PCA."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import BinaryMood, Gender, SessionRecording
from .errors import DomainError, InsufficientDataError, SpecError
from .ingestion import clean_nn_intervals


@dataclass(frozen=True)
class HrvMetrics:
    sdnn: float          # ms, over cleaned NN intervals
    rmssd: float         # ms, over raw successive differences
    nn50: int
    pnn50: float         # percent 0-100
    hr_range: float      # bpm
    sdnn_degenerate: bool = False  # True when cleaning left no intervals

    def as_row(self) -> list[float]:
        return [self.sdnn, self.rmssd, float(self.nn50), self.pnn50, self.hr_range]


@dataclass(frozen=True)
class ChannelStats:
    mean: float
    median: float
    mode: float
    std: float
    min: float
    max: float
    peak_count: int

    def as_row(self) -> list[float]:
        return [self.mean, self.median, self.mode, self.std, self.min, self.max,
                float(self.peak_count)]


STAT_NAMES = ("mean", "median", "mode", "std", "min", "max", "peaks")
CHANNELS = ("hr", "acc_x", "acc_y", "acc_z", "gyro_x", "gyro_y", "gyro_z")
HRV_NAMES = ("hrv_sdnn", "hrv_rmssd", "hrv_nn50", "hrv_pnn50", "hrv_hr_range")


def detect_peaks(x: Sequence[float]) -> list[int]:
    """Indices of strict interior maxima: x[i-1] < x[i] > x[i+1]. Plateaus are
    excluded by the strict inequalities."""
    if len(x) == 0:
        raise DomainError("detect_peaks requires at least one value")
    return [i for i in range(1, len(x) - 1) if x[i] > x[i - 1] and x[i] > x[i + 1]]


def nn_intervals(bpm: Sequence[float]) -> list[float]:
    """Inter-beat intervals reconstructed from rate readings: 60000/bpm ms.
    The watch exposes bpm samples, not beat peaks, so this proxy is the only
    NN source available."""
    for b in bpm:
        if b <= 0:
            raise DomainError(f"bpm must be positive, got {b}")
    return [60000.0 / b for b in bpm]


def compute_hrv(bpm: Sequence[float]) -> HrvMetrics:
    """The five HRV numbers over one session's heart-rate readings.

    SDNN is the population standard deviation of the *cleaned* NN intervals;
    RMSSD/NN50/pNN50 use the raw successive differences; hr_range is
    max - min of the bpm readings.
    """
    if len(bpm) < 2:
        raise InsufficientDataError(f"need >= 2 HR readings, got {len(bpm)}")
    nn = nn_intervals(bpm)
    cleaned = clean_nn_intervals(nn)
    degenerate = len(cleaned) == 0
    sdnn = 0.0 if degenerate else float(np.std(np.asarray(cleaned)))
    diffs = np.diff(np.asarray(nn))
    rmssd = float(np.sqrt(np.mean(diffs ** 2)))
    nn50 = int(np.sum(np.abs(diffs) > 50.0))
    pnn50 = 100.0 * nn50 / len(diffs)
    hr_range = float(max(bpm) - min(bpm))
    return HrvMetrics(sdnn=sdnn, rmssd=rmssd, nn50=nn50, pnn50=pnn50,
                      hr_range=hr_range, sdnn_degenerate=degenerate)


def _mode_2dp(x: np.ndarray) -> float:
    """Most frequent value after rounding to 2 decimals; ties go to the
    smallest value."""
    rounded = np.round(x, 2)
    values, counts = np.unique(rounded, return_counts=True)
    best = counts.max()
    return float(values[counts == best].min())


def channel_stats(x: Sequence[float]) -> ChannelStats:
    """Summary statistics for one sensor channel (population std; median of an
    even-length channel is the mean of the middle two)."""
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise DomainError("channel_stats requires at least one value")
    return ChannelStats(
        mean=float(arr.mean()),
        median=float(np.median(arr)),
        mode=_mode_2dp(arr),
        std=float(arr.std()),
        min=float(arr.min()),
        max=float(arr.max()),
        peak_count=len(detect_peaks(arr.tolist())),
    )


@dataclass(frozen=True)
class FeatureMatrix:
    column_names: tuple[str, ...]
    rows: np.ndarray                    # shape (n, len(column_names))
    labels: tuple[BinaryMood, ...]
    group_ids: tuple[str, ...]

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2 or rows.shape[1] != len(self.column_names):
            raise DomainError("rows width does not match column_names")
        if len(self.labels) != rows.shape[0] or len(self.group_ids) != rows.shape[0]:
            raise DomainError("labels/group_ids length mismatch")
        if rows.size and not np.all(np.isfinite(rows)):
            raise DomainError("feature matrix contains non-finite entries")

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(self.column_names) + ",label,group_id\n")
            for row, label, gid in zip(self.rows, self.labels, self.group_ids):
                fh.write(",".join(repr(float(v)) for v in row)
                         + f",{label.value},{gid}\n")

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if header[-2:] != ["label", "group_id"]:
                raise SpecError("feature CSV must end with label,group_id columns")
            names = tuple(header[:-2])
            rows, labels, gids = [], [], []
            for line in fh:
                parts = line.strip().split(",")
                rows.append([float(v) for v in parts[:-2]])
                labels.append(BinaryMood(parts[-2]))
                gids.append(parts[-1])
        return cls(names, np.array(rows, dtype=float).reshape(len(rows), len(names)),
                   tuple(labels), tuple(gids))


def _gender_onehot(g: Gender) -> list[float]:
    return [1.0 if g == Gender.MALE else 0.0, 1.0 if g == Gender.FEMALE else 0.0]


def statistical_column_names() -> tuple[str, ...]:
    names = [f"{ch}_{st}" for ch in CHANNELS for st in STAT_NAMES]
    names += list(HRV_NAMES)
    names += ["age", "gender_male", "gender_female"]
    return tuple(names)


def build_statistical_row(r: SessionRecording) -> tuple[tuple[str, ...], list[float]]:
    """One 56-column feature vector per cleaned session: 7 stats for each of
    the 7 channels, the 5 HRV metrics, age, and a 2-column gender one-hot
    ("other" maps to both zero)."""
    if r.assessment is None:
        raise DomainError(f"session {r.meta.session_id}: assessment required")
    hr = [s.hr_bpm for s in r.samples if s.hr_bpm is not None]
    if len(hr) < 2:
        raise InsufficientDataError(
            f"session {r.meta.session_id}: need >= 2 HR readings, got {len(hr)}")
    channels = {
        "hr": hr,
        "acc_x": [s.acc[0] for s in r.samples],
        "acc_y": [s.acc[1] for s in r.samples],
        "acc_z": [s.acc[2] for s in r.samples],
        "gyro_x": [s.gyro[0] for s in r.samples],
        "gyro_y": [s.gyro[1] for s in r.samples],
        "gyro_z": [s.gyro[2] for s in r.samples],
    }
    row: list[float] = []
    for ch in CHANNELS:
        row.extend(channel_stats(channels[ch]).as_row())
    row.extend(compute_hrv(hr).as_row())
    row.append(float(r.meta.age))
    row.extend(_gender_onehot(r.meta.gender))
    return statistical_column_names(), row


def nonstatistical_column_names() -> tuple[str, ...]:
    return ("hr", "acc_x", "acc_y", "acc_z", "gyro_x", "gyro_y", "gyro_z",
            "age", "gender_male", "gender_female")


def build_nonstatistical_rows(
    r: SessionRecording,
) -> tuple[tuple[str, ...], list[list[float]], str]:
    """One row per cleaned sample. Mid-stream absent HR is carried forward
    from the last observed reading (cleaning guarantees the first sample has
    one). Every row shares the session's label and group id."""
    if r.assessment is None:
        raise DomainError(f"session {r.meta.session_id}: assessment required")
    rows = []
    last_hr: Optional[float] = None
    demo = [float(r.meta.age)] + _gender_onehot(r.meta.gender)
    for s in r.samples:
        if s.hr_bpm is not None:
            last_hr = s.hr_bpm
        if last_hr is None:
            raise DomainError(
                f"session {r.meta.session_id}: leading sample without HR (not cleaned?)")
        rows.append([last_hr, *s.acc, *s.gyro, *demo])
    return nonstatistical_column_names(), rows, r.meta.session_id


def build_matrix(recordings: Sequence[SessionRecording], flavor: str) -> FeatureMatrix:
    """Featurize a cleaned corpus. flavor is "statistical" (one row per
    session) or "nonstatistical" (one row per sample)."""
    if flavor == "statistical":
        names = statistical_column_names()
        rows, labels, gids = [], [], []
        for r in recordings:
            _, row = build_statistical_row(r)
            rows.append(row)
            labels.append(r.mood)
            gids.append(r.meta.session_id)
    elif flavor == "nonstatistical":
        names = nonstatistical_column_names()
        rows, labels, gids = [], [], []
        for r in recordings:
            _, rws, gid = build_nonstatistical_rows(r)
            rows.extend(rws)
            labels.extend([r.mood] * len(rws))
            gids.extend([gid] * len(rws))
    else:
        raise SpecError(f"unknown flavor {flavor!r}")
    return FeatureMatrix(names, np.array(rows, dtype=float).reshape(len(rows), len(names)),
                         tuple(labels), tuple(gids))


@dataclass(frozen=True)
class FeatureSetSpec:
    """Named selector over column groups, mirroring the ablation grid rows."""
    groups: frozenset[str] = frozenset({"hr", "hrv", "acc", "gyro"})
    without_age: bool = False
    without_gender: bool = False
    without_median_mode: bool = False
    pca_components: Optional[int] = None
    name: str = ""

    VALID_GROUPS = frozenset({"hr", "hrv", "acc", "gyro"})

    def __post_init__(self):
        bad = set(self.groups) - self.VALID_GROUPS
        if bad:
            raise SpecError(f"unknown feature groups: {sorted(bad)}")
        if not self.name:
            object.__setattr__(self, "name", self._default_name())

    def _default_name(self) -> str:
        order = ["hrv", "hr", "acc", "gyro"]
        parts = [g for g in order if g in self.groups]
        flags = []
        if self.without_age:
            flags.append("no_age")
        if self.without_gender:
            flags.append("no_gender")
        if self.without_median_mode:
            flags.append("no_median_mode")
        label = "+".join(parts) if parts else "none"
        if flags:
            label += "(" + ",".join(flags) + ")"
        if self.pca_components is not None:
            label = f"pca{self.pca_components}"
        return label

    def _wants(self, col: str) -> bool:
        if col == "age":
            return not self.without_age
        if col.startswith("gender_"):
            return not self.without_gender
        if self.without_median_mode and (col.endswith("_median") or col.endswith("_mode")):
            return False
        if col.startswith("hrv_"):
            return "hrv" in self.groups
        if col == "hr" or col.startswith("hr_"):
            return "hr" in self.groups
        if col.startswith("acc_"):
            return "acc" in self.groups
        if col.startswith("gyro_"):
            return "gyro" in self.groups
        return False

    def resolve(self, column_names: Sequence[str]) -> list[str]:
        selected = [c for c in column_names if self._wants(c)]
        if not selected:
            raise SpecError(f"feature set {self.name!r} resolves to no columns")
        return selected


def select_features(m: FeatureMatrix, spec: FeatureSetSpec) -> FeatureMatrix:
    """Column-subset of m per the spec; rows, labels, and group ids are
    untouched. PCA, if requested, is a separate fit step (see PcaModel)."""
    selected = spec.resolve(m.column_names)
    idx = [m.column_names.index(c) for c in selected]
    return FeatureMatrix(tuple(selected), m.rows[:, idx], m.labels, m.group_ids)


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    std: np.ndarray
    components: np.ndarray  # shape (k, d), rows are eigenvectors

    def transform(self, m: FeatureMatrix) -> FeatureMatrix:
        if m.rows.shape[1] != self.mean.shape[0]:
            raise SpecError("column count does not match fitted PCA")
        z = (m.rows - self.mean) / self.std
        proj = z @ self.components.T
        names = tuple(f"pc{i + 1}" for i in range(self.components.shape[0]))
        return FeatureMatrix(names, proj, m.labels, m.group_ids)


def fit_pca(m: FeatureMatrix, k: int) -> PcaModel:
    """Standardize with the given matrix's statistics, then keep the top-k
    eigenvectors of the covariance matrix (descending eigenvalue order; the
    largest-magnitude loading of each component is made positive)."""
    d = m.rows.shape[1]
    if k > d:
        raise SpecError(f"pca_components {k} exceeds column count {d}")
    if m.n_rows < 2:
        raise SpecError("PCA needs at least 2 rows")
    mean = m.rows.mean(axis=0)
    std = m.rows.std(axis=0)
    std = np.where(std == 0, 1.0, std)
    z = (m.rows - mean) / std
    cov = z.T @ z / z.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:k]
    comps = eigvecs[:, order].T
    for i in range(comps.shape[0]):
        j = np.argmax(np.abs(comps[i]))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return PcaModel(mean=mean, std=std, components=comps)
