"""Session file I/O and cleaning.

Session files are UTF-8, line-delimited JSON records with a "type"
discriminator: exactly one "meta" record first, then N "sample" records,
then at most one "assessment" record last. A flat CSV export (one row per
sample, meta columns repeated) is accepted read-only.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .core import (
    EmotionLabel,
    Gender,
    ParticipantMeta,
    SelfAssessment,
    SensorSample,
    SessionRecording,
    validate_recording,
)
from .errors import DomainError, EmptySessionError, FormatError, ParseError

# Physiological plausibility window for NN intervals (30-200 bpm).
NN_MIN_MS = 300.0
NN_MAX_MS = 2000.0


@dataclass(frozen=True)
class CleaningReport:
    warmup_samples_dropped: int
    invalid_samples_dropped: int
    nn_intervals_removed: int = 0


def _parse_meta(obj: dict, line_number: int) -> ParticipantMeta:
    try:
        target = obj.get("target_emotion")
        return ParticipantMeta(
            session_id=str(obj["session_id"]),
            age=int(obj["age"]),
            gender=Gender(obj["gender"]),
            target_emotion=EmotionLabel(target) if target is not None else None,
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad meta record: {exc}", line_number) from exc


def _parse_sample(obj: dict, line_number: int) -> SensorSample:
    try:
        hr = obj["hr_bpm"]
        return SensorSample(
            t_ms=int(obj["t_ms"]),
            hr_bpm=float(hr) if hr is not None else None,
            acc=tuple(float(v) for v in obj["acc"]),
            gyro=tuple(float(v) for v in obj["gyro"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad sample record: {exc}", line_number) from exc


def _parse_assessment(obj: dict, line_number: int) -> SelfAssessment:
    try:
        return SelfAssessment(
            valence=int(obj["valence"]),
            arousal=int(obj["arousal"]),
            emotion=EmotionLabel(obj["emotion"]),
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad assessment record: {exc}", line_number) from exc


def parse_session(path: Union[str, Path]) -> SessionRecording:
    """Parse one line-delimited session file into a SessionRecording."""
    meta: Optional[ParticipantMeta] = None
    samples: list[SensorSample] = []
    assessment: Optional[SelfAssessment] = None
    with open(path, "r", encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", n) from exc
            kind = obj.get("type")
            if kind == "meta":
                if meta is not None:
                    raise FormatError(f"{path}: duplicate meta record at line {n}")
                if samples or assessment is not None:
                    raise FormatError(f"{path}: meta record must come first (line {n})")
                meta = _parse_meta(obj, n)
            elif kind == "sample":
                if meta is None:
                    raise FormatError(f"{path}: sample before meta at line {n}")
                if assessment is not None:
                    raise FormatError(f"{path}: sample after assessment at line {n}")
                samples.append(_parse_sample(obj, n))
            elif kind == "assessment":
                if meta is None:
                    raise FormatError(f"{path}: assessment before meta at line {n}")
                if assessment is not None:
                    raise FormatError(f"{path}: duplicate assessment at line {n}")
                assessment = _parse_assessment(obj, n)
            else:
                raise ParseError(f"unknown record type {kind!r}", n)
    if meta is None:
        raise FormatError(f"{path}: missing meta record")
    return SessionRecording(meta=meta, samples=tuple(samples), assessment=assessment)


def _meta_record(meta: ParticipantMeta) -> dict:
    rec = {"type": "meta", "session_id": meta.session_id, "age": meta.age,
           "gender": meta.gender.value}
    if meta.target_emotion is not None:
        rec["target_emotion"] = meta.target_emotion.value
    return rec


def _sample_record(s: SensorSample) -> dict:
    return {"type": "sample", "t_ms": s.t_ms, "hr_bpm": s.hr_bpm,
            "acc": list(s.acc), "gyro": list(s.gyro)}


def write_session(r: SessionRecording, path: Union[str, Path]) -> None:
    """Write a recording in the canonical session-file form (atomic rename)."""
    lines = [json.dumps(_meta_record(r.meta), separators=(",", ":"))]
    for s in r.samples:
        lines.append(json.dumps(_sample_record(s), separators=(",", ":")))
    if r.assessment is not None:
        a = r.assessment
        lines.append(json.dumps(
            {"type": "assessment", "valence": a.valence, "arousal": a.arousal,
             "emotion": a.emotion.value},
            separators=(",", ":")))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def load_corpus(directory: Union[str, Path]) -> list[SessionRecording]:
    """Parse every *.jsonl session file in a directory, sorted by filename."""
    directory = Path(directory)
    recordings = []
    for path in sorted(directory.glob("*.jsonl")):
        recordings.append(parse_session(path))
    return recordings


def read_corpus_csv(path: Union[str, Path]) -> list[SessionRecording]:
    """Read the flat CSV export: one row per sample with the meta (and
    assessment, if any) columns repeated. Rows are grouped by session_id in
    file order."""
    by_session: dict[str, dict] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            sid = row["session_id"]
            entry = by_session.setdefault(sid, {"meta": None, "samples": [], "assessment": None})
            if entry["meta"] is None:
                target = row.get("target_emotion") or None
                entry["meta"] = ParticipantMeta(
                    session_id=sid,
                    age=int(row["age"]),
                    gender=Gender(row["gender"]),
                    target_emotion=EmotionLabel(target) if target else None,
                )
                if row.get("emotion"):
                    entry["assessment"] = SelfAssessment(
                        valence=int(row["valence"]),
                        arousal=int(row["arousal"]),
                        emotion=EmotionLabel(row["emotion"]),
                    )
            hr = row.get("hr_bpm")
            entry["samples"].append(SensorSample(
                t_ms=int(row["t_ms"]),
                hr_bpm=float(hr) if hr not in (None, "", "null") else None,
                acc=(float(row["acc_x"]), float(row["acc_y"]), float(row["acc_z"])),
                gyro=(float(row["gyro_x"]), float(row["gyro_y"]), float(row["gyro_z"])),
            ))
    return [
        SessionRecording(meta=e["meta"], samples=tuple(e["samples"]), assessment=e["assessment"])
        for e in by_session.values()
    ]


def _sample_is_valid(s: SensorSample) -> bool:
    vals = list(s.acc) + list(s.gyro)
    if s.hr_bpm is not None:
        vals.append(s.hr_bpm)
    return all(math.isfinite(v) for v in vals)


def clean_recording(r: SessionRecording) -> tuple[SessionRecording, CleaningReport]:
    """Drop the PPG warm-up (leading samples with absent/zero hr_bpm) and any
    sample carrying a non-finite field. Raises EmptySessionError if nothing
    survives."""
    samples = list(r.samples)
    warmup = 0
    while samples and (samples[0].hr_bpm is None or samples[0].hr_bpm == 0):
        samples.pop(0)
        warmup += 1
    kept = [s for s in samples if _sample_is_valid(s)]
    invalid = len(samples) - len(kept)
    if not kept:
        raise EmptySessionError(
            f"session {r.meta.session_id}: no samples survive cleaning")
    cleaned = SessionRecording(meta=r.meta, samples=tuple(kept), assessment=r.assessment)
    return cleaned, CleaningReport(warmup_samples_dropped=warmup,
                                   invalid_samples_dropped=invalid)


def clean_nn_intervals(nn: Sequence[float],
                       min_ms: float = NN_MIN_MS,
                       max_ms: float = NN_MAX_MS) -> list[float]:
    """Reject NN intervals outside the plausibility window, preserving order.
    This is the "cleaned data" fed to the SDNN computation."""
    for v in nn:
        if v <= 0:
            raise DomainError(f"NN interval must be positive, got {v}")
    return [v for v in nn if min_ms <= v <= max_ms]
