"""Seeded synthetic session generator: mood-conditioned heart-rate and
motion signals standing in for the private volunteer corpus."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .core import (
    EmotionLabel,
    Gender,
    ParticipantMeta,
    SelfAssessment,
    SensorSample,
    SessionRecording,
    map_emotion,
    BinaryMood,
)
from .errors import SpecError
from .ingestion import write_session

# Qualitative pattern encoded by the defaults: pleasant sessions sit at the
# higher end of mean heart rate, unpleasant at the higher end of motion.
# Magnitudes are invented configuration, not measured values.
_DEFAULT_EMOTION_PARAMS = {
    #                     hr_baseline  motion_energy  gyro_energy
    EmotionLabel.JOY:          (95.0,      1.2,          0.60),
    EmotionLabel.ANTICIPATION: (88.0,      1.3,          1.40),
    EmotionLabel.SURPRISE:     (86.0,      0.8,          0.55),
    EmotionLabel.TRUST:        (68.0,      1.1,          0.30),
    EmotionLabel.ANGER:        (74.0,      2.2,          1.00),
    EmotionLabel.SADNESS:      (71.0,      2.5,          1.10),
    EmotionLabel.DISGUST:      (72.0,      2.0,          0.95),
    EmotionLabel.FEAR:         (73.0,      1.8,          0.90),
}
_HR_CENTER = 78.0
_MOTION_CENTER = 1.5
_GYRO_CENTER = 0.85

# HR changes slowly relative to the sampling rate.
AR1_COEFF = 0.9


@dataclass(frozen=True)
class MoodProfile:
    hr_baseline: dict[EmotionLabel, float]
    hr_sd: float
    motion_energy: dict[EmotionLabel, float]
    gyro_energy: dict[EmotionLabel, float]
    effect_size: float = 1.0

    @classmethod
    def default(cls, effect_size: float = 1.0) -> "MoodProfile":
        scale = lambda v, c: c + effect_size * (v - c)
        return cls(
            hr_baseline={e: scale(p[0], _HR_CENTER)
                         for e, p in _DEFAULT_EMOTION_PARAMS.items()},
            hr_sd=3.0,
            motion_energy={e: max(scale(p[1], _MOTION_CENTER), 0.0)
                           for e, p in _DEFAULT_EMOTION_PARAMS.items()},
            gyro_energy={e: max(scale(p[2], _GYRO_CENTER), 0.0)
                         for e, p in _DEFAULT_EMOTION_PARAMS.items()},
            effect_size=effect_size,
        )


@dataclass(frozen=True)
class GeneratorConfig:
    sessions_per_emotion: int = 10
    duration_s: float = 60.0
    sample_rate_hz: float = 5.0
    warmup_s: float = 10.0
    seed: int = 0
    profile: Optional[MoodProfile] = None

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise SpecError("sample_rate_hz must be > 0")
        if not self.duration_s > self.warmup_s >= 0:
            raise SpecError("need duration_s > warmup_s >= 0")
        if self.sessions_per_emotion < 1:
            raise SpecError("sessions_per_emotion must be >= 1")
        if self.profile is None:
            object.__setattr__(self, "profile", MoodProfile.default())


_EMOTIONS = list(EmotionLabel)


def _session_rng(cfg: GeneratorConfig, index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(index,)))


def _generate_samples(cfg: GeneratorConfig, emotion: EmotionLabel,
                      rng: np.random.Generator) -> list[SensorSample]:
    profile = cfg.profile
    n = int(round(cfg.duration_s * cfg.sample_rate_hz))
    warmup_n = int(round(cfg.warmup_s * cfg.sample_rate_hz))
    baseline = profile.hr_baseline[emotion]
    acc_sd = profile.motion_energy[emotion]
    gyro_sd = profile.gyro_energy[emotion]
    samples = []
    hr_dev = 0.0
    for i in range(n):
        t_ms = int(round(i * 1000.0 / cfg.sample_rate_hz))
        hr_dev = AR1_COEFF * hr_dev + rng.normal(0.0, profile.hr_sd)
        hr = None if i < warmup_n else max(baseline + hr_dev, 30.0)
        acc = tuple(rng.normal(0.0, acc_sd) for _ in range(3))
        # gravity on z keeps accelerometer magnitudes realistic
        acc = (acc[0], acc[1], acc[2] + 9.81)
        gyro = tuple(rng.normal(0.0, gyro_sd) for _ in range(3))
        samples.append(SensorSample(t_ms=t_ms, hr_bpm=hr, acc=acc, gyro=gyro))
    return samples


def _generate_session(cfg: GeneratorConfig, emotion: EmotionLabel,
                      index: int) -> SessionRecording:
    rng = _session_rng(cfg, index)
    samples = _generate_samples(cfg, emotion, rng)
    age = int(rng.integers(16, 61))
    # alternate within each emotion across slots so gender stays balanced
    # per class
    gender = Gender.MALE if (index // 8 + index % 8) % 2 == 0 else Gender.FEMALE
    if map_emotion(emotion) == BinaryMood.PLEASANT:
        valence = int(np.clip(7 + rng.integers(-1, 2), 6, 10))
    else:
        valence = int(np.clip(3 + rng.integers(-1, 2), 0, 4))
    arousal = int(rng.integers(3, 9))
    meta = ParticipantMeta(
        session_id=f"synth-{cfg.seed}-{index:04d}-{emotion.value}",
        age=age, gender=gender, target_emotion=emotion)
    assessment = SelfAssessment(valence=valence, arousal=arousal, emotion=emotion)
    return SessionRecording(meta=meta, samples=tuple(samples), assessment=assessment)


def generate_corpus(cfg: GeneratorConfig) -> list[SessionRecording]:
    """sessions_per_emotion recordings for each of the 8 emotions, fully
    determined by cfg.seed."""
    recordings = []
    index = 0
    for slot in range(cfg.sessions_per_emotion):
        for emotion in _EMOTIONS:
            recordings.append(_generate_session(cfg, emotion, index))
            index += 1
    return recordings


def write_corpus(recordings, directory, cfg: Optional[GeneratorConfig] = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {"sessions": []}
    if cfg is not None:
        manifest["seed"] = cfg.seed
        manifest["sessions_per_emotion"] = cfg.sessions_per_emotion
    for r in recordings:
        filename = f"{r.meta.session_id}.jsonl"
        write_session(r, directory / filename)
        manifest["sessions"].append(filename)
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=1), encoding="utf-8")


def stream_session(cfg: GeneratorConfig, emotion: EmotionLabel,
                   sink: Callable[[SensorSample], None],
                   index: int = 0, pacing: float = 0.0) -> SessionRecording:
    """Emit the exact samples generate_corpus would produce for this slot,
    one at a time. pacing scales simulated time (0 = as fast as possible).
    Returns the full recording for convenience."""
    recording = _generate_session(cfg, emotion, index)
    prev_t = 0
    for s in recording.samples:
        if pacing > 0:
            time.sleep(pacing * (s.t_ms - prev_t) / 1000.0)
            prev_t = s.t_ms
        sink(s)
    return recording
