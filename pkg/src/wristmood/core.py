"""Domain types shared by every module: emotions, moods, sensor samples,
participant metadata, and whole-session recordings."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import DomainError


class EmotionLabel(str, enum.Enum):
    JOY = "joy"
    TRUST = "trust"
    FEAR = "fear"
    SURPRISE = "surprise"
    SADNESS = "sadness"
    DISGUST = "disgust"
    ANGER = "anger"
    ANTICIPATION = "anticipation"


class BinaryMood(str, enum.Enum):
    PLEASANT = "pleasant"
    UNPLEASANT = "unpleasant"


class Gender(str, enum.Enum):
    MALE = "male"
    FEMALE = "female"
    OTHER = "other"


class AgeGroup(str, enum.Enum):
    G16_30 = "16-30"
    G31_45 = "31-45"
    G45_PLUS = "45+"


_UNPLEASANT = frozenset(
    {EmotionLabel.ANGER, EmotionLabel.SADNESS, EmotionLabel.DISGUST, EmotionLabel.FEAR}
)


def map_emotion(e: EmotionLabel) -> BinaryMood:
    """Collapse the 8-emotion taxonomy to the binary valence target.

    anger/sadness/disgust/fear -> unpleasant; the other four -> pleasant.
    """
    return BinaryMood.UNPLEASANT if e in _UNPLEASANT else BinaryMood.PLEASANT


def age_group(age: int) -> AgeGroup:
    """Bucket an age into the collection-protocol groups. Ages below 16 are
    outside the protocol and rejected."""
    if age < 16:
        raise DomainError(f"age {age} below protocol minimum of 16")
    if age <= 30:
        return AgeGroup.G16_30
    if age <= 45:
        return AgeGroup.G31_45
    return AgeGroup.G45_PLUS


@dataclass(frozen=True)
class SensorSample:
    t_ms: int
    hr_bpm: Optional[float]
    acc: tuple[float, float, float]
    gyro: tuple[float, float, float]


@dataclass(frozen=True)
class ParticipantMeta:
    session_id: str
    age: int
    gender: Gender
    target_emotion: Optional[EmotionLabel] = None

    @property
    def age_group(self) -> AgeGroup:
        return age_group(self.age)


@dataclass(frozen=True)
class SelfAssessment:
    valence: int
    arousal: int
    emotion: EmotionLabel


@dataclass(frozen=True)
class SessionRecording:
    meta: ParticipantMeta
    samples: tuple[SensorSample, ...]
    assessment: Optional[SelfAssessment] = None

    @property
    def mood(self) -> Optional[BinaryMood]:
        if self.assessment is None:
            return None
        return map_emotion(self.assessment.emotion)


def _finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def validate_recording(r: SessionRecording) -> list[str]:
    """Check every recording invariant. Returns one human-readable violation
    per broken rule; an empty list means the recording is accepted everywhere
    downstream. Never raises."""
    violations: list[str] = []
    if not r.meta.session_id:
        violations.append("meta.session_id: empty")
    if r.meta.age < 16:
        violations.append(f"meta.age: {r.meta.age} below protocol minimum of 16")
    prev_t = None
    for i, s in enumerate(r.samples):
        if s.t_ms < 0:
            violations.append(f"samples[{i}].t_ms: negative ({s.t_ms})")
        if prev_t is not None and s.t_ms <= prev_t:
            violations.append(
                f"samples[{i}].t_ms: non-increasing timestamp ({s.t_ms} after {prev_t})"
            )
        prev_t = s.t_ms
        if s.hr_bpm is not None and (not _finite(s.hr_bpm) or s.hr_bpm <= 0):
            violations.append(f"samples[{i}].hr_bpm: not finite and positive ({s.hr_bpm})")
        if len(s.acc) != 3 or not all(_finite(v) for v in s.acc):
            violations.append(f"samples[{i}].acc: non-finite component")
        if len(s.gyro) != 3 or not all(_finite(v) for v in s.gyro):
            violations.append(f"samples[{i}].gyro: non-finite component")
    a = r.assessment
    if a is not None:
        if not 0 <= a.valence <= 10:
            violations.append(f"assessment.valence: out of range 0-10 ({a.valence})")
        if not 0 <= a.arousal <= 10:
            violations.append(f"assessment.arousal: out of range 0-10 ({a.arousal})")
    return violations
