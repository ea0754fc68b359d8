"""Smartwatch mood pipeline: session ingestion, HRV featurization, a
from-scratch pleasant/unpleasant classifier zoo, an ablation harness, a
synthetic corpus generator, and a live collection service."""

from .core import (
    AgeGroup,
    BinaryMood,
    EmotionLabel,
    Gender,
    ParticipantMeta,
    SelfAssessment,
    SensorSample,
    SessionRecording,
    age_group,
    map_emotion,
    validate_recording,
)

__version__ = "0.1.0"

__all__ = [
    "AgeGroup", "BinaryMood", "EmotionLabel", "Gender", "ParticipantMeta",
    "SelfAssessment", "SensorSample", "SessionRecording", "age_group",
    "map_emotion", "validate_recording", "__version__",
]
