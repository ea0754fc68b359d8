"""HTTP/JSON backend for live session collection and on-demand mood
prediction. The browser UI talks only to this API."""

from __future__ import annotations

import enum
import threading
import uuid
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .core import (
    BinaryMood,
    EmotionLabel,
    Gender,
    ParticipantMeta,
    SelfAssessment,
    SensorSample,
    SessionRecording,
)
from .errors import EmptySessionError, InsufficientDataError, WristmoodError
from .evaluation import majority_vote
from .featurization import build_nonstatistical_rows, build_statistical_row
from .ingestion import clean_recording, write_session
from .models import load_model
from .models.base import decode_labels


class SessionState(str, enum.Enum):
    CREATED = "created"
    WARMING_UP = "warming_up"
    RECORDING = "recording"
    AWAITING_ASSESSMENT = "awaiting_assessment"
    FINISHED = "finished"


class CreateSessionBody(BaseModel):
    age: int
    gender: str
    target_emotion: Optional[str] = None


class SampleBody(BaseModel):
    t_ms: int
    hr_bpm: Optional[float] = None
    acc: list[float] = Field(min_length=3, max_length=3)
    gyro: list[float] = Field(min_length=3, max_length=3)


class AssessmentBody(BaseModel):
    valence: int
    arousal: int
    emotion: str


class LiveSession:
    """One in-flight collection session. Request handling is serialized per
    session via its lock."""

    def __init__(self, meta: ParticipantMeta):
        self.session_id = meta.session_id
        self.meta = meta
        self.state = SessionState.CREATED
        self.samples: list[SensorSample] = []
        self.assessment: Optional[SelfAssessment] = None
        self.dropped = 0
        self.lock = threading.Lock()

    def recording(self) -> SessionRecording:
        return SessionRecording(meta=self.meta, samples=tuple(self.samples),
                                assessment=self.assessment)


def _validate_meta(body: CreateSessionBody) -> list[str]:
    violations = []
    if body.age < 16:
        violations.append("age out of range: protocol minimum is 16")
    if body.gender not in {g.value for g in Gender}:
        violations.append(f"gender must be one of male/female/other, got {body.gender!r}")
    if body.target_emotion is not None and body.target_emotion not in {
            e.value for e in EmotionLabel}:
        violations.append(f"unknown target_emotion {body.target_emotion!r}")
    return violations


def create_app(model_path: Optional[str] = None,
               corpus_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="wristmood collection service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, LiveSession] = {}
    registry_lock = threading.Lock()
    model = load_model(model_path) if model_path else None
    corpus = Path(corpus_dir) if corpus_dir else None
    if corpus:
        corpus.mkdir(parents=True, exist_ok=True)
    app.state.sessions = sessions

    def get_session(session_id: str) -> LiveSession:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        violations = _validate_meta(body)
        if violations:
            raise HTTPException(422, detail=violations)
        session_id = uuid.uuid4().hex
        meta = ParticipantMeta(
            session_id=session_id, age=body.age, gender=Gender(body.gender),
            target_emotion=EmotionLabel(body.target_emotion)
            if body.target_emotion else None)
        session = LiveSession(meta)
        with registry_lock:
            sessions[session_id] = session
        return {"session_id": session_id, "state": session.state.value}

    @app.post("/sessions/{session_id}/start")
    def start_session(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if session.state != SessionState.CREATED:
                raise HTTPException(409, f"cannot start in state {session.state.value}")
            session.state = SessionState.WARMING_UP
            return {"state": session.state.value}

    @app.post("/sessions/{session_id}/samples")
    def post_samples(session_id: str, batch: list[SampleBody]):
        session = get_session(session_id)
        with session.lock:
            if session.state not in (SessionState.WARMING_UP, SessionState.RECORDING):
                raise HTTPException(
                    409, f"samples not accepted in state {session.state.value}")
            accepted = dropped = 0
            for item in batch:
                last_t = session.samples[-1].t_ms if session.samples else -1
                if item.t_ms <= last_t:
                    dropped += 1
                    continue
                session.samples.append(SensorSample(
                    t_ms=item.t_ms, hr_bpm=item.hr_bpm,
                    acc=tuple(item.acc), gyro=tuple(item.gyro)))
                accepted += 1
                if (session.state == SessionState.WARMING_UP
                        and item.hr_bpm is not None and item.hr_bpm > 0):
                    session.state = SessionState.RECORDING
            session.dropped += dropped
            return {"accepted": accepted, "dropped": dropped,
                    "state": session.state.value}

    @app.post("/sessions/{session_id}/stop")
    def stop_session(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if session.state not in (SessionState.WARMING_UP, SessionState.RECORDING):
                raise HTTPException(409, f"cannot stop in state {session.state.value}")
            session.state = SessionState.AWAITING_ASSESSMENT
            return {"state": session.state.value}

    @app.post("/sessions/{session_id}/assessment", status_code=204)
    def post_assessment(session_id: str, body: AssessmentBody):
        session = get_session(session_id)
        with session.lock:
            if session.state != SessionState.AWAITING_ASSESSMENT:
                raise HTTPException(
                    409, f"assessment not accepted in state {session.state.value}")
            violations = []
            if not 0 <= body.valence <= 10:
                violations.append("valence out of range 0-10")
            if not 0 <= body.arousal <= 10:
                violations.append("arousal out of range 0-10")
            if body.emotion not in {e.value for e in EmotionLabel}:
                violations.append(f"unknown emotion {body.emotion!r}")
            if violations:
                raise HTTPException(422, detail=violations)
            session.assessment = SelfAssessment(
                valence=body.valence, arousal=body.arousal,
                emotion=EmotionLabel(body.emotion))
            session.state = SessionState.FINISHED
            if corpus:
                write_session(session.recording(),
                              corpus / f"{session.session_id}.jsonl")

    @app.get("/sessions/{session_id}")
    def get_session_info(session_id: str):
        session = get_session(session_id)
        with session.lock:
            last = session.samples[-1] if session.samples else None
            info = {
                "session_id": session.session_id,
                "state": session.state.value,
                "age": session.meta.age,
                "gender": session.meta.gender.value,
                "sample_count": len(session.samples),
                "dropped": session.dropped,
                "last_sample": None if last is None else {
                    "t_ms": last.t_ms, "hr_bpm": last.hr_bpm,
                    "acc": list(last.acc), "gyro": list(last.gyro)},
            }
            # the participant must not learn the operator's target emotion
            # before the session finishes
            if session.state == SessionState.FINISHED:
                info["target_emotion"] = (
                    session.meta.target_emotion.value
                    if session.meta.target_emotion else None)
            return info

    @app.get("/sessions/{session_id}/prediction")
    def get_prediction(session_id: str,
                       path: str = Query("statistical",
                                         pattern="^(statistical|nonstatistical)$")):
        if model is None:
            raise HTTPException(503, "no model loaded")
        session = get_session(session_id)
        with session.lock:
            recording = session.recording()
            state = session.state
        if state not in (SessionState.RECORDING, SessionState.FINISHED,
                         SessionState.AWAITING_ASSESSMENT):
            raise HTTPException(409, f"no prediction in state {state.value}")
        try:
            cleaned, _ = clean_recording(
                SessionRecording(meta=recording.meta, samples=recording.samples,
                                 assessment=None))
        except EmptySessionError:
            raise HTTPException(409, "insufficient data: nothing survives cleaning")
        try:
            if path == "statistical":
                names, row = _statistical_features(cleaned)
                selected_names, x = _select_for_model(model, names, np.array([row]))
                proba = float(model.predict_proba(x)[0])
                mood = decode_labels(model.predict(x))[0]
            else:
                names, rows, _ = _nonstatistical_features(cleaned)
                selected_names, x = _select_for_model(model, names,
                                                      np.array(rows))
                preds = decode_labels(model.predict(x))
                proba = float(model.predict_proba(x).mean())
                mood = majority_vote(preds)
        except InsufficientDataError as exc:
            raise HTTPException(409, f"insufficient data: {exc}")
        except WristmoodError as exc:
            raise HTTPException(409, str(exc))
        return {"mood": mood.value, "probability": proba,
                "features_used": selected_names}

    return app


def _statistical_features(cleaned: SessionRecording):
    # featurization requires an assessment only to label the row; prediction
    # has none, so attach a placeholder and ignore the label
    dummy = SessionRecording(
        meta=cleaned.meta, samples=cleaned.samples,
        assessment=SelfAssessment(valence=5, arousal=5, emotion=EmotionLabel.JOY))
    return build_statistical_row(dummy)


def _nonstatistical_features(cleaned: SessionRecording):
    dummy = SessionRecording(
        meta=cleaned.meta, samples=cleaned.samples,
        assessment=SelfAssessment(valence=5, arousal=5, emotion=EmotionLabel.JOY))
    return build_nonstatistical_rows(dummy)


def _select_for_model(model, names, rows: np.ndarray):
    if model.column_names:
        try:
            idx = [list(names).index(c) for c in model.column_names]
        except ValueError as exc:
            raise InsufficientDataError(
                f"model feature {exc} not available on this path")
        return list(model.column_names), rows[:, idx]
    return list(names), rows
