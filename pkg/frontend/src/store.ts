/** Single store for the whole app. Every state change flows through
 * update(), so UI rendering and tests observe one serialized sequence of
 * snapshots. */

import {
    ApiError,
    EMOTIONS,
    GENDERS,
    type Emotion,
    type Gender,
    type Prediction,
    type Sample,
    type Api,
    type ServiceState,
} from "./api.js";

export type Screen =
    | "setup"        // operator: service URL, target emotion, stimulus length
    | "demographics" // participant: age + gender
    | "warmup"       // waiting for the heart-rate stream to come up
    | "stimulus"     // countdown while the participant watches the stimulus
    | "assessment"   // the three self-report prompts
    | "result";      // predicted mood vs reported emotion

/** The three self-report prompts, asked in this order. The wording is part
 * of the collection protocol and must not be edited. */
export const ASSESSMENT_PROMPTS = [
    "How much pleasant are you feeling after watching the video? Rate on a scale of 0-10",
    "How intense is your feeling? Rate on a scale of 0-10",
    "Please select the emotion felt by you after watching the video",
] as const;

export interface UiState {
    screen: Screen;
    operatorView: boolean;
    sessionId: string | null;
    serviceState: ServiceState | null;
    /** Operator-chosen target; never shown on the participant view before
     * the session finishes. */
    targetEmotion: Emotion | null;
    stimulusSeconds: number;
    stimulusRemaining: number;
    assessmentStep: 0 | 1 | 2;
    valence: number | null;
    arousal: number | null;
    reportedEmotion: Emotion | null;
    latestSample: Sample | null;
    hrHistory: number[];
    sampleCount: number;
    prediction: Prediction | null;
    /** Retryable error banner; null when the last call succeeded. */
    banner: string | null;
    busy: boolean;
}

/** Minimal persistence interface (window.localStorage satisfies it). Only
 * the session id survives a reload; everything else is recovered from the
 * service. */
export interface KeyValueStorage {
    getItem(key: string): string | null;
    setItem(key: string, value: string): void;
    removeItem(key: string): void;
}

const SESSION_KEY = "wristmood.session_id";
const HR_HISTORY_LIMIT = 120;

export function validateAge(age: number): string | null {
    if (!Number.isInteger(age)) return "age must be a whole number";
    if (age < 16) return "age out of range: protocol minimum is 16";
    return null;
}

export function validateGender(gender: string): string | null {
    return (GENDERS as readonly string[]).includes(gender)
        ? null : "gender must be one of male/female/other";
}

export function validateRating(value: number): string | null {
    if (!Number.isInteger(value)) return "rating must be a whole number";
    if (value < 0 || value > 10) return "rating out of range 0-10";
    return null;
}

export function validateEmotion(emotion: string): string | null {
    return (EMOTIONS as readonly string[]).includes(emotion)
        ? null : "unknown emotion";
}

function initialState(): UiState {
    return {
        screen: "setup",
        operatorView: true,
        sessionId: null,
        serviceState: null,
        targetEmotion: null,
        stimulusSeconds: 60,
        stimulusRemaining: 60,
        assessmentStep: 0,
        valence: null,
        arousal: null,
        reportedEmotion: null,
        latestSample: null,
        hrHistory: [],
        sampleCount: 0,
        prediction: null,
        banner: null,
        busy: false,
    };
}

export class SessionStore {
    private state: UiState = initialState();
    private listeners: Array<(state: UiState) => void> = [];
    /** Serializes every mutation behind the previous one. */
    private chain: Promise<void> = Promise.resolve();

    constructor(private readonly api: Api,
                private readonly storage: KeyValueStorage) {}

    getState(): UiState {
        return this.state;
    }

    subscribe(listener: (state: UiState) => void): () => void {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }

    private update(patch: Partial<UiState>): void {
        this.state = { ...this.state, ...patch };
        for (const listener of this.listeners) {
            listener(this.state);
        }
    }

    /** Queues an async mutation so state transitions never interleave. */
    private enqueue(action: () => Promise<void>): Promise<void> {
        this.chain = this.chain.then(action, action);
        return this.chain;
    }

    /** Runs a service call; on failure shows a retryable banner and keeps
     * the current screen (state never advances on 4xx/5xx). */
    private async call(work: () => Promise<void>): Promise<boolean> {
        this.update({ busy: true, banner: null });
        try {
            await work();
            this.update({ busy: false });
            return true;
        } catch (error) {
            const message = error instanceof ApiError
                ? error.message
                : `service unreachable: ${String(error)}`;
            this.update({ busy: false, banner: message });
            return false;
        }
    }

    setOperatorView(operatorView: boolean): void {
        this.update({ operatorView });
    }

    dismissBanner(): void {
        this.update({ banner: null });
    }

    /** Setup screen: the operator picks the target emotion (hidden from the
     * participant) and the stimulus duration, then hands over. */
    configure(targetEmotion: Emotion | null, stimulusSeconds: number): string | null {
        if (this.state.screen !== "setup") return "not on the setup screen";
        if (targetEmotion !== null && validateEmotion(targetEmotion) !== null) {
            return "unknown emotion";
        }
        if (!Number.isFinite(stimulusSeconds) || stimulusSeconds <= 0) {
            return "stimulus duration must be positive";
        }
        this.update({
            targetEmotion,
            stimulusSeconds,
            stimulusRemaining: stimulusSeconds,
            screen: "demographics",
        });
        return null;
    }

    /** Demographics screen: validates locally with the same rules the
     * service enforces, creates the session, and starts warm-up. */
    submitDemographics(age: number, gender: Gender): Promise<void> {
        return this.enqueue(async () => {
            if (this.state.screen !== "demographics") return;
            const problem = validateAge(age) ?? validateGender(gender);
            if (problem !== null) {
                this.update({ banner: problem });
                return;
            }
            await this.call(async () => {
                const created = await this.api.createSession(
                    age, gender, this.state.targetEmotion);
                const started = await this.api.startSession(created.session_id);
                this.storage.setItem(SESSION_KEY, created.session_id);
                this.update({
                    sessionId: created.session_id,
                    serviceState: started.state,
                    screen: "warmup",
                });
            });
        });
    }

    /** Folds a posted-batch result into the live readout and advances the
     * warm-up screen once the service reports `recording`. */
    noteBatch(batch: Sample[], state: ServiceState): void {
        const hr = this.state.hrHistory.slice();
        for (const sample of batch) {
            if (sample.hr_bpm !== null) hr.push(sample.hr_bpm);
        }
        this.update({
            serviceState: state,
            latestSample: batch.length > 0
                ? batch[batch.length - 1] : this.state.latestSample,
            sampleCount: this.state.sampleCount + batch.length,
            hrHistory: hr.slice(-HR_HISTORY_LIMIT),
            screen: this.state.screen === "warmup" && state === "recording"
                ? "stimulus" : this.state.screen,
        });
    }

    /** Polls the service; used by the warm-up indicator and by resume. */
    refresh(): Promise<void> {
        return this.enqueue(async () => {
            const sessionId = this.state.sessionId;
            if (sessionId === null) return;
            await this.call(async () => {
                const info = await this.api.getSession(sessionId);
                this.update({
                    serviceState: info.state,
                    sampleCount: info.sample_count,
                    latestSample: info.last_sample,
                    screen: this.screenFor(info.state),
                });
            });
        });
    }

    private screenFor(state: ServiceState): Screen {
        switch (state) {
            case "created":
            case "warming_up":
                return "warmup";
            case "recording":
                return "stimulus";
            case "awaiting_assessment":
                return "assessment";
            case "finished":
                return "result";
        }
    }

    tickStimulus(seconds: number): void {
        if (this.state.screen !== "stimulus") return;
        this.update({
            stimulusRemaining: Math.max(this.state.stimulusRemaining - seconds, 0),
        });
    }

    /** Ends the stimulus (timer expiry or operator cut) and moves to the
     * assessment prompts. */
    stopStimulus(): Promise<void> {
        return this.enqueue(async () => {
            if (this.state.screen !== "stimulus") return;
            await this.call(async () => {
                const stopped = await this.api.stopSession(this.state.sessionId!);
                this.update({
                    serviceState: stopped.state,
                    screen: "assessment",
                    assessmentStep: 0,
                });
            });
        });
    }

    /** Answers the current prompt; only the final answer talks to the
     * service, and only a 2xx advances past it. */
    answerAssessment(answer: number | Emotion): Promise<void> {
        return this.enqueue(async () => {
            if (this.state.screen !== "assessment") return;
            const step = this.state.assessmentStep;
            if (step < 2) {
                const rating = answer as number;
                const problem = validateRating(rating);
                if (problem !== null) {
                    this.update({ banner: problem });
                    return;
                }
                this.update(step === 0
                    ? { valence: rating, assessmentStep: 1, banner: null }
                    : { arousal: rating, assessmentStep: 2, banner: null });
                return;
            }
            const emotion = answer as Emotion;
            if (validateEmotion(emotion) !== null) {
                this.update({ banner: "unknown emotion" });
                return;
            }
            await this.call(async () => {
                await this.api.postAssessment(
                    this.state.sessionId!, this.state.valence!,
                    this.state.arousal!, emotion);
                this.update({ reportedEmotion: emotion });
                const info = await this.api.getSession(this.state.sessionId!);
                let prediction: Prediction | null = null;
                try {
                    prediction = await this.api.getPrediction(this.state.sessionId!);
                } catch {
                    // no model loaded / too little data: the result screen
                    // still shows the reported emotion
                }
                this.update({
                    serviceState: info.state,
                    targetEmotion: info.target_emotion ?? this.state.targetEmotion,
                    prediction,
                    screen: "result",
                });
                this.storage.removeItem(SESSION_KEY);
            });
        });
    }

    /** Reload recovery: only the session id is persisted; everything else
     * comes back from the service, landing on the right screen. */
    resume(): Promise<void> {
        return this.enqueue(async () => {
            const sessionId = this.storage.getItem(SESSION_KEY);
            if (sessionId === null) return;
            await this.call(async () => {
                const info = await this.api.getSession(sessionId);
                this.update({
                    sessionId,
                    serviceState: info.state,
                    sampleCount: info.sample_count,
                    latestSample: info.last_sample,
                    screen: this.screenFor(info.state),
                });
                if (info.state === "finished") {
                    this.storage.removeItem(SESSION_KEY);
                }
            });
        });
    }

    /** What the current view may display. The participant view never sees
     * the target emotion before the session finishes. */
    visibleTargetEmotion(): Emotion | null {
        if (this.state.operatorView || this.state.screen === "result") {
            return this.state.targetEmotion;
        }
        return null;
    }

    reset(): void {
        this.storage.removeItem(SESSION_KEY);
        this.state = initialState();
        this.update({});
    }
}
