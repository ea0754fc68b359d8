/** Typed client for the collection service. All UI traffic goes through
 * here; the only configuration is the service base URL. */

export const EMOTIONS = [
    "joy", "trust", "fear", "surprise",
    "sadness", "disgust", "anger", "anticipation",
] as const;
export type Emotion = (typeof EMOTIONS)[number];

export const GENDERS = ["male", "female", "other"] as const;
export type Gender = (typeof GENDERS)[number];

export type ServiceState =
    | "created" | "warming_up" | "recording"
    | "awaiting_assessment" | "finished";

export interface Sample {
    t_ms: number;
    hr_bpm: number | null;
    acc: [number, number, number];
    gyro: [number, number, number];
}

export interface SessionInfo {
    session_id: string;
    state: ServiceState;
    age: number;
    gender: Gender;
    sample_count: number;
    dropped: number;
    last_sample: Sample | null;
    /** Present only once the session is finished. */
    target_emotion?: Emotion | null;
}

export interface BatchResult {
    accepted: number;
    dropped: number;
    state: ServiceState;
}

export interface Prediction {
    mood: "pleasant" | "unpleasant";
    probability: number;
    features_used: string[];
}

/** Non-2xx response; `status` lets the store decide between a retryable
 * banner (any 4xx/5xx) and a conflict it must re-sync from. */
export class ApiError extends Error {
    constructor(readonly status: number, readonly detail: string) {
        super(`service responded ${status}: ${detail}`);
    }
}

/** What the store and simulator need from the service; ServiceClient is
 * the real HTTP implementation, tests substitute fakes. */
export interface Api {
    createSession(age: number, gender: Gender, targetEmotion: Emotion | null):
        Promise<{ session_id: string; state: ServiceState }>;
    startSession(sessionId: string): Promise<{ state: ServiceState }>;
    postSamples(sessionId: string, batch: Sample[]): Promise<BatchResult>;
    stopSession(sessionId: string): Promise<{ state: ServiceState }>;
    postAssessment(sessionId: string, valence: number, arousal: number,
                   emotion: Emotion): Promise<void>;
    getSession(sessionId: string): Promise<SessionInfo>;
    getPrediction(sessionId: string): Promise<Prediction>;
}

export class ServiceClient implements Api {
    constructor(private readonly baseUrl: string) {
        this.baseUrl = baseUrl.replace(/\/+$/, "");
    }

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const response = await fetch(`${this.baseUrl}${path}`, {
            method,
            headers: body === undefined ? {} : { "Content-Type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const payload = await response.json();
                detail = typeof payload.detail === "string"
                    ? payload.detail : JSON.stringify(payload.detail);
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(response.status, detail);
        }
        if (response.status === 204) {
            return undefined as T;
        }
        return response.json() as Promise<T>;
    }

    createSession(age: number, gender: Gender, targetEmotion: Emotion | null):
        Promise<{ session_id: string; state: ServiceState }> {
        const body: Record<string, unknown> = { age, gender };
        if (targetEmotion !== null) {
            body.target_emotion = targetEmotion;
        }
        return this.request("POST", "/sessions", body);
    }

    startSession(sessionId: string): Promise<{ state: ServiceState }> {
        return this.request("POST", `/sessions/${sessionId}/start`);
    }

    postSamples(sessionId: string, batch: Sample[]): Promise<BatchResult> {
        return this.request("POST", `/sessions/${sessionId}/samples`, batch);
    }

    stopSession(sessionId: string): Promise<{ state: ServiceState }> {
        return this.request("POST", `/sessions/${sessionId}/stop`);
    }

    postAssessment(sessionId: string, valence: number, arousal: number,
                   emotion: Emotion): Promise<void> {
        return this.request("POST", `/sessions/${sessionId}/assessment`,
                            { valence, arousal, emotion });
    }

    getSession(sessionId: string): Promise<SessionInfo> {
        return this.request("GET", `/sessions/${sessionId}`);
    }

    getPrediction(sessionId: string): Promise<Prediction> {
        return this.request("GET", `/sessions/${sessionId}/prediction`);
    }
}
