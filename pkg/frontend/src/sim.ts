/** Built-in simulated sensor stream: stands in for a physical watch by
 * posting synthesized sample batches while a session is warming up or
 * recording. */

import type { Api, Emotion, Sample, ServiceState } from "./api.js";

export interface SimConfig {
    sampleRateHz: number;
    batchIntervalMs: number;
    /** Samples posted before the heart-rate channel comes up. */
    warmupSamples: number;
    emotion: Emotion;
}

/** Qualitative per-emotion signal shape: pleasant emotions sit higher on
 * heart rate, unpleasant higher on motion. Invented magnitudes. */
const EMOTION_PROFILES: Record<Emotion, { hr: number; motion: number; gyro: number }> = {
    joy:          { hr: 95, motion: 1.2, gyro: 0.60 },
    anticipation: { hr: 88, motion: 1.3, gyro: 1.40 },
    surprise:     { hr: 86, motion: 0.8, gyro: 0.55 },
    trust:        { hr: 68, motion: 1.1, gyro: 0.30 },
    anger:        { hr: 74, motion: 2.2, gyro: 1.00 },
    sadness:      { hr: 71, motion: 2.5, gyro: 1.10 },
    disgust:      { hr: 72, motion: 2.0, gyro: 0.95 },
    fear:         { hr: 73, motion: 1.8, gyro: 0.90 },
};

export interface SimEvents {
    onBatch(batch: Sample[], state: ServiceState): void;
    /** Post failure: the stream pauses itself and reports why. */
    onPause(reason: string): void;
}

type Timer = ReturnType<typeof setTimeout>;

export class SensorSimulator {
    private timer: Timer | null = null;
    private inFlight = false;
    private sampleIndex = 0;
    private hrDrift = 0;

    constructor(private readonly api: Api,
                private readonly config: SimConfig,
                private readonly events: SimEvents) {}

    get running(): boolean {
        return this.timer !== null;
    }

    start(sessionId: string): void {
        if (this.timer !== null) return;
        const tick = () => {
            this.timer = setTimeout(tick, this.config.batchIntervalMs);
            void this.postBatch(sessionId);
        };
        this.timer = setTimeout(tick, this.config.batchIntervalMs);
    }

    /** Takes effect within one batch interval: the pending timer is
     * cancelled and no new batch is scheduled. */
    stop(): void {
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
    }

    /** One in-flight batch at a time; a slow response skips ticks instead
     * of stacking requests. */
    private async postBatch(sessionId: string): Promise<void> {
        if (this.inFlight) return;
        this.inFlight = true;
        const batch = this.nextBatch();
        try {
            const result = await this.api.postSamples(sessionId, batch);
            this.events.onBatch(batch, result.state);
        } catch (error) {
            this.stop();
            this.events.onPause(`sample upload failed: ${String(error)}`);
        } finally {
            this.inFlight = false;
        }
    }

    nextBatch(): Sample[] {
        const perBatch = Math.round(
            this.config.sampleRateHz * this.config.batchIntervalMs / 1000);
        const profile = EMOTION_PROFILES[this.config.emotion];
        const stepMs = 1000 / this.config.sampleRateHz;
        const batch: Sample[] = [];
        for (let i = 0; i < perBatch; i++) {
            const index = this.sampleIndex++;
            this.hrDrift = 0.9 * this.hrDrift + 3.0 * (Math.random() * 2 - 1);
            const warm = index < this.config.warmupSamples;
            batch.push({
                t_ms: Math.round(index * stepMs),
                hr_bpm: warm ? null : Math.max(profile.hr + this.hrDrift, 30),
                acc: [
                    profile.motion * (Math.random() * 2 - 1),
                    profile.motion * (Math.random() * 2 - 1),
                    9.81 + profile.motion * (Math.random() * 2 - 1),
                ],
                gyro: [
                    profile.gyro * (Math.random() * 2 - 1),
                    profile.gyro * (Math.random() * 2 - 1),
                    profile.gyro * (Math.random() * 2 - 1),
                ],
            });
        }
        return batch;
    }
}
