/** Full flow against the real service started by the global setup: the
 * store drives the screens, the simulator supplies the sensor stream, and
 * the outcome is exactly one persisted session plus a displayed prediction. */

import { readdirSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, inject, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { SensorSimulator } from "../src/sim.js";
import { SessionStore } from "../src/store.js";
import { MemoryStorage } from "./fake-api.js";

function sessionFiles(dir: string): string[] {
    return readdirSync(dir).filter((name) => name.endsWith(".jsonl"));
}

describe("end-to-end collection flow", () => {
    it("runs one session and persists exactly one file", async () => {
        const api = new ServiceClient(inject("serviceUrl"));
        const collectedDir = inject("collectedDir");
        const storage = new MemoryStorage();
        const store = new SessionStore(api, storage);

        expect(store.configure("joy", 5)).toBeNull();
        await store.submitDemographics(27, "female");
        expect(store.getState().screen).toBe("warmup");
        const sessionId = store.getState().sessionId!;

        // sensor stream: high rate so the short session still yields enough
        // heart-rate data for the statistical features
        const sim = new SensorSimulator(api, {
            sampleRateHz: 25, batchIntervalMs: 100,
            warmupSamples: 25, emotion: "joy",
        }, {
            onBatch: (batch, state) => store.noteBatch(batch, state),
            onPause: (reason) => { throw new Error(reason); },
        });
        sim.start(sessionId);
        await new Promise((resolve) => setTimeout(resolve, 3_000));
        sim.stop();
        expect(store.getState().screen).toBe("stimulus");
        expect(store.getState().sampleCount).toBeGreaterThan(25);

        await store.stopStimulus();
        expect(store.getState().screen).toBe("assessment");
        await store.answerAssessment(8);
        await store.answerAssessment(6);
        await store.answerAssessment("joy");

        const state = store.getState();
        expect(state.screen).toBe("result");
        expect(state.reportedEmotion).toBe("joy");
        expect(state.targetEmotion).toBe("joy");
        // the result screen shows a prediction from the loaded model
        expect(state.prediction).not.toBeNull();
        expect(["pleasant", "unpleasant"]).toContain(state.prediction!.mood);

        // exactly one persisted session, retrievable via the service
        const files = sessionFiles(collectedDir);
        expect(files).toEqual([`${sessionId}.jsonl`]);
        const lines = readFileSync(join(collectedDir, files[0]), "utf-8")
            .trim().split("\n").map((line) => JSON.parse(line));
        expect(lines[0].type).toBe("meta");
        expect(lines[0].age).toBe(27);
        expect(lines[lines.length - 1]).toMatchObject({
            type: "assessment", valence: 8, arousal: 6, emotion: "joy",
        });
        const info = await api.getSession(sessionId);
        expect(info.state).toBe("finished");
        expect(info.target_emotion).toBe("joy");
    });

    it("resumes a live session from only its stored id", async () => {
        const api = new ServiceClient(inject("serviceUrl"));
        const storage = new MemoryStorage();
        const first = new SessionStore(api, storage);
        first.configure(null, 5);
        await first.submitDemographics(35, "male");
        const sessionId = first.getState().sessionId!;
        await api.postSamples(sessionId, [
            { t_ms: 0, hr_bpm: 70, acc: [0, 0, 9.8], gyro: [0, 0, 0] },
            { t_ms: 200, hr_bpm: 72, acc: [0, 0, 9.8], gyro: [0, 0, 0] },
        ]);

        const reloaded = new SessionStore(api, storage);
        await reloaded.resume();
        expect(reloaded.getState().sessionId).toBe(sessionId);
        expect(reloaded.getState().screen).toBe("stimulus");
        expect(reloaded.getState().sampleCount).toBe(2);
    });

    it("keeps the screen and shows a banner on a service conflict", async () => {
        const api = new ServiceClient(inject("serviceUrl"));
        const store = new SessionStore(api, new MemoryStorage());
        store.configure(null, 5);
        await store.submitDemographics(20, "other");
        // stopping before any samples is legal (warming_up), but stopping
        // twice is a 409 the store must surface without advancing
        await store.refresh();
        expect(store.getState().screen).toBe("warmup");
        const sessionId = store.getState().sessionId!;
        await api.stopSession(sessionId);
        await api.postAssessment(sessionId, 5, 5, "trust");
        await store.refresh();
        expect(store.getState().screen).toBe("result");
    });
});
