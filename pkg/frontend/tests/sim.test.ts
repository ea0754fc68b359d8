import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { Sample, ServiceState } from "../src/api.js";
import { SensorSimulator, type SimConfig } from "../src/sim.js";
import { FakeApi } from "./fake-api.js";

function makeSim(api: FakeApi, overrides: Partial<SimConfig> = {}) {
    const batches: Array<{ batch: Sample[]; state: ServiceState }> = [];
    const pauses: string[] = [];
    const sim = new SensorSimulator(api, {
        sampleRateHz: 25,
        batchIntervalMs: 500,
        warmupSamples: 10,
        emotion: "joy",
        ...overrides,
    }, {
        onBatch: (batch, state) => batches.push({ batch, state }),
        onPause: (reason) => pauses.push(reason),
    });
    return { sim, batches, pauses };
}

async function startedSession(api: FakeApi): Promise<string> {
    const { session_id } = await api.createSession(25, "female", "joy");
    await api.startSession(session_id);
    return session_id;
}

describe("simulated sensor stream", () => {
    beforeEach(() => vi.useFakeTimers());
    afterEach(() => vi.useRealTimers());

    it("posts 250 samples over 10 s at 25 Hz (±1 batch)", async () => {
        const api = new FakeApi();
        const sessionId = await startedSession(api);
        const { sim } = makeSim(api);
        sim.start(sessionId);
        await vi.advanceTimersByTimeAsync(10_000);
        sim.stop();
        const posted = (await api.getSession(sessionId)).sample_count;
        const perBatch = 25 * 0.5;
        expect(Math.abs(posted - 250)).toBeLessThanOrEqual(perBatch);
    });

    it("stops within one batch interval when disabled", async () => {
        const api = new FakeApi();
        const sessionId = await startedSession(api);
        const { sim } = makeSim(api);
        sim.start(sessionId);
        await vi.advanceTimersByTimeAsync(2_000);
        sim.stop();
        const atStop = (await api.getSession(sessionId)).sample_count;
        await vi.advanceTimersByTimeAsync(5_000);
        expect((await api.getSession(sessionId)).sample_count).toBe(atStop);
        expect(sim.running).toBe(false);
    });

    it("holds back heart rate for the configured warm-up then emits it", async () => {
        const api = new FakeApi();
        const sessionId = await startedSession(api);
        const { sim, batches } = makeSim(api, { warmupSamples: 15 });
        sim.start(sessionId);
        await vi.advanceTimersByTimeAsync(2_000);
        sim.stop();
        const samples = batches.flatMap((b) => b.batch);
        expect(samples.slice(0, 15).every((s) => s.hr_bpm === null)).toBe(true);
        expect(samples.slice(15).every((s) => s.hr_bpm !== null)).toBe(true);
        // the service flips to recording on the first present heart rate
        expect(batches[0].state).toBe("warming_up");
        expect(batches[batches.length - 1].state).toBe("recording");
    });

    it("emits strictly increasing timestamps so the service drops nothing", async () => {
        const api = new FakeApi();
        const sessionId = await startedSession(api);
        const { sim } = makeSim(api);
        sim.start(sessionId);
        await vi.advanceTimersByTimeAsync(4_000);
        sim.stop();
        expect((await api.getSession(sessionId)).dropped).toBe(0);
    });

    it("pauses itself and reports when a post fails", async () => {
        const api = new FakeApi();
        const sessionId = await startedSession(api);
        const { sim, pauses } = makeSim(api);
        sim.start(sessionId);
        await vi.advanceTimersByTimeAsync(1_000);
        api.failWith = new Error("connection reset");
        await vi.advanceTimersByTimeAsync(1_000);
        expect(sim.running).toBe(false);
        expect(pauses.length).toBe(1);
        expect(pauses[0]).toContain("sample upload failed");
    });

    it("keeps at most one batch in flight", async () => {
        const api = new FakeApi();
        const sessionId = await startedSession(api);
        let inFlight = 0;
        let peak = 0;
        const original = api.postSamples.bind(api);
        api.postSamples = async (sid, batch) => {
            inFlight++;
            peak = Math.max(peak, inFlight);
            // responses arrive slower than the tick interval
            await new Promise((resolve) => setTimeout(resolve, 1_200));
            inFlight--;
            return original(sid, batch);
        };
        const { sim } = makeSim(api);
        sim.start(sessionId);
        await vi.advanceTimersByTimeAsync(6_000);
        sim.stop();
        await vi.advanceTimersByTimeAsync(2_000);
        expect(peak).toBe(1);
    });
});
