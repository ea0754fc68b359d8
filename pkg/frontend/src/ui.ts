/** DOM layer: renders the current store snapshot and wires user input back
 * into the store. One shared machine, switchable between the operator view
 * (sees everything) and the participant view (never sees the target
 * emotion before the result screen). */

import { EMOTIONS, GENDERS, ServiceClient, type Emotion, type Gender } from "./api.js";
import { SensorSimulator } from "./sim.js";
import { ASSESSMENT_PROMPTS, SessionStore, type UiState } from "./store.js";

const STIMULUS_TICK_MS = 1000;

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, attrs: Record<string, string> = {}, text = ""): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    if (text) node.textContent = text;
    return node;
}

function drawSparkline(canvas: HTMLCanvasElement, values: number[]): void {
    const ctx = canvas.getContext("2d");
    if (ctx === null || values.length < 2) return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi - lo || 1;
    ctx.beginPath();
    values.forEach((v, i) => {
        const x = (i / (values.length - 1)) * width;
        const y = height - ((v - lo) / span) * (height - 4) - 2;
        i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.strokeStyle = "#c0392b";
    ctx.lineWidth = 2;
    ctx.stroke();
}

export class App {
    private store: SessionStore;
    private api: ServiceClient;
    private sim: SensorSimulator | null = null;
    private stimulusTimer: ReturnType<typeof setInterval> | null = null;

    constructor(private readonly root: HTMLElement, baseUrl: string) {
        this.api = new ServiceClient(baseUrl);
        this.store = new SessionStore(this.api, window.localStorage);
        this.store.subscribe((state) => this.render(state));
    }

    async boot(): Promise<void> {
        await this.store.resume();
        this.render(this.store.getState());
    }

    private startSim(emotion: Emotion, rateHz: number): void {
        const sessionId = this.store.getState().sessionId;
        if (sessionId === null || this.sim?.running) return;
        this.sim = new SensorSimulator(this.api,
            { sampleRateHz: rateHz, batchIntervalMs: 500,
              warmupSamples: Math.round(rateHz * 3), emotion },
            {
                onBatch: (batch, state) => this.store.noteBatch(batch, state),
                onPause: () => this.render(this.store.getState()),
            });
        this.sim.start(sessionId);
    }

    private stopSim(): void {
        this.sim?.stop();
        this.sim = null;
    }

    private ensureStimulusTimer(): void {
        if (this.stimulusTimer !== null) return;
        this.stimulusTimer = setInterval(() => {
            this.store.tickStimulus(STIMULUS_TICK_MS / 1000);
            if (this.store.getState().stimulusRemaining <= 0) {
                clearInterval(this.stimulusTimer!);
                this.stimulusTimer = null;
                this.stopSim();
                void this.store.stopStimulus();
            }
        }, STIMULUS_TICK_MS);
    }

    private render(state: UiState): void {
        this.root.replaceChildren();
        this.root.appendChild(this.header(state));
        if (state.banner !== null) {
            const banner = el("div", { class: "banner", role: "alert" }, state.banner);
            const retry = el("button", {}, "Dismiss");
            retry.onclick = () => this.store.dismissBanner();
            banner.appendChild(retry);
            this.root.appendChild(banner);
        }
        const screen = el("main", { class: `screen screen-${state.screen}` });
        switch (state.screen) {
            case "setup": this.renderSetup(screen); break;
            case "demographics": this.renderDemographics(screen); break;
            case "warmup": this.renderWarmup(screen, state); break;
            case "stimulus": this.renderStimulus(screen, state); break;
            case "assessment": this.renderAssessment(screen, state); break;
            case "result": this.renderResult(screen, state); break;
        }
        this.root.appendChild(screen);
        if (state.operatorView && state.sessionId !== null
            && state.screen !== "result") {
            this.root.appendChild(this.operatorPanel(state));
        }
    }

    private header(state: UiState): HTMLElement {
        const bar = el("header", {});
        bar.appendChild(el("h1", {}, "Mood collection session"));
        const toggle = el("button", { class: "view-toggle" },
            state.operatorView ? "Switch to participant view"
                               : "Switch to operator view");
        toggle.onclick = () => this.store.setOperatorView(!state.operatorView);
        bar.appendChild(toggle);
        return bar;
    }

    private renderSetup(screen: HTMLElement): void {
        screen.appendChild(el("h2", {}, "Session setup (operator)"));
        const emotionSelect = el("select", { id: "target-emotion" });
        emotionSelect.appendChild(el("option", { value: "" }, "no target"));
        for (const emotion of EMOTIONS) {
            emotionSelect.appendChild(el("option", { value: emotion }, emotion));
        }
        const duration = el("input",
            { id: "stimulus-seconds", type: "number", min: "1", value: "60" });
        const go = el("button", {}, "Hand over to participant");
        go.onclick = () => {
            const chosen = emotionSelect.value === ""
                ? null : (emotionSelect.value as Emotion);
            const problem = this.store.configure(chosen, Number(duration.value));
            if (problem !== null) window.alert(problem);
        };
        screen.append(
            el("label", { for: "target-emotion" }, "Target emotion (hidden from participant)"),
            emotionSelect,
            el("label", { for: "stimulus-seconds" }, "Stimulus duration (seconds)"),
            duration, go);
    }

    private renderDemographics(screen: HTMLElement): void {
        screen.appendChild(el("h2", {}, "About you"));
        const age = el("input", { id: "age", type: "number", min: "16", step: "1" });
        const gender = el("select", { id: "gender" });
        for (const g of GENDERS) {
            gender.appendChild(el("option", { value: g }, g));
        }
        const submit = el("button", {}, "Begin");
        submit.onclick = () => void this.store.submitDemographics(
            Number(age.value), gender.value as Gender);
        screen.append(el("label", { for: "age" }, "Age"), age,
                      el("label", { for: "gender" }, "Gender"), gender, submit);
    }

    private renderWarmup(screen: HTMLElement, state: UiState): void {
        screen.appendChild(el("h2", {}, "Getting ready…"));
        screen.appendChild(el("p", { class: "warmup-indicator" },
            "Waiting for the heart-rate signal. Please keep the watch snug and stay still."));
        screen.appendChild(el("p", {}, `Samples received: ${state.sampleCount}`));
    }

    private renderStimulus(screen: HTMLElement, state: UiState): void {
        this.ensureStimulusTimer();
        screen.appendChild(el("h2", {}, "Please watch the video"));
        screen.appendChild(el("div", { class: "countdown" },
            `${Math.ceil(state.stimulusRemaining)} s remaining`));
        this.appendReadout(screen, state);
    }

    private renderAssessment(screen: HTMLElement, state: UiState): void {
        const step = state.assessmentStep;
        screen.appendChild(el("h2", {}, `Question ${step + 1} of 3`));
        screen.appendChild(el("p", { class: "prompt" }, ASSESSMENT_PROMPTS[step]));
        if (step < 2) {
            const slider = el("input", {
                id: "rating", type: "range", min: "0", max: "10", step: "1",
                value: "5",
            });
            const readout = el("output", {}, "5");
            slider.oninput = () => { readout.textContent = slider.value; };
            const next = el("button", {}, "Next");
            next.onclick = () => void this.store.answerAssessment(Number(slider.value));
            screen.append(slider, readout, next);
        } else {
            const choices = el("div", { class: "emotion-choices" });
            for (const emotion of EMOTIONS) {
                const pick = el("button", { "data-emotion": emotion }, emotion);
                pick.onclick = () => void this.store.answerAssessment(emotion);
                choices.appendChild(pick);
            }
            screen.appendChild(choices);
        }
    }

    private renderResult(screen: HTMLElement, state: UiState): void {
        screen.appendChild(el("h2", {}, "Session complete"));
        screen.appendChild(el("p", {},
            `You reported feeling: ${state.reportedEmotion ?? "(not recorded)"}`));
        const target = this.store.visibleTargetEmotion();
        if (target !== null) {
            screen.appendChild(el("p", {}, `Target emotion was: ${target}`));
        }
        screen.appendChild(el("p", { class: "prediction" },
            state.prediction === null
                ? "No mood prediction available."
                : `Predicted mood: ${state.prediction.mood} `
                  + `(p=${state.prediction.probability.toFixed(2)})`));
        const again = el("button", {}, "New session");
        again.onclick = () => this.store.reset();
        screen.appendChild(again);
    }

    private appendReadout(screen: HTMLElement, state: UiState): void {
        const readout = el("div", { class: "readout" });
        const last = state.latestSample;
        readout.appendChild(el("p", {}, last === null
            ? "no samples yet"
            : `hr ${last.hr_bpm === null ? "—" : last.hr_bpm.toFixed(0)} bpm · `
              + `acc [${last.acc.map((v) => v.toFixed(2)).join(", ")}] · `
              + `gyro [${last.gyro.map((v) => v.toFixed(2)).join(", ")}]`));
        const canvas = el("canvas", { width: "240", height: "48" });
        drawSparkline(canvas, state.hrHistory);
        readout.appendChild(canvas);
        screen.appendChild(readout);
    }

    /** Operator-only controls: simulated stream toggle and manual stop. */
    private operatorPanel(state: UiState): HTMLElement {
        const panel = el("aside", { class: "operator-panel" });
        panel.appendChild(el("h3", {}, "Operator"));
        panel.appendChild(el("p", {},
            `service state: ${state.serviceState ?? "—"} · samples: ${state.sampleCount}`));
        if (state.targetEmotion !== null) {
            panel.appendChild(el("p", {}, `target: ${state.targetEmotion}`));
        }
        const rate = el("input",
            { id: "sim-rate", type: "number", min: "1", value: "25" });
        const toggle = el("button", {},
            this.sim?.running ? "Stop simulated sensors" : "Start simulated sensors");
        toggle.onclick = () => {
            if (this.sim?.running) {
                this.stopSim();
            } else {
                this.startSim(state.targetEmotion ?? "joy", Number(rate.value));
            }
            this.render(this.store.getState());
        };
        const stop = el("button", {}, "End stimulus now");
        stop.onclick = () => {
            this.stopSim();
            void this.store.stopStimulus();
        };
        panel.append(el("label", { for: "sim-rate" }, "Sim rate (Hz)"),
                     rate, toggle, stop);
        return panel;
    }
}

export function mount(): void {
    const params = new URLSearchParams(window.location.search);
    const baseUrl = params.get("service") ?? "http://127.0.0.1:8000";
    const root = document.getElementById("app");
    if (root === null) throw new Error("missing #app container");
    void new App(root, baseUrl).boot();
}
