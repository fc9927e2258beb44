// Console bootstrap: wires the button and selector to the API client and a
// poll loop.  One classification in flight at a time; all state changes go
// through the pure transitions and a full re-render.

import { ApiClient } from "./api.js";
import {
  ConsoleState,
  classificationFailed,
  classificationStarted,
  initialState,
  isTerminal,
  jobUpdated,
  modelActivated,
  modelsLoaded,
  reportLoaded,
} from "./state.js";
import { render } from "./view.js";

export const DEFAULT_POLL_INTERVAL_MS = 500;

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class Console {
  state: ConsoleState = initialState();

  constructor(
    private doc: Document,
    private api: ApiClient,
    private pollIntervalMs: number = DEFAULT_POLL_INTERVAL_MS,
  ) {}

  private update(next: ConsoleState): void {
    this.state = next;
    render(this.doc, this.state);
  }

  async refreshModels(): Promise<void> {
    try {
      const list = await this.api.listModels();
      this.update(modelsLoaded(this.state, list.models, list.active));
    } catch (err) {
      this.update(classificationFailed(this.state, `cannot reach server: ${err}`));
    }
  }

  async refreshReport(): Promise<void> {
    try {
      this.update(reportLoaded(this.state, await this.api.latestReport()));
    } catch (err) {
      this.update(classificationFailed(this.state, `cannot load report: ${err}`));
    }
  }

  /** The Run Classification action: POST, then poll until terminal. */
  async runClassification(): Promise<void> {
    if (this.state.inFlight) return; // one job per console instance
    this.update(classificationStarted(this.state));
    try {
      const { job_id } = await this.api.startClassification();
      for (;;) {
        const job = await this.api.getJob(job_id);
        this.update(jobUpdated(this.state, job));
        if (isTerminal(job)) break;
        await sleep(this.pollIntervalMs);
      }
    } catch (err) {
      this.update(classificationFailed(this.state, String(err)));
    }
  }

  async selectModel(name: string): Promise<void> {
    try {
      const ack = await this.api.activateModel(name);
      this.update(modelActivated(this.state, ack.active));
    } catch (err) {
      this.update(classificationFailed(this.state, `activation failed: ${err}`));
      await this.refreshModels(); // selector snaps back to the server's truth
    }
  }

  async start(): Promise<void> {
    render(this.doc, this.state);
    const button = this.doc.getElementById("run-btn") as HTMLButtonElement;
    button.addEventListener("click", () => {
      void this.runClassification();
    });
    const select = this.doc.getElementById("model-select") as HTMLSelectElement;
    select.addEventListener("change", () => {
      void this.selectModel(select.value);
    });
    await this.refreshModels();
    await this.refreshReport();
  }
}

export function initConsole(
  doc: Document,
  baseUrl = "",
  pollIntervalMs: number = DEFAULT_POLL_INTERVAL_MS,
): Console {
  const console_ = new Console(doc, new ApiClient(baseUrl), pollIntervalMs);
  void console_.start();
  return console_;
}
