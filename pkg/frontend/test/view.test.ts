import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { JSDOM } from "jsdom";
import { beforeEach, describe, expect, it } from "vitest";

import type { ExperimentReport, JobView } from "../src/api.js";
import {
  classificationStarted,
  initialState,
  jobUpdated,
  modelsLoaded,
  reportLoaded,
  type ConsoleState,
} from "../src/state.js";
import { render } from "../src/view.js";

const HTML = readFileSync(
  join(dirname(fileURLToPath(import.meta.url)), "..", "index.html"),
  "utf-8",
);

// the forest cross-validation matrix from the reference results
function summary(accuracy: number) {
  return {
    accuracy,
    precision_macro: accuracy,
    recall_macro: accuracy,
    f1_macro: accuracy,
    per_class: {},
    zero_division: false,
  };
}

const REPORT: ExperimentReport = {
  format_version: 1,
  kind: "experiment_result",
  protocol: { kind: "cv", k: 10, seed: 42 },
  classifiers: {
    forest: {
      labels: ["sitting", "standing"],
      confusion: [
        [1821, 99],
        [190, 1730],
      ],
      summary: summary(0.9247),
    },
    knn: { labels: ["sitting", "standing"], confusion: [[1, 0], [0, 1]], summary: summary(0.8817) },
    svm: { labels: ["sitting", "standing"], confusion: [[1, 0], [0, 1]], summary: summary(0.8468) },
    mlp: { labels: ["sitting", "standing"], confusion: [[1, 0], [0, 1]], summary: summary(0.9005) },
    ensemble: { labels: ["sitting", "standing"], confusion: [[1, 0], [0, 1]], summary: summary(0.9218) },
  },
};

function doneJob(label: string): JobView {
  return {
    id: "j1",
    state: "done",
    capture_ref: "captures/x.csv",
    prediction: { label, per_row_votes: { [label]: 64 }, row_agreement: 1 },
    error: null,
    timestamps: {},
  };
}

describe("rendering", () => {
  let doc: Document;
  let state: ConsoleState;

  beforeEach(() => {
    doc = new JSDOM(HTML).window.document;
    state = initialState();
  });

  it("shows Loading... and disables the button while in flight", () => {
    render(doc, classificationStarted(state));
    expect(doc.getElementById("output")!.textContent).toBe("Loading...");
    expect((doc.getElementById("run-btn") as HTMLButtonElement).disabled).toBe(true);
  });

  it("shows the returned label prominently after completion", () => {
    let next = classificationStarted(state);
    next = jobUpdated(next, doneJob("sitting"));
    render(doc, next);
    expect(doc.getElementById("output")!.textContent).toBe("sitting");
    expect((doc.getElementById("run-btn") as HTMLButtonElement).disabled).toBe(false);
    const items = doc.querySelectorAll("#history li");
    expect(items).toHaveLength(1);
    expect(items[0].textContent).toContain("sitting");
  });

  it("renders the error banner and keeps the button usable", () => {
    render(doc, { ...state, errorBanner: "HTTP 409: NoModelLoaded" });
    const banner = doc.getElementById("error-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("NoModelLoaded");
    expect((doc.getElementById("run-btn") as HTMLButtonElement).disabled).toBe(false);
  });

  it("renders an empty state before any report exists", () => {
    render(doc, reportLoaded(state, null));
    expect(doc.getElementById("metrics")!.textContent).toContain("run eval first");
  });

  it("renders one metrics row per classifier", () => {
    render(doc, reportLoaded(state, REPORT));
    const rows = doc.querySelectorAll(".metrics-table tr[data-kind]");
    expect(rows).toHaveLength(5);
    expect(rows[0].textContent).toContain("Random Forest");
    expect(rows[0].textContent).toContain("92.47 %");
  });

  it("renders the confusion grid with 1821 in the top-left cell", () => {
    render(doc, reportLoaded(state, REPORT));
    const corner = doc.querySelector(".confusion-grid td[data-corner='top-left']")!;
    expect(corner.textContent).toBe("1821");
    // prediction on the Y axis, actual on the X axis
    const grid = corner.closest("table")!;
    expect(grid.querySelector("tr:first-child th:nth-child(2)")!.textContent).toBe(
      "actual sitting",
    );
    expect(grid.querySelector("tr:nth-child(2) th")!.textContent).toBe("predicted sitting");
    // 190 standing rows predicted as sitting: row "predicted sitting", column "actual standing"
    expect(grid.querySelector("tr:nth-child(2) td:nth-child(3)")!.textContent).toBe("190");
  });

  it("fills the model selector and disables it when empty", () => {
    const select = doc.getElementById("model-select") as HTMLSelectElement;
    render(doc, state);
    expect(select.disabled).toBe(true);
    const models = [
      { name: "ensemble", kind: "ensemble", feature_width: 4, label_dictionary: [], created_at: "" },
      { name: "forest", kind: "forest", feature_width: 4, label_dictionary: [], created_at: "" },
    ];
    render(doc, modelsLoaded(state, models, "forest"));
    expect(select.disabled).toBe(false);
    expect(select.options).toHaveLength(2);
    expect(select.value).toBe("forest");
    expect(doc.getElementById("active-model")!.textContent).toBe("forest");
  });
});
