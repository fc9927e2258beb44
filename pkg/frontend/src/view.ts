// DOM rendering.  Everything re-renders from ConsoleState; no hidden UI state.

import type { ClassifierReport, ExperimentReport, JobView } from "./api.js";
import type { ConsoleState } from "./state.js";

const DISPLAY_NAMES: Record<string, string> = {
  forest: "Random Forest",
  knn: "K Nearest Neighbours",
  svm: "Support Vector Machine",
  mlp: "Neural Network",
  ensemble: "Ensemble Classifier",
};

const TABLE_ORDER = ["forest", "knn", "svm", "mlp", "ensemble"];

function classifierOrder(kinds: string[]): string[] {
  return [...kinds].sort((a, b) => {
    const ia = TABLE_ORDER.indexOf(a);
    const ib = TABLE_ORDER.indexOf(b);
    return (ia < 0 ? 99 : ia) - (ib < 0 ? 99 : ib) || a.localeCompare(b);
  });
}

export function displayName(kind: string): string {
  return DISPLAY_NAMES[kind] ?? kind;
}

function el(doc: Document, id: string): HTMLElement {
  const found = doc.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

export function renderOutput(doc: Document, state: ConsoleState): void {
  const output = el(doc, "output");
  const job = state.currentJob;
  if (state.inFlight) {
    // shown from the moment the button is pressed until the job is terminal
    output.textContent = "Loading...";
    output.className = "output loading";
  } else if (job && job.state === "done" && job.prediction) {
    output.textContent = job.prediction.label;
    output.className = "output label";
  } else if (job && job.state === "failed") {
    output.textContent = "classification failed";
    output.className = "output failed";
  } else {
    output.textContent = "press Run Classification";
    output.className = "output idle";
  }

  const banner = el(doc, "error-banner");
  banner.textContent = state.errorBanner ?? "";
  banner.hidden = state.errorBanner === null;

  const button = el(doc, "run-btn") as HTMLButtonElement;
  button.disabled = state.inFlight;
}

function describeJob(job: JobView): string {
  const outcome =
    job.state === "done" && job.prediction
      ? `${job.prediction.label} (${Math.round(job.prediction.row_agreement * 100)}% agreement)`
      : job.state === "failed"
        ? `failed: ${job.error ?? "unknown error"}`
        : job.state; // server state string, verbatim
  return `${job.capture_ref}: ${outcome}`;
}

export function renderHistory(doc: Document, state: ConsoleState): void {
  const list = el(doc, "history");
  list.textContent = "";
  for (const job of state.history) {
    const item = doc.createElement("li");
    item.textContent = describeJob(job);
    item.dataset.state = job.state;
    list.appendChild(item);
  }
}

export function renderModels(doc: Document, state: ConsoleState): void {
  el(doc, "active-model").textContent = state.activeModel ?? "none";
  const select = el(doc, "model-select") as HTMLSelectElement;
  select.textContent = "";
  for (const model of state.models) {
    const option = doc.createElement("option");
    option.value = model.name;
    option.textContent = `${model.name} (${model.kind})`;
    if (model.name === state.activeModel) option.selected = true;
    select.appendChild(option);
  }
  select.disabled = state.models.length === 0;
}

function confusionGrid(doc: Document, kind: string, report: ClassifierReport): HTMLElement {
  // paper convention: predictions on the Y axis, actual classes on the X axis
  const wrap = doc.createElement("div");
  wrap.className = "confusion";
  const title = doc.createElement("h3");
  title.textContent = `Confusion matrix: ${displayName(kind)}`;
  wrap.appendChild(title);

  const table = doc.createElement("table");
  table.className = "confusion-grid";
  const head = doc.createElement("tr");
  head.appendChild(doc.createElement("th"));
  for (const label of report.labels) {
    const th = doc.createElement("th");
    th.textContent = `actual ${label}`;
    head.appendChild(th);
  }
  table.appendChild(head);

  const total = report.confusion.flat().reduce((a, b) => a + b, 0) || 1;
  report.labels.forEach((predictedLabel, p) => {
    const row = doc.createElement("tr");
    const th = doc.createElement("th");
    th.textContent = `predicted ${predictedLabel}`;
    row.appendChild(th);
    report.labels.forEach((_, a) => {
      const cell = doc.createElement("td");
      const count = report.confusion[a]?.[p] ?? 0;
      cell.textContent = String(count);
      // heatmap shading by share of all rows
      cell.style.backgroundColor = `rgba(31, 119, 180, ${(count / total).toFixed(3)})`;
      if (a === 0 && p === 0) cell.dataset.corner = "top-left";
      row.appendChild(cell);
    });
    table.appendChild(row);
  });
  wrap.appendChild(table);
  return wrap;
}

function metricsTable(doc: Document, report: ExperimentReport): HTMLElement {
  const table = doc.createElement("table");
  table.className = "metrics-table";
  const head = doc.createElement("tr");
  for (const column of ["Algorithm", "Accuracy", "Precision", "Recall", "F1-score"]) {
    const th = doc.createElement("th");
    th.textContent = column;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const kind of classifierOrder(Object.keys(report.classifiers))) {
    const summary = report.classifiers[kind]!.summary;
    const row = doc.createElement("tr");
    row.dataset.kind = kind;
    const cells = [
      displayName(kind),
      `${(summary.accuracy * 100).toFixed(2)} %`,
      summary.precision_macro.toFixed(2),
      summary.recall_macro.toFixed(2),
      summary.f1_macro.toFixed(2),
    ];
    for (const text of cells) {
      const td = doc.createElement("td");
      td.textContent = text;
      row.appendChild(td);
    }
    table.appendChild(row);
  }
  return table;
}

export function renderMetrics(doc: Document, state: ConsoleState): void {
  const container = el(doc, "metrics");
  container.textContent = "";
  const report = state.latestReport;
  if (!report) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No evaluation report yet: run eval first.";
    container.appendChild(empty);
    return;
  }
  container.appendChild(metricsTable(doc, report));
  for (const kind of classifierOrder(Object.keys(report.classifiers))) {
    container.appendChild(confusionGrid(doc, kind, report.classifiers[kind]!));
  }
}

export function render(doc: Document, state: ConsoleState): void {
  renderOutput(doc, state);
  renderHistory(doc, state);
  renderModels(doc, state);
  renderMetrics(doc, state);
}
