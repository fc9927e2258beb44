// Console flow against a live seeded service: the python package is driven
// through its CLI to build a dataset, train a model and produce a report,
// then `csihar serve` runs on an ephemeral port and the console bundle is
// exercised in a jsdom document with real HTTP.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { cpSync, mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { readFileSync } from "node:fs";
import { dirname } from "node:path";
import { fileURLToPath } from "node:url";

import { JSDOM } from "jsdom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { initConsole, type Console } from "../src/main.js";

const HTML = readFileSync(
  join(dirname(fileURLToPath(import.meta.url)), "..", "index.html"),
  "utf-8",
);

const PYTHON = process.env.CSIHAR_PYTHON ?? "python3";
const SETUP_TIMEOUT = 180_000;

let workDir: string;
let server: ChildProcess | null = null;
let baseUrl: string;

function cli(...args: string[]): void {
  const result = spawnSync(PYTHON, ["-m", "csihar.cli", ...args], {
    encoding: "utf-8",
  });
  if (result.status !== 0) {
    throw new Error(`csihar ${args[0]} failed: ${result.stderr}\n${result.stdout}`);
  }
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function until(predicate: () => boolean, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "csihar-console-"));
  const data = join(workDir, "data");
  const models = join(workDir, "models");
  const captures = join(workDir, "captures");
  const reports = join(workDir, "reports");

  cli("synth", "--n-per-class", "3", "--out", data, "--trace-length", "32", "--seed", "7");
  cli("train", "--data", data, "--algo", "forest", "--out",
      join(models, "forest.csimodel"), "--quiet");
  cli("train", "--data", data, "--algo", "knn", "--out",
      join(models, "knn.csimodel"), "--quiet");
  cli("eval-cv", "--data", data, "--k", "3", "--seed", "7", "--out-dir", reports, "--quiet");
  cpSync(join(data, "sitting_000.csv"), join(captures, "live.csv"));

  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  server = spawn(
    PYTHON,
    ["-m", "csihar.cli", "serve",
     "--model", join(models, "forest.csimodel"),
     "--models-dir", models,
     "--captures", captures,
     "--reports-dir", reports,
     "--listen", `127.0.0.1:${port}`,
     "--quiet"],
    { stdio: "ignore" },
  );

  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/api/health`);
      if (response.ok) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
}, SETUP_TIMEOUT);

afterAll(() => {
  if (server) server.kill();
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

function bootConsole(): { doc: Document; console_: Console } {
  const doc = new JSDOM(HTML).window.document;
  const console_ = initConsole(doc, baseUrl, 50);
  return { doc, console_ };
}

describe("console against the live service", () => {
  it("renders Loading... on click, then the returned label", async () => {
    const { doc } = bootConsole();
    await until(() => doc.getElementById("active-model")!.textContent === "forest");

    const button = doc.getElementById("run-btn") as HTMLButtonElement;
    const output = doc.getElementById("output")!;
    button.click();
    // synchronously after the click the console is in the Loading state
    expect(output.textContent).toBe("Loading...");
    expect(button.disabled).toBe(true);

    await until(() => output.textContent === "sitting");
    expect(button.disabled).toBe(false);
    const items = doc.querySelectorAll("#history li");
    expect(items.length).toBe(1);
    expect(items[0].textContent).toContain("sitting");
    expect(items[0].getAttribute("data-state")).toBe("done");
  });

  it("ignores clicks while a job is in flight", async () => {
    const { doc } = bootConsole();
    await until(() => doc.getElementById("active-model")!.textContent !== "none");
    const button = doc.getElementById("run-btn") as HTMLButtonElement;
    button.click();
    button.click(); // second click: button is disabled and the guard holds
    button.click();
    await until(() => doc.getElementById("output")!.textContent === "sitting");
    await new Promise((resolve) => setTimeout(resolve, 200));
    expect(doc.querySelectorAll("#history li").length).toBe(1);
  });

  it("renders the metrics view from the latest report", async () => {
    const { doc } = bootConsole();
    await until(() => doc.querySelectorAll(".metrics-table tr[data-kind]").length > 0);
    const rows = doc.querySelectorAll(".metrics-table tr[data-kind]");
    expect(rows.length).toBe(5); // all five classifiers in the eval report
    const corner = doc.querySelector(".confusion-grid td[data-corner='top-left']");
    expect(corner).not.toBeNull();
    expect(Number(corner!.textContent)).toBeGreaterThan(0);
  });

  it("reflects model activation in the header", async () => {
    const { doc, console_ } = bootConsole();
    await until(() => (doc.getElementById("model-select") as HTMLSelectElement).options.length === 2);
    await console_.selectModel("knn");
    expect(doc.getElementById("active-model")!.textContent).toBe("knn");
    await console_.selectModel("forest"); // restore for other tests
  });
});
