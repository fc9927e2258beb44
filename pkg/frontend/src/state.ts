// Console state and its pure transitions.  The UI layer renders whatever is
// here; job state strings come verbatim from the server.

import type { ExperimentReport, JobView, ModelInfo } from "./api.js";

export const HISTORY_LIMIT = 20;

export interface ConsoleState {
  activeModel: string | null;
  models: ModelInfo[];
  inFlight: boolean;
  currentJob: JobView | null;
  history: JobView[]; // newest first, terminal jobs only
  latestReport: ExperimentReport | null;
  errorBanner: string | null;
}

export function initialState(): ConsoleState {
  return {
    activeModel: null,
    models: [],
    inFlight: false,
    currentJob: null,
    history: [],
    latestReport: null,
    errorBanner: null,
  };
}

export function isTerminal(job: JobView): boolean {
  return job.state === "done" || job.state === "failed";
}

export function classificationStarted(state: ConsoleState): ConsoleState {
  return { ...state, inFlight: true, currentJob: null, errorBanner: null };
}

export function jobUpdated(state: ConsoleState, job: JobView): ConsoleState {
  if (!isTerminal(job)) {
    return { ...state, currentJob: job };
  }
  return {
    ...state,
    inFlight: false,
    currentJob: job,
    history: [job, ...state.history].slice(0, HISTORY_LIMIT),
  };
}

export function classificationFailed(state: ConsoleState, message: string): ConsoleState {
  return { ...state, inFlight: false, errorBanner: message };
}

export function modelsLoaded(
  state: ConsoleState,
  models: ModelInfo[],
  active: string | null,
): ConsoleState {
  return { ...state, models, activeModel: active };
}

export function modelActivated(state: ConsoleState, name: string): ConsoleState {
  return { ...state, activeModel: name, errorBanner: null };
}

export function reportLoaded(
  state: ConsoleState,
  report: ExperimentReport | null,
): ConsoleState {
  return { ...state, latestReport: report };
}
