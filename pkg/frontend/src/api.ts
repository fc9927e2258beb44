// Typed client for the classification service API.

export type JobState = "pending" | "loading" | "done" | "failed";

export interface Prediction {
  label: string;
  per_row_votes: Record<string, number>;
  row_agreement: number;
}

export interface JobView {
  id: string;
  state: JobState;
  capture_ref: string;
  prediction: Prediction | null;
  error: string | null;
  timestamps: Record<string, number>;
}

export interface ModelInfo {
  name: string;
  kind: string;
  feature_width: number;
  label_dictionary: string[];
  created_at: string;
}

export interface ModelList {
  models: ModelInfo[];
  active: string | null;
}

export interface MetricsSummary {
  accuracy: number;
  precision_macro: number;
  recall_macro: number;
  f1_macro: number;
  per_class: Record<string, { precision: number; recall: number; f1: number }>;
  zero_division: boolean;
}

export interface ClassifierReport {
  labels: string[];
  confusion: number[][];
  summary: MetricsSummary;
}

export interface ExperimentReport {
  format_version: number;
  kind: string;
  protocol: Record<string, unknown>;
  classifiers: Record<string, ClassifierReport>;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function parseDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    /* non-json error body */
  }
  return `HTTP ${response.status}`;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await parseDetail(response));
    }
    return (await response.json()) as T;
  }

  startClassification(): Promise<{ job_id: string }> {
    return this.request("/api/classify", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({}),
    });
  }

  getJob(jobId: string): Promise<JobView> {
    return this.request(`/api/jobs/${jobId}`);
  }

  listModels(): Promise<ModelList> {
    return this.request("/api/models");
  }

  activateModel(name: string): Promise<{ active: string }> {
    return this.request("/api/models/activate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ name }),
    });
  }

  async latestReport(): Promise<ExperimentReport | null> {
    try {
      return await this.request<ExperimentReport>("/api/reports/latest");
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }
}
