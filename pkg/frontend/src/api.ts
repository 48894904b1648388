/** Typed client for the sweep service; every view renders these payloads as
 * received, probabilities are never recomputed on this side. */

export interface DatasetInfo {
  id: string;
  channels: string[];
  classes: string[];
  groups: string[];
  max_length: number;
  n_series: number;
  n_test: number;
}

export interface SweepInfo {
  id: string;
  dataset_id: string;
  channels: string[];
  classes: string[];
  has_loo: boolean;
  n_trees: number;
  seed: number;
  windows: number[];
}

export interface CurvePayload {
  dataset_id: string;
  windows: number[];
  accuracy: number[];
  n_shorter_all: number[];
  n_shorter_test: number[];
  hist_all: Record<string, number>;
  hist_test: Record<string, number>;
  n_trees: number;
}

export interface ConfusionPayload {
  window: number;
  classes: string[];
  counts: number[][];
  accuracy: number;
}

export interface SeriesInfo {
  id: string;
  label: string;
  group: string;
  length: number;
  split: string;
}

export interface TemporalPayload {
  series_id: string;
  label: string;
  length: number;
  classes: string[];
  windows: number[];
  /** probs[class][window] */
  probs: number[][];
}

export interface PdpPayload {
  window: number;
  grid: number[];
  channels: string[];
  classes: string[];
  /** curves[channel][class][grid point] */
  curves: number[][][];
}

export interface LooFold {
  group: string;
  train_groups: string[];
  n_test: number;
  accuracies: Record<string, number>;
}

export interface LooPayload {
  folds: LooFold[];
  summary: Record<
    string,
    { mean: number; std: number; min: number; q1: number; median: number; q3: number; max: number }
  >;
}

export interface JobInfo {
  id: string;
  dataset_id: string;
  sweep_id: string;
  phase: string;
  window: number | null;
  progress: number;
  error: string | null;
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${url}: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  base: string;

  constructor(base = "") {
    this.base = base.replace(/\/$/, "");
  }

  datasets(): Promise<DatasetInfo[]> {
    return getJson(`${this.base}/api/datasets`);
  }

  sweeps(): Promise<SweepInfo[]> {
    return getJson(`${this.base}/api/sweeps`);
  }

  curve(sweepId: string): Promise<CurvePayload> {
    return getJson(`${this.base}/api/sweeps/${sweepId}/curve`);
  }

  confusion(sweepId: string, window: number): Promise<ConfusionPayload> {
    return getJson(`${this.base}/api/sweeps/${sweepId}/confusion/${window}`);
  }

  series(sweepId: string): Promise<SeriesInfo[]> {
    return getJson(`${this.base}/api/sweeps/${sweepId}/series`);
  }

  temporal(sweepId: string, seriesId: string): Promise<TemporalPayload> {
    return getJson(`${this.base}/api/sweeps/${sweepId}/series/${seriesId}/temporal`);
  }

  pdp(sweepId: string, window: number, grid = 20): Promise<PdpPayload> {
    return getJson(`${this.base}/api/sweeps/${sweepId}/pdp/${window}?grid=${grid}`);
  }

  loo(sweepId: string): Promise<LooPayload> {
    return getJson(`${this.base}/api/sweeps/${sweepId}/loo`);
  }

  job(jobId: string): Promise<JobInfo> {
    return getJson(`${this.base}/api/jobs/${jobId}`);
  }

  async startSweep(
    datasetId: string,
    body: { step?: number; n_trees?: number; seed?: number },
  ): Promise<{ job_id: string; sweep_id: string }> {
    const response = await fetch(`${this.base}/api/datasets/${datasetId}/sweeps`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new Error(`start sweep: ${response.status} ${await response.text()}`);
    }
    return (await response.json()) as { job_id: string; sweep_id: string };
  }
}
