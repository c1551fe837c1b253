// HTTP client for the inference service. All intelligence is server-side;
// this file only moves JSON and enforces the one-in-flight rule for
// suggestion requests: a newer request aborts the older one.

import type { HealthResponse, RolloutResponse, SuggestResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Thrown to the caller whose suggestion request got superseded. */
export class Superseded extends Error {
  constructor() {
    super("request superseded");
    this.name = "Superseded";
  }
}

export interface SuggestOptions {
  nPositions?: number;
  nPerPosition?: number;
  nPoints?: number;
}

export interface RolloutOptions {
  steps: number;
  seed?: number;
  temperature?: number;
  nPoints?: number;
}

type FetchFn = typeof fetch;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchFn;
  private inflight: AbortController | null = null;

  constructor(baseUrl: string, fetchFn: FetchFn = fetch) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  async health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("GET", "/health");
  }

  async suggest(
    strokes: [number, number][][],
    opts: SuggestOptions = {},
  ): Promise<SuggestResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      return await this.request<SuggestResponse>(
        "POST",
        "/suggest",
        {
          strokes,
          n_positions: opts.nPositions ?? 3,
          n_per_position: opts.nPerPosition ?? 2,
          n_points: opts.nPoints ?? 50,
        },
        controller.signal,
      );
    } catch (err) {
      if (controller.signal.aborted) throw new Superseded();
      throw err;
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  async rollout(strokes: [number, number][][], opts: RolloutOptions): Promise<RolloutResponse> {
    return this.request<RolloutResponse>("POST", "/rollout", {
      strokes,
      steps: opts.steps,
      seed: opts.seed ?? 0,
      temperature: opts.temperature ?? 1.0,
      n_points: opts.nPoints ?? 50,
    });
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      method,
      ...(body !== undefined
        ? { headers: { "Content-Type": "application/json" }, body: JSON.stringify(body) }
        : {}),
      ...(signal ? { signal } : {}),
    });
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const payload = (await resp.json()) as { error?: string };
        if (payload.error) detail = payload.error;
      } catch {
        // non-json error body; keep the status text
      }
      throw new ApiError(detail, resp.status);
    }
    return (await resp.json()) as T;
  }
}
