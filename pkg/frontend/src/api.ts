/**
 * Analytics API client.
 *
 * Concurrent in-flight requests are deduplicated by request key
 * (method + path + body), every payload's schema version is checked before
 * use, and SequenceGate lets views discard responses that arrive after a
 * newer request was issued.
 */

import {
  API_SCHEMA_VERSION,
  ImportancePayload,
  MetaPayload,
  ModelPayload,
  PerceptualMapPayload,
  SimulatePayload,
  StoreDetailPayload,
  StoresPayload,
  TaxonomyPayload,
  TrendsPayload,
  Versioned,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly fieldErrors: Record<string, string>;

  constructor(message: string, status: number, fieldErrors: Record<string, string> = {}) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.fieldErrors = fieldErrors;
  }
}

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

/** Monotonic tokens so a view can drop responses that are no longer current. */
export class SequenceGate {
  private counter = 0;

  next(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(token: number): boolean {
    return token === this.counter;
  }
}

export class DashboardApi {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly inflight = new Map<string, Promise<unknown>>();

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? (globalThis.fetch as unknown as FetchLike);
  }

  private async request<T extends Versioned>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const encoded = body === undefined ? "" : JSON.stringify(body);
    const key = `${method} ${path} ${encoded}`;
    const existing = this.inflight.get(key);
    if (existing) {
      return existing as Promise<T>;
    }
    const pending = this.send<T>(method, path, encoded || undefined).finally(() => {
      this.inflight.delete(key);
    });
    this.inflight.set(key, pending);
    return pending;
  }

  private async send<T extends Versioned>(
    method: string,
    path: string,
    body?: string,
  ): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body ? { "content-type": "application/json" } : undefined,
      body,
    });
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const record = (payload ?? {}) as Record<string, unknown>;
      const fieldErrors = (record["field_errors"] ?? {}) as Record<string, string>;
      const detail = typeof record["detail"] === "string" ? (record["detail"] as string) : "";
      throw new ApiError(
        detail || `request failed with status ${response.status}`,
        response.status,
        fieldErrors,
      );
    }
    const versioned = payload as T;
    if (versioned?.schema_version !== API_SCHEMA_VERSION) {
      throw new ApiError(
        `unsupported schema version ${String(versioned?.schema_version)}`,
        response.status,
      );
    }
    return versioned;
  }

  meta(): Promise<MetaPayload> {
    return this.request("GET", "/api/v1/meta");
  }

  taxonomy(): Promise<TaxonomyPayload> {
    return this.request("GET", "/api/v1/taxonomy");
  }

  stores(): Promise<StoresPayload> {
    return this.request("GET", "/api/v1/stores");
  }

  storeDetail(storeId: string): Promise<StoreDetailPayload> {
    return this.request("GET", `/api/v1/stores/${encodeURIComponent(storeId)}`);
  }

  trends(attribute: string): Promise<TrendsPayload> {
    return this.request("GET", `/api/v1/trends?attribute=${encodeURIComponent(attribute)}`);
  }

  model(level: "attribute" | "feature" = "feature"): Promise<ModelPayload> {
    return this.request("GET", `/api/v1/model?level=${level}`);
  }

  importance(): Promise<ImportancePayload> {
    return this.request("GET", "/api/v1/importance");
  }

  perceptualMap(): Promise<PerceptualMapPayload> {
    return this.request("GET", "/api/v1/map");
  }

  simulate(feature: string, stores?: string[]): Promise<SimulatePayload> {
    const body: Record<string, unknown> = { feature };
    if (stores && stores.length > 0) {
      body["stores"] = stores;
    }
    return this.request("POST", "/api/v1/simulate", body);
  }
}
