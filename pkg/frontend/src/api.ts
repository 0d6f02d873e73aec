/** Thin typed client over the documented HTTP API; no direct store access. */

import type {
  BundlePayload,
  CatalogEntry,
  DecisionRecordPayload,
  InstancePayload,
  RecommendationPayload,
  WhatIfResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.code ?? "error", body.message ?? "request failed");
  }
  return body as T;
}

export class ApiClient {
  constructor(public readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parse<T>(r));
  }

  health(): Promise<{ status: string }> {
    return fetch(this.url("/health")).then((r) => parse(r));
  }

  catalog(): Promise<CatalogEntry[]> {
    return fetch(this.url("/catalog")).then((r) => parse(r));
  }

  instance(collection: string, id: string): Promise<InstancePayload> {
    return fetch(this.url(`/collections/${collection}/instances/${id}`)).then(
      (r) => parse(r),
    );
  }

  recommendCredit(): Promise<RecommendationPayload> {
    return this.post("/recommend", {
      model_profile: {
        task_kind: "Emulation",
        target_judgeable_by_user: true,
        perspective: "Actor",
        pragmatic_goal_focus: true,
      },
      user_profile: { expertise: "Expert", role: "loan officer" },
    });
  }

  explainRejection(collection: string, id: string): Promise<BundlePayload> {
    return this.post(`/explain/rejection`, { collection, id });
  }

  whatIf(
    features: Record<string, number>,
    edits: Record<string, number>,
    threshold?: number,
  ): Promise<WhatIfResponse> {
    const body: Record<string, unknown> = { features, edits };
    if (threshold !== undefined) body.threshold = threshold;
    return this.post("/whatif", body);
  }

  submitDecision(record: DecisionRecordPayload): Promise<{ id: string; count: number }> {
    return this.post("/decisions", record);
  }

  decisions(): Promise<{ records: DecisionRecordPayload[] }> {
    return fetch(this.url("/decisions")).then((r) => parse(r));
  }
}
