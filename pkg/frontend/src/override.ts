/** Override submission: a justified human decision logged to the service.
 *
 * Submission is blocked client-side until the justification is non-empty;
 * the record id is derived from the case id so a duplicate submit upserts
 * the same record instead of creating a second one.
 */

import type { ApiClient } from "./api.js";
import type { DecisionRecordPayload } from "./types.js";

export interface OverrideDraft {
  caseId: string;
  verdict: "approve" | "uphold-rejection";
  justification: string;
  officerId: string;
}

export function canSubmit(draft: OverrideDraft): boolean {
  return draft.justification.trim().length > 0 && draft.officerId.trim().length > 0;
}

export function toRecord(
  draft: OverrideDraft,
  queryEmbedding: number[],
): DecisionRecordPayload {
  return {
    id: `override-${draft.caseId}`,
    query_embedding: queryEmbedding,
    decision: draft.verdict,
    justification: draft.justification.trim(),
    validator: draft.officerId,
    validated: true,
  };
}

export async function submitOverride(
  api: ApiClient,
  draft: OverrideDraft,
  queryEmbedding: number[],
): Promise<{ id: string; count: number }> {
  if (!canSubmit(draft)) {
    throw new Error("justification required before submitting an override");
  }
  return api.submitDecision(toRecord(draft, queryEmbedding));
}

export function renderConfirmation(result: { id: string }): string {
  return `<p class="confirmation">Override recorded as <code>${result.id}</code>.</p>`;
}
