/** What-if panel state: slider edits re-scored by the service.
 *
 * The displayed rating is always exactly the service's response (the UI
 * never recomputes the score), and the approval badge flips exactly when
 * the returned rating crosses the threshold.
 */

import type { ApiClient } from "./api.js";
import type { WhatIfResponse } from "./types.js";

export interface SliderSpec {
  feature: string;
  min: number;
  max: number;
  step: number;
}

// size is edited on a log scale elsewhere; sliders cover the bounded features
export const SLIDERS: SliderSpec[] = [
  { feature: "leverage", min: 0.0, max: 5.0, step: 0.01 },
  { feature: "profitability", min: -1.0, max: 1.0, step: 0.005 },
  { feature: "liquidity", min: 0.0, max: 6.0, step: 0.01 },
];

export interface WhatIfState {
  baseFeatures: Record<string, number>;
  edits: Record<string, number>;
  baseApproved: boolean;
  display: WhatIfResponse | null;
}

export function initialWhatIf(
  features: Record<string, number>,
  approved: boolean,
): WhatIfState {
  return { baseFeatures: { ...features }, edits: {}, baseApproved: approved, display: null };
}

export function clampEdit(spec: SliderSpec, value: number): number {
  return Math.min(spec.max, Math.max(spec.min, value));
}

export async function applyEdit(
  api: ApiClient,
  state: WhatIfState,
  feature: string,
  value: number,
): Promise<WhatIfState> {
  const spec = SLIDERS.find((s) => s.feature === feature);
  const edits = { ...state.edits, [feature]: spec ? clampEdit(spec, value) : value };
  const display = await api.whatIf(state.baseFeatures, edits);
  return { ...state, edits, display };
}

export function approvalFlipped(state: WhatIfState): boolean {
  return state.display !== null && state.display.approved !== state.baseApproved;
}

export function renderWhatIf(state: WhatIfState): string {
  const display = state.display;
  const rating = display ? display.rating.toPrecision(6) : "&mdash;";
  const delta = display ? display.delta.toPrecision(3) : "0";
  const badge = display
    ? display.approved
      ? `<span class="badge approved">would approve</span>`
      : `<span class="badge rejected">still rejected</span>`
    : "";
  const flipped = approvalFlipped(state)
    ? `<p class="flip-note">This change crosses the decision threshold.</p>`
    : "";
  return (
    `<div class="whatif">` +
    `<p>What-if rating: <strong class="whatif-rating">${rating}</strong> ` +
    `(change ${delta}) ${badge}</p>` +
    flipped +
    `</div>`
  );
}
