import assert from "node:assert/strict";
import { test } from "node:test";

import {
  SLIDERS,
  approvalFlipped,
  clampEdit,
  initialWhatIf,
  renderWhatIf,
} from "../src/whatif.js";

test("slider specs cover the editable bounded features", () => {
  assert.deepEqual(
    SLIDERS.map((s) => s.feature),
    ["leverage", "profitability", "liquidity"],
  );
});

test("out-of-range slider values clamp to the control's bounds", () => {
  const leverage = SLIDERS[0];
  assert.equal(clampEdit(leverage, -2.0), 0.0);
  assert.equal(clampEdit(leverage, 99.0), 5.0);
  assert.equal(clampEdit(leverage, 1.25), 1.25);
});

test("no edits means no flip and a zero delta display", () => {
  const state = initialWhatIf({ leverage: 1.0 }, false);
  assert.equal(approvalFlipped(state), false);
  const html = renderWhatIf(state);
  assert.ok(html.includes("change 0"));
});

test("display reflects the service response verbatim", () => {
  const state = {
    ...initialWhatIf({ leverage: 1.0 }, false),
    display: { rating: 0.623451, approved: true, delta: 0.19 },
  };
  assert.equal(approvalFlipped(state), true);
  const html = renderWhatIf(state);
  assert.ok(html.includes("0.623451"));
  assert.ok(html.includes("would approve"));
  assert.ok(html.includes("crosses the decision threshold"));
});
