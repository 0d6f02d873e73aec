/** Browser bootstrap: wires the case view, what-if sliders and override form.
 *
 * Session settings (service URL, officer id, collection) live in the topbar;
 * there is no authentication by design.
 */

import { ApiClient } from "./api.js";
import { buildCaseView, renderCaseView } from "./caseView.js";
import { submitOverride } from "./override.js";
import { SLIDERS, applyEdit, initialWhatIf, renderWhatIf, type WhatIfState } from "./whatif.js";

const DEFAULT_BASE = "http://127.0.0.1:8080";
const DEFAULT_COLLECTION = "credit-portfolio";
const THRESHOLD = 0.5;

function el<T extends HTMLElement>(selector: string): T {
  const node = document.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

async function loadCase(api: ApiClient, collection: string, caseId: string): Promise<void> {
  const root = el<HTMLElement>("#case-root");
  try {
    const [instance, recommendation, catalog] = await Promise.all([
      api.instance(collection, caseId),
      api.recommendCredit(),
      api.catalog(),
    ]);
    const approved = instance.label === 1;
    const bundle = approved ? null : await api.explainRejection(collection, caseId);
    const view = buildCaseView(instance, recommendation, bundle, catalog, THRESHOLD);
    root.innerHTML = renderCaseView(view);
    wireTabs(root);
    if (!approved) {
      wireWhatIf(api, instance.features, approved);
      wireOverride(api, caseId, instance.embedding);
    }
  } catch (error) {
    root.innerHTML =
      `<div class="error-banner">Service error: ${String(error)} ` +
      `<button id="retry">Retry</button></div>`;
    el<HTMLButtonElement>("#retry").onclick = () => loadCase(api, collection, caseId);
  }
}

function wireTabs(root: HTMLElement): void {
  const tabs = [...root.querySelectorAll<HTMLButtonElement>(".tab")];
  const panels = [...root.querySelectorAll<HTMLElement>(".panel")];
  const activate = (family: string) => {
    for (const panel of panels) {
      panel.style.display = panel.dataset.family === family ? "block" : "none";
    }
    for (const tab of tabs) {
      tab.classList.toggle("active", tab.dataset.family === family);
    }
  };
  for (const tab of tabs) {
    tab.onclick = () => activate(tab.dataset.family ?? "");
  }
  if (tabs[0]?.dataset.family) activate(tabs[0].dataset.family);
}

function wireWhatIf(
  api: ApiClient,
  features: Record<string, number>,
  approved: boolean,
): void {
  const panel = document.querySelector<HTMLElement>("#whatif-panel");
  if (!panel) return;
  let state: WhatIfState = initialWhatIf(features, approved);
  const display = document.createElement("div");

  for (const spec of SLIDERS) {
    const row = document.createElement("label");
    row.className = "slider-row";
    row.textContent = spec.feature;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(spec.min);
    slider.max = String(spec.max);
    slider.step = String(spec.step);
    slider.value = String(features[spec.feature] ?? spec.min);
    slider.dataset.feature = spec.feature;
    slider.onchange = async () => {
      state = await applyEdit(api, state, spec.feature, Number(slider.value));
      display.innerHTML = renderWhatIf(state);
    };
    row.appendChild(slider);
    panel.appendChild(row);
  }
  panel.appendChild(display);
  display.innerHTML = renderWhatIf(state);
}

function wireOverride(api: ApiClient, caseId: string, embedding: number[]): void {
  const form = el<HTMLFormElement>("#override-form");
  const justification = el<HTMLTextAreaElement>("#justification");
  const submit = el<HTMLButtonElement>("#override-submit");
  const confirmation = el<HTMLElement>("#override-confirmation");
  const officer = el<HTMLInputElement>("#officer-id");

  const refresh = () => {
    submit.disabled = justification.value.trim().length === 0 || officer.value.trim().length === 0;
  };
  justification.oninput = refresh;
  officer.oninput = refresh;
  refresh();

  form.onsubmit = async (event) => {
    event.preventDefault();
    const result = await submitOverride(
      api,
      {
        caseId,
        verdict: (el<HTMLSelectElement>("#verdict").value as "approve" | "uphold-rejection"),
        justification: justification.value,
        officerId: officer.value,
      },
      embedding,
    );
    confirmation.innerHTML = `Override recorded as <code>${result.id}</code>.`;
  };
}

function boot(): void {
  const api = new ApiClient(
    (document.querySelector<HTMLInputElement>("#base-url")?.value ?? DEFAULT_BASE),
  );
  el<HTMLButtonElement>("#load-case").onclick = () => {
    const collection =
      document.querySelector<HTMLInputElement>("#collection")?.value || DEFAULT_COLLECTION;
    const caseId = el<HTMLInputElement>("#case-id").value.trim();
    if (caseId) void loadCase(api, collection, caseId);
  };
}

boot();
