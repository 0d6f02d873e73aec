/** Case view model and renderer.
 *
 * The tabs are derived entirely from the recommendation: one tab per mode
 * family present among the ranked methods, ordered by mode score. Excluded
 * methods never produce any rendered content; deferred methods (the what-if
 * tools) sit behind an explicit "advanced" disclosure. Nothing in this view
 * ever shows a confidence score or correctness probability.
 */

import type {
  BundlePayload,
  CatalogEntry,
  InstancePayload,
  RecommendationPayload,
} from "./types.js";

export interface MethodNote {
  method: string;
  rationale: string;
}

export interface CaseView {
  applicantId: string;
  summary: Record<string, number>;
  rating: number;
  threshold: number;
  approved: boolean;
  tabs: string[]; // mode families, score order
  methodsByFamily: Record<string, string[]>;
  deferred: MethodNote[];
  excluded: MethodNote[];
  bundle: BundlePayload | null;
}

export function familyOf(catalog: CatalogEntry[]): Map<string, string> {
  return new Map(catalog.map((e) => [e.method_name, e.malle_category]));
}

export function allowedFamilies(
  recommendation: RecommendationPayload,
  catalog: CatalogEntry[],
): string[] {
  const families = familyOf(catalog);
  const seen = new Set<string>();
  for (const method of recommendation.ranked_methods) {
    const family = families.get(method);
    if (family) seen.add(family);
  }
  return [...seen].sort(
    (a, b) => (recommendation.mode_scores[b] ?? 0) - (recommendation.mode_scores[a] ?? 0),
  );
}

export function buildCaseView(
  instance: InstancePayload,
  recommendation: RecommendationPayload,
  bundle: BundlePayload | null,
  catalog: CatalogEntry[],
  threshold: number,
): CaseView {
  const families = familyOf(catalog);
  const tabs = allowedFamilies(recommendation, catalog);
  const methodsByFamily: Record<string, string[]> = {};
  for (const method of recommendation.ranked_methods) {
    const family = families.get(method);
    if (!family) continue;
    (methodsByFamily[family] ??= []).push(method);
  }
  const rating = Number(instance.metadata["rating"] ?? "0");
  return {
    applicantId: instance.id,
    summary: instance.features,
    rating,
    threshold,
    approved: instance.label === 1,
    tabs,
    methodsByFamily,
    deferred: recommendation.deferred,
    excluded: recommendation.excluded,
    bundle,
  };
}

const esc = (value: unknown): string =>
  String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

const num = (value: number): string => value.toPrecision(4);

function pairList(entries: [string, number][], unit: string): string {
  const items = entries
    .map(([id, value]) => `<li><code>${esc(id)}</code> (${esc(unit)} ${num(value)})</li>`)
    .join("");
  return `<ul>${items}</ul>`;
}

function tabBody(view: CaseView, family: string): string {
  const bundle = view.bundle;
  if (!bundle) return "<p>No explanation loaded.</p>";
  if (family === "KnowledgeStructures") {
    const approved = bundle.neighbors["approved"] ?? [];
    const rejected = bundle.neighbors["rejected"] ?? [];
    return [
      `<h4>Nearest approved cases</h4>${pairList(approved, "distance")}`,
      `<h4>Nearest rejected cases</h4>${pairList(rejected, "distance")}`,
      `<h4>Class prototypes</h4>${pairList(bundle.prototypes, "distance")}`,
      `<h4>Contrasting cases</h4>${pairList(bundle.criticisms, "witness")}`,
      `<h4>Feature attributions</h4>${pairList(
        Object.entries(bundle.attributions).sort((a, b) => Math.abs(b[1]) - Math.abs(a[1])),
        "weight",
      )}`,
    ].join("");
  }
  if (family === "DirectRecall") {
    return `<h4>Most influential stored cases</h4>${pairList(bundle.influences, "influence")}`;
  }
  if (family === "Covariation") {
    const rows = Object.entries(bundle.quadrant_importance ?? {})
      .sort((a, b) => b[1][0] - a[1][0])
      .map(([name, [mean, std]]) => {
        const width = Math.round(Math.min(1, Math.max(0, mean) * 4) * 100);
        return (
          `<div class="bar-row" data-feature="${esc(name)}">` +
          `<span class="bar-label">${esc(name)}</span>` +
          `<span class="bar" style="width:${width}%"></span>` +
          `<span class="bar-value">${num(mean)} &plusmn; ${num(std)}</span></div>`
        );
      })
      .join("");
    return `<h4>Importance within this size/sector quadrant</h4><div class="chart">${rows}</div>`;
  }
  if (family === "Rationalization") {
    return `<h4>Summary</h4><p class="narrative">${esc(bundle.rendered_text)}</p>`;
  }
  return "";
}

export function renderCaseView(view: CaseView): string {
  const verdict = view.approved ? "approved" : "rejected";
  const summaryRows = Object.entries(view.summary)
    .map(([name, value]) => `<tr><th>${esc(name)}</th><td>${num(value)}</td></tr>`)
    .join("");

  const banner =
    `<section class="banner">` +
    `<p>Allowed method families: ${view.tabs.map(esc).join(", ") || "none"}.</p>` +
    `<ul class="exclusions">` +
    view.excluded
      .map(
        (e) =>
          `<li data-excluded-method="${esc(e.method)}">Not offered &mdash; ${esc(e.method)}: ${esc(e.rationale)}</li>`,
      )
      .join("") +
    `</ul></section>`;

  const tabs = view.tabs
    .map(
      (family) =>
        `<button class="tab" data-family="${esc(family)}">${esc(family)}</button>`,
    )
    .join("");
  const panels = view.tabs
    .map(
      (family) =>
        `<section class="panel" data-family="${esc(family)}">` +
        (view.methodsByFamily[family] ?? [])
          .map((m) => `<div class="method" data-method="${esc(m)}"></div>`)
          .join("") +
        tabBody(view, family) +
        `</section>`,
    )
    .join("");

  const advanced =
    `<details class="advanced"><summary>Advanced (second-line tools)</summary>` +
    view.deferred
      .map(
        (d) =>
          `<div class="deferred" data-deferred-method="${esc(d.method)}">` +
          `<h4>${esc(d.method)}</h4><p>${esc(d.rationale)}</p></div>`,
      )
      .join("") +
    `<div id="whatif-panel"></div></details>`;

  return (
    `<article class="case" data-case="${esc(view.applicantId)}">` +
    `<header><h2>Case ${esc(view.applicantId)} &mdash; ${verdict}</h2>` +
    `<p class="rating">Rating ${num(view.rating)} vs threshold ${num(view.threshold)}</p></header>` +
    `<table class="summary">${summaryRows}</table>` +
    banner +
    (view.approved
      ? `<p class="disabled-note">Explanations are built for adverse outcomes; this case was approved.</p>`
      : `<nav class="tabs">${tabs}</nav>${panels}${advanced}`) +
    `</article>`
  );
}
