"""Demo report writers: delimited data, JSON reports, series and figures.

Everything written here is byte-deterministic for a fixed seed: floats are
serialized via the standard repr round-trip, dict keys are sorted, file
sets are derived from sorted ids, and the figures are rendered headless
from the same series that land next to them as JSON.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import dump_instances_jsonl
from .credit import (
    MIN_QUADRANT_SIZE,
    SECTORS,
    CreditExplainer,
    CreditScorer,
    Quadrant,
    generate_portfolio,
    portfolio_to_collection,
    quadrant_importance,
    quadrant_members,
)
from .errors import EmptyQuadrant
from .explainers import pdp_curve, training_report
from .plotting import save_importance_figure, save_pdp_figure

PDP_FEATURES = ("size", "leverage", "profitability", "liquidity")
PDP_GRID_POINTS = 20


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_credit_demo(outdir: str | Path, n: int, seed: int, threshold: float = 0.5) -> dict:
    """Seeded end-to-end credit run: portfolio, recommendation, bundles,
    PDP/importance series and their rendered figures.

    Returns a small summary of what was written.
    """
    out = Path(outdir)
    bundles_dir = out / "bundles"
    series_dir = out / "series"
    figures_dir = out / "figures"
    for d in (out, bundles_dir, series_dir, figures_dir):
        d.mkdir(parents=True, exist_ok=True)

    applicants = generate_portfolio(n, seed, threshold)
    scorer = CreditScorer(threshold)
    collection = portfolio_to_collection(applicants, scorer)
    explainer = CreditExplainer(collection, scorer)

    (out / "portfolio.jsonl").write_text(
        dump_instances_jsonl(collection.instances()), encoding="utf-8"
    )
    _write_json(out / "recommendation.json", explainer.recommendation.to_dict())
    _write_json(
        out / "report.json",
        training_report(collection, config_digest=f"n={n};seed={seed};threshold={threshold}"),
    )

    rejected = [a for a in applicants if not a.approved]
    for applicant in sorted(rejected, key=lambda a: a.id):
        bundle = explainer.explain(applicant)
        _write_json(bundles_dir / f"{applicant.id}.json", bundle.to_dict())

    figures = []
    for feature in PDP_FEATURES:
        curve = pdp_curve(collection, scorer.rating, feature, PDP_GRID_POINTS)
        series = {"feature": feature, "points": [[x, y] for x, y in curve]}
        _write_json(series_dir / f"pdp_{feature}.json", series)
        figures.append(
            save_pdp_figure(curve, feature, figures_dir / f"pdp_{feature}.png", ylabel="mean rating")
        )

    for bucket in ("Small", "Large"):
        for sector in SECTORS:
            quadrant = Quadrant(size_bucket=bucket, sector=sector)
            if len(quadrant_members(collection, quadrant)) < MIN_QUADRANT_SIZE:
                continue
            try:
                importances = quadrant_importance(collection, quadrant, scorer)
            except EmptyQuadrant:
                continue
            stem = f"importance_{bucket.lower()}_{sector}"
            _write_json(
                series_dir / f"{stem}.json",
                {
                    "quadrant": {"size_bucket": bucket, "sector": sector},
                    "importances": {k: [m, s] for k, (m, s) in importances.items()},
                },
            )
            figures.append(
                save_importance_figure(
                    importances,
                    figures_dir / f"{stem}.png",
                    title=f"Importance in {bucket}/{sector}",
                )
            )

    return {
        "applicants": len(applicants),
        "rejected": len(rejected),
        "bundles": len(rejected),
        "figures": len(figures),
        "out": str(out),
    }


def plot_series(kind: str, series_path: str | Path, out_path: str | Path) -> Path:
    """Render one exported series JSON into a chart file."""
    obj = json.loads(Path(series_path).read_text(encoding="utf-8"))
    if kind == "pdp":
        points = [(float(x), float(y)) for x, y in obj["points"]]
        return save_pdp_figure(points, str(obj.get("feature", "feature")), out_path)
    if kind == "importance":
        importances = {
            name: (float(pair[0]), float(pair[1])) for name, pair in obj["importances"].items()
        }
        title = obj.get("title") or "Permutation feature importance"
        if "quadrant" in obj:
            q = obj["quadrant"]
            title = f"Importance in {q['size_bucket']}/{q['sector']}"
        return save_importance_figure(importances, out_path, title=title)
    raise ValueError(f"unknown plot kind {kind!r}; expected 'pdp' or 'importance'")
