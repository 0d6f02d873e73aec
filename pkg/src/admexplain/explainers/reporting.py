"""Rationalization-mode outputs: the training report and templated text.

The text renderer fills fixed per-mode templates from bundle fields; there
is no free generation, so identical bundles always render identically.
"""

from __future__ import annotations

from typing import Mapping

from ..core import ExplanationBundle, Mode, Scalar
from ..errors import MissingBundleField
from ..store import Collection


def training_report(collection: Collection, config_digest: str = "") -> dict:
    """Snapshot facts about the collection backing the model's explanations.

    Rates are None (absent) when the snapshot cannot support them: no
    instances, no labels, or no label/prediction pairs.
    """
    insts = collection.instances()
    n = len(insts)
    labeled = [i for i in insts if i.label is not None]
    paired = [i for i in insts if i.label is not None and i.prediction is not None]

    class_balance = None
    if labeled:
        counts: dict[str, int] = {}
        for inst in labeled:
            key = str(inst.label)
            counts[key] = counts.get(key, 0) + 1
        class_balance = {k: counts[k] / len(labeled) for k in sorted(counts)}

    return {
        "collection": collection.name,
        "dimension": collection.dimension,
        "metric": collection.metric.value,
        "instance_count": n,
        "class_balance": class_balance,
        "validated_fraction": (sum(i.validated for i in insts) / n) if n else None,
        "global_error_rate": (
            sum(i.label != i.prediction for i in paired) / len(paired) if paired else None
        ),
        "config_digest": config_digest,
    }


def _fmt(value: float) -> str:
    return format(value, ".6g")


def _require(bundle: ExplanationBundle, field_name: str):
    value = getattr(bundle, field_name)
    if not value:
        raise MissingBundleField(f"template needs a populated {field_name!r} field")
    return value


def _nearest_case(bundle: ExplanationBundle) -> tuple[str, float]:
    pools = [entry for entries in bundle.neighbors.values() for entry in entries]
    pools.extend(bundle.prototypes)
    if not pools:
        raise MissingBundleField("template needs neighbors or prototypes")
    return min(pools, key=lambda e: (e[1], e[0]))


def render_text(
    bundle: ExplanationBundle,
    mode: Mode,
    label_lookup: Mapping[str, Scalar] | None = None,
) -> str:
    """Render the bundle through the fixed template of the chosen mode."""
    if mode is Mode.KNOWLEDGE_STRUCTURES:
        protos = _require(bundle, "prototypes")
        parts = ", ".join(f"{i} (distance {_fmt(d)})" for i, d in protos)
        text = f"Cases most representative of each outcome: {parts}."
        if bundle.criticisms:
            crit = ", ".join(i for i, _ in bundle.criticisms)
            text += f" Outliers those examples cover poorly: {crit}."
        return text

    if mode is Mode.SIMULATION_PROJECTION:
        cf = bundle.counterfactual
        if cf is None:
            raise MissingBundleField("template needs a counterfactual")
        return (
            f"The nearest stored case with a different outcome is {cf[0]} at "
            f"distance {_fmt(cf[1])}; matching its profile would change the decision."
        )

    if mode is Mode.COVARIATION:
        attr = _require(bundle, "attributions")
        top = sorted(attr.items(), key=lambda e: (-abs(e[1]), e[0]))[:3]
        parts = ", ".join(f"{name} ({value:+.4g})" for name, value in top)
        return f"Strongest feature signals for this case: {parts}."

    if mode is Mode.DIRECT_RECALL:
        case_id, dist = _nearest_case(bundle)
        decided = ""
        if label_lookup is not None and case_id in label_lookup:
            decided = f" decided as {label_lookup[case_id]}"
        return f"This case most resembles {case_id}{decided} at distance {_fmt(dist)}."

    if mode is Mode.RATIONALIZATION:
        attr = _require(bundle, "attributions")
        name, value = max(attr.items(), key=lambda e: (abs(e[1]), e[0]))
        return (
            f"Decision for {bundle.query_id}: the dominant factor was {name} "
            f"({value:+.4g} relative to the cohort baseline), supported by the "
            f"similar cases on record."
        )

    raise MissingBundleField(f"no template for mode {mode!r}")
