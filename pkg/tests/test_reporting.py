import json

import pytest

from admexplain.core import ExplanationBundle, Mode
from admexplain.errors import MissingBundleField
from admexplain.explainers import render_text, training_report
from admexplain.store import Collection

from .conftest import make_instance


class TestTrainingReport:
    def test_empty_collection_reports_absent_rates(self):
        report = training_report(Collection("empty", 3))
        assert report["instance_count"] == 0
        assert report["class_balance"] is None
        assert report["validated_fraction"] is None
        assert report["global_error_rate"] is None

    def test_t4_perfect_predictions(self, t4):
        report = training_report(t4)
        assert report["global_error_rate"] == 0.0
        assert report["class_balance"] == {"0": 0.5, "1": 0.5}
        assert report["dimension"] == 2
        assert report["metric"] == "Euclidean"

    def test_byte_identical_for_fixed_snapshot(self, t4):
        a = json.dumps(training_report(t4, "digest"), sort_keys=True)
        b = json.dumps(training_report(t4, "digest"), sort_keys=True)
        assert a.encode() == b.encode()

    def test_error_rate_counts_mismatches(self):
        c = Collection("c", 1)
        c.upsert(make_instance("a", (0.0,), label=1, prediction=0))
        c.upsert(make_instance("b", (1.0,), label=1, prediction=1))
        assert training_report(c)["global_error_rate"] == 0.5


def bundle(**overrides):
    base = dict(
        query_id="q1",
        prototypes=[("A", 0.4), ("C", 10.0)],
        criticisms=[("B", 0.2)],
        counterfactual=("C", 10.0),
        influences=[("A", 0.5)],
        attributions={"leverage": -0.12, "profitability": 0.05},
    )
    base.update(overrides)
    return ExplanationBundle(**base)


class TestRenderText:
    def test_counterfactual_template_substitutes_values(self):
        text = render_text(bundle(), Mode.SIMULATION_PROJECTION)
        assert "C" in text and "10" in text

    def test_missing_prototypes_for_knowledge_structures(self):
        with pytest.raises(MissingBundleField):
            render_text(bundle(prototypes=[]), Mode.KNOWLEDGE_STRUCTURES)

    def test_deterministic(self):
        b = bundle()
        assert render_text(b, Mode.DIRECT_RECALL) == render_text(b, Mode.DIRECT_RECALL)

    def test_direct_recall_names_nearest_case(self):
        text = render_text(bundle(), Mode.DIRECT_RECALL, label_lookup={"A": "rejected"})
        assert "most resembles A" in text
        assert "decided as rejected" in text
        assert "0.4" in text

    def test_knowledge_structures_lists_prototypes_and_outliers(self):
        text = render_text(bundle(), Mode.KNOWLEDGE_STRUCTURES)
        assert "A" in text and "C" in text and "B" in text

    def test_covariation_orders_by_magnitude(self):
        text = render_text(bundle(), Mode.COVARIATION)
        assert text.index("leverage") < text.index("profitability")

    def test_rationalization_requires_attributions(self):
        with pytest.raises(MissingBundleField):
            render_text(bundle(attributions={}), Mode.RATIONALIZATION)

    def test_missing_counterfactual(self):
        with pytest.raises(MissingBundleField):
            render_text(bundle(counterfactual=None), Mode.SIMULATION_PROJECTION)
