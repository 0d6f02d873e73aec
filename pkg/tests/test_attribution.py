import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admexplain.errors import MissingLabels, TooManyFeaturesForExact
from admexplain.explainers import PredictMode, knn_shapley
from admexplain.explainers.attribution import AttributionResult
from admexplain.store import Collection

from .conftest import make_instance
from .oracles import knn_target_mean, shapley_by_permutations


def feature_collection(seed, n, d, regress=True):
    """Random feature-bearing collection; embeddings mirror the features."""
    rng = np.random.default_rng(seed)
    c = Collection(f"feat-{seed}", dimension=d)
    width = len(str(n - 1))
    for i in range(n):
        vec = rng.normal(0.0, 1.0, d)
        label = float(rng.normal(0.0, 1.0)) if regress else int(rng.integers(2))
        c.upsert(make_instance(
            f"p{i:0{width}d}", vec, label=label,
            features={f"f{j}": float(vec[j]) for j in range(d)},
        ))
    return c


def oracle_attributions(collection, query_features, k, d):
    """Independent path: permutation-averaged Shapley over the reference v."""
    names = sorted(query_features)
    rows = [
        (inst.id, dict(inst.features), float(inst.label))
        for inst in collection.instances()
    ]

    def value(subset_indices):
        subset = {names[j] for j in subset_indices}
        return knn_target_mean(rows, query_features, subset, k, d)

    return dict(zip(names, shapley_by_permutations(value, d)))


class TestAttributionResult:
    def test_efficiency_enforced_at_construction(self):
        with pytest.raises(ValueError):
            AttributionResult(per_feature={"a": 1.0}, base_value=0.0, prediction=0.5)


class TestKnnShapleySmall:
    def test_single_feature_gets_full_gap(self):
        c = feature_collection(seed=1, n=12, d=1)
        query = {"f0": 0.3}
        result = knn_shapley(c, query, k=3, mode=PredictMode.REGRESS)
        assert result.per_feature["f0"] == pytest.approx(
            result.prediction - result.base_value, abs=1e-12
        )

    def test_duplicated_feature_columns_share_attribution(self):
        rng = np.random.default_rng(2)
        c = Collection("dup", dimension=2)
        for i in range(14):
            v = float(rng.normal())
            noise = float(rng.normal())
            c.upsert(make_instance(
                f"p{i:02d}", (v, noise), label=float(rng.normal()),
                features={"a": v, "b": v, "z": noise},
            ))
        query = {"a": 0.25, "b": 0.25, "z": -0.4}
        result = knn_shapley(c, query, k=3, mode=PredictMode.REGRESS)
        assert result.per_feature["a"] == pytest.approx(result.per_feature["b"], abs=1e-9)

    def test_true_dummy_feature_scores_zero(self):
        # "constant" never changes v(S): its column matches the query exactly
        # (so non-empty neighborhoods are untouched) and the labels are laid
        # out so the all-tied neighborhood mean equals the collection mean
        # (so the empty-set margin is untouched too).
        labels = [1.0, 2.0, 3.0, 2.0, 2.0, 2.0]  # first-3 mean == global mean == 2
        xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
        c = Collection("dummy", dimension=2)
        for i, (x, label) in enumerate(zip(xs, labels)):
            c.upsert(make_instance(
                f"p{i}", (x, 5.0), label=label,
                features={"real": x, "constant": 5.0},
            ))
        result = knn_shapley(c, {"real": 2.6, "constant": 5.0}, k=3, mode=PredictMode.REGRESS)
        assert result.per_feature["constant"] == 0.0
        assert result.per_feature["real"] != 0.0

    def test_all_features_dummy_when_k_covers_collection(self):
        # k >= n makes every neighborhood the whole collection, so every
        # feature is a dummy and every attribution is exactly zero
        c = feature_collection(seed=3, n=8, d=3)
        query = {f"f{j}": 0.2 * j for j in range(3)}
        result = knn_shapley(c, query, k=8, mode=PredictMode.REGRESS)
        # sums of the same targets in different neighbor orders differ only
        # in the last float bits
        assert all(abs(v) < 1e-12 for v in result.per_feature.values())
        assert result.prediction == pytest.approx(result.base_value, abs=1e-12)

    def test_exact_mode_guard(self):
        c = feature_collection(seed=5, n=10, d=3)
        query = {f"f{j}": 0.0 for j in range(3)}
        with pytest.raises(TooManyFeaturesForExact):
            knn_shapley(c, query, k=3, mode=PredictMode.REGRESS,
                        max_exact_dim=2, method="exact")

    def test_missing_labels(self):
        c = Collection("c", 1)
        c.upsert(make_instance("a", (0.0,), features={"f": 0.0}))
        with pytest.raises(MissingLabels):
            knn_shapley(c, {"f": 0.0}, k=1)


class TestKnnShapleyOracle:
    def test_d4_regression_matches_enumeration_oracle(self):
        c = feature_collection(seed=7, n=30, d=4)
        rng = np.random.default_rng(70)
        for _ in range(5):
            query = {f"f{j}": float(rng.normal()) for j in range(4)}
            result = knn_shapley(c, query, k=5, mode=PredictMode.REGRESS)
            expected = oracle_attributions(c, query, k=5, d=4)
            for name in expected:
                assert result.per_feature[name] == pytest.approx(expected[name], abs=1e-9)

    def test_classification_vote_fraction_target(self):
        c = feature_collection(seed=11, n=30, d=3, regress=False)
        rng = np.random.default_rng(71)
        query = {f"f{j}": float(rng.normal()) for j in range(3)}
        result = knn_shapley(c, query, k=5, mode=PredictMode.CLASSIFY, positive_label=1)
        rows = [
            (inst.id, dict(inst.features), float(inst.label == 1))
            for inst in c.instances()
        ]
        names = sorted(query)

        def value(subset_indices):
            subset = {names[j] for j in subset_indices}
            return knn_target_mean(rows, query, subset, 5, 3)

        expected = dict(zip(names, shapley_by_permutations(value, 3)))
        for name in expected:
            assert result.per_feature[name] == pytest.approx(expected[name], abs=1e-9)

    def test_sampled_mode_keeps_efficiency_and_determinism(self):
        c = feature_collection(seed=13, n=25, d=9)
        query = {f"f{j}": 0.1 * j for j in range(9)}
        a = knn_shapley(c, query, k=4, mode=PredictMode.REGRESS,
                        max_exact_dim=6, sample_count=50, seed=123)
        b = knn_shapley(c, query, k=4, mode=PredictMode.REGRESS,
                        max_exact_dim=6, sample_count=50, seed=123)
        assert a == b
        total = sum(a.per_feature.values())
        assert total + a.base_value == pytest.approx(a.prediction, abs=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_efficiency_property_random_cases(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, 5))
        c = feature_collection(seed=seed, n=int(rng.integers(5, 25)), d=d)
        query = {f"f{j}": float(rng.normal()) for j in range(d)}
        result = knn_shapley(c, query, k=3, mode=PredictMode.REGRESS)
        assert sum(result.per_feature.values()) + result.base_value == pytest.approx(
            result.prediction, abs=1e-9
        )
