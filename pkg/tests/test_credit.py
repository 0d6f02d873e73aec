import math

import numpy as np
import pytest

from admexplain.core import Mode
from admexplain.credit import (
    APPROVED,
    FEATURE_ORDER,
    REJECTED,
    CreditExplainer,
    CreditScorer,
    Quadrant,
    explain_rejection,
    generate_portfolio,
    portfolio_to_collection,
    quadrant_importance,
    quadrant_of,
    whatif_rescore,
)
from admexplain.errors import ApplicantApproved, EmptyQuadrant, OutOfRangeEdit, UnknownFeature
from admexplain.framework import method_categories, ranked_families


@pytest.fixture(scope="module")
def portfolio():
    applicants = generate_portfolio(220, seed=7)
    scorer = CreditScorer()
    return applicants, scorer, portfolio_to_collection(applicants, scorer)


@pytest.fixture(scope="module")
def explainer(portfolio):
    _, scorer, collection = portfolio
    return CreditExplainer(collection, scorer)


class TestGeneratePortfolio:
    def test_same_seed_same_portfolio(self):
        assert generate_portfolio(40, seed=3) == generate_portfolio(40, seed=3)

    def test_different_seed_differs(self):
        assert generate_portfolio(40, seed=3) != generate_portfolio(40, seed=4)

    def test_n_one_gets_quadrant_metadata(self):
        (applicant,) = generate_portfolio(1, seed=5)
        scorer = CreditScorer()
        collection = portfolio_to_collection([applicant], scorer)
        inst = collection.get(applicant.id)
        assert inst.metadata["size_bucket"] in {"Small", "Large"}
        assert inst.metadata["sector"] == applicant.sector_name

    def test_worst_fundamentals_rate_below_median(self):
        applicants = generate_portfolio(300, seed=11)
        worst = max(
            applicants,
            key=lambda a: a.features["leverage"] - a.features["profitability"],
        )
        ratings = sorted(a.rating for a in applicants)
        median_rating = ratings[len(ratings) // 2]
        assert worst.rating < median_rating

    def test_approval_consistent_with_threshold(self):
        for applicant in generate_portfolio(100, seed=13, threshold=0.6):
            assert applicant.approved == (applicant.rating >= 0.6)

    def test_mixed_outcomes_present(self, portfolio):
        applicants, _, _ = portfolio
        outcomes = {a.approved for a in applicants}
        assert outcomes == {True, False}


class TestWhatIfRescore:
    def test_empty_edits_identity(self, portfolio):
        applicants, scorer, _ = portfolio
        result = whatif_rescore(applicants[0], {}, scorer)
        assert result.delta == 0.0
        assert result.rating == pytest.approx(applicants[0].rating)

    def test_lower_leverage_strictly_raises_rating(self, portfolio):
        applicants, scorer, _ = portfolio
        applicant = applicants[0]
        lowered = max(0.0, applicant.features["leverage"] - 0.5)
        result = whatif_rescore(applicant, {"leverage": lowered}, scorer)
        assert result.rating > applicant.rating

    def test_matches_direct_formula_evaluation(self, portfolio):
        applicants, scorer, _ = portfolio
        rng = np.random.default_rng(17)
        for applicant in applicants[:20]:
            edits = {
                "leverage": float(rng.gamma(2.0, 0.5)),
                "profitability": float(np.clip(rng.normal(0.08, 0.1), -1, 1)),
            }
            result = whatif_rescore(applicant, edits, scorer)
            assert result.rating == pytest.approx(
                scorer.rating({**applicant.features, **edits}), abs=1e-12
            )
            assert result.delta == pytest.approx(result.rating - applicant.rating, abs=1e-12)

    def test_out_of_range_edit_rejected(self, portfolio):
        applicants, scorer, _ = portfolio
        with pytest.raises(OutOfRangeEdit):
            whatif_rescore(applicants[0], {"leverage": -1.0}, scorer)
        with pytest.raises(OutOfRangeEdit):
            whatif_rescore(applicants[0], {"profitability": 2.0}, scorer)

    def test_unknown_feature_rejected(self, portfolio):
        applicants, scorer, _ = portfolio
        with pytest.raises(UnknownFeature):
            whatif_rescore(applicants[0], {"vibes": 1.0}, scorer)

    def test_pure_function(self, portfolio):
        applicants, scorer, _ = portfolio
        a = whatif_rescore(applicants[3], {"liquidity": 2.0}, scorer)
        b = whatif_rescore(applicants[3], {"liquidity": 2.0}, scorer)
        assert a == b


class TestQuadrantImportance:
    def test_small_quadrant_guard(self, portfolio):
        _, scorer, collection = portfolio
        with pytest.raises(EmptyQuadrant):
            quadrant_importance(
                collection, Quadrant("Small", "no-such-sector"), scorer
            )

    def test_leverage_outranks_sector_noise(self, portfolio):
        _, scorer, collection = portfolio
        quadrant = Quadrant("Large", "services")
        importances = quadrant_importance(collection, quadrant, scorer, seed=2)
        assert importances["leverage"][0] > importances["sector"][0]
        assert importances["sector"] == (0.0, 0.0)

    def test_constant_feature_scores_zero(self, portfolio):
        # sector is constant inside a quadrant, so its shuffle is an identity
        _, scorer, collection = portfolio
        importances = quadrant_importance(collection, Quadrant("Small", "retail"), scorer)
        assert importances["sector"] == (0.0, 0.0)


class TestExplainRejection:
    def rejected(self, portfolio):
        applicants, _, _ = portfolio
        return next(a for a in applicants if not a.approved)

    def test_approved_applicant_rejected(self, portfolio, explainer):
        applicants, _, _ = portfolio
        approved = next(a for a in applicants if a.approved)
        with pytest.raises(ApplicantApproved):
            explainer.explain(approved)

    def test_bundle_structure(self, portfolio, explainer):
        bundle = explainer.explain(self.rejected(portfolio))
        assert bundle.prototypes and bundle.criticisms and bundle.influences
        assert bundle.neighbors["approved"] and bundle.neighbors["rejected"]
        assert bundle.rendered_text
        assert bundle.counterfactual is None  # simulation stays deferred

    def test_attribution_efficiency_in_bundle(self, portfolio, explainer):
        bundle = explainer.explain(self.rejected(portfolio))
        total = sum(bundle.attributions.values())
        assert total + bundle.attribution_base == pytest.approx(
            bundle.attribution_prediction, abs=1e-9
        )

    def test_referenced_ids_exist(self, portfolio, explainer):
        _, _, collection = portfolio
        bundle = explainer.explain(self.rejected(portfolio))
        assert all(collection.get(i) is not None for i in bundle.referenced_ids())

    def test_method_families_match_recommendation(self, portfolio, explainer):
        bundle = explainer.explain(self.rejected(portfolio))
        categories = method_categories()
        bundle_families = {categories[m] for m in bundle.methods_used}
        assert bundle_families == ranked_families(explainer.recommendation)
        assert Mode.SIMULATION_PROJECTION not in bundle_families

    def test_data_method_families_are_structure_recall_covariation(self, portfolio, explainer):
        # excluding the text renderer, everything is structure/recall/covariation
        bundle = explainer.explain(self.rejected(portfolio))
        categories = method_categories()
        data_families = {
            categories[m]
            for m in bundle.methods_used
            if m != "Natural Language Explanations (NLE)"
        }
        assert data_families == {
            Mode.KNOWLEDGE_STRUCTURES, Mode.DIRECT_RECALL, Mode.COVARIATION,
        }

    def test_self_never_among_rejected_neighbors(self, portfolio, explainer):
        applicant = self.rejected(portfolio)
        bundle = explainer.explain(applicant)
        assert applicant.id not in [i for i, _ in bundle.neighbors["rejected"]]

    def test_one_shot_wrapper_equivalent(self, portfolio, explainer):
        _, scorer, collection = portfolio
        applicant = self.rejected(portfolio)
        assert explain_rejection(collection, applicant, scorer) == explainer.explain(applicant)


class TestQuadrantAssignment:
    def test_every_applicant_maps_to_exactly_one(self, portfolio):
        applicants, _, collection = portfolio
        for applicant in applicants[:30]:
            quadrant = quadrant_of(collection, applicant.features, applicant.sector_name)
            inst = collection.get(applicant.id)
            assert inst.metadata["size_bucket"] == quadrant.size_bucket
            assert inst.metadata["sector"] == quadrant.sector
