"""Post-study odds, strong-design conditions and the evidence grid."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bacs.core import (
    TABLE1_GRID,
    THRESHOLD_PRESETS,
    DesignPrior,
    EvidenceThresholds,
    OperatingCharacteristics,
    bacs_table,
    is_strong_design,
    post_study_odds,
    required_sensitivity,
)
from bacs.errors import DegenerateCharacteristicsError, DomainError

TAU = THRESHOLD_PRESETS["confirmatory"]
GRID_POINTS = 10_000


def _odds(r01, spec, sens):
    return post_study_odds(DesignPrior(r01), OperatingCharacteristics(spec, sens))


@pytest.fixture(scope="module")
def grid():
    rng = np.random.default_rng(7)
    r01 = np.exp(rng.uniform(np.log(0.05), np.log(20.0), GRID_POINTS))
    spec = rng.uniform(0.01, 0.99, GRID_POINTS)
    sens = rng.uniform(0.01, 0.99, GRID_POINTS)
    return r01, spec, sens


class TestPostStudyOdds:
    def test_reference_design(self):
        res = _odds(1.0, 0.95, 0.80)
        np.testing.assert_allclose([res.neg_odds, res.pos_odds], [4.75, 16.0], rtol=1e-12)

    @pytest.mark.parametrize("r01", [0.1, 0.56, 1.0, 7.0])
    def test_no_information(self, r01):
        res = _odds(r01, 0.5, 0.5)
        np.testing.assert_allclose([res.neg_odds, res.pos_odds], [r01, 1 / r01], rtol=1e-15)

    def test_high_specificity(self):
        res = _odds(2.0, 0.975, 0.90)
        np.testing.assert_allclose([res.neg_odds, res.pos_odds], [19.5, 18.0], rtol=1e-12)

    def test_phase1_prior(self):
        res = _odds(0.56, 0.95, 0.79)
        assert abs(res.neg_odds - 2.53) < 0.01
        assert abs(res.pos_odds - 28.2) < 0.05

    @pytest.mark.parametrize("spec,sens", [(1.0, 0.8), (0.95, 1.0), (0.0, 0.5), (0.5, 0.0)])
    def test_degenerate(self, spec, sens):
        with pytest.raises(DegenerateCharacteristicsError):
            _odds(1.0, spec, sens)

    @pytest.mark.parametrize("r01", [0.0, -1.0, float("inf"), float("nan")])
    def test_bad_prior(self, r01):
        with pytest.raises(DomainError):
            DesignPrior(r01)

    def test_prior_probabilities(self):
        p = DesignPrior(0.5)
        assert p.r10 == 2.0
        assert p.p_h0 == pytest.approx(1 / 3)
        assert p.p_h0 + p.p_h1 == pytest.approx(1.0)


class TestRandomGridProperties:
    """Properties over a fixed random grid of 10^4 points."""

    def test_monotone_in_both(self, grid):
        h = 1e-4
        for r, s, n in zip(*grid):
            base = _odds(r, s, n)
            up_s = _odds(r, s + h, n)
            up_n = _odds(r, s, n + h)
            assert up_s.neg_odds > base.neg_odds and up_n.neg_odds > base.neg_odds
            assert up_s.pos_odds > base.pos_odds and up_n.pos_odds > base.pos_odds

    def test_support_iff(self, grid):
        for r, s, n in zip(*grid):
            prior = DesignPrior(r)
            res = _odds(r, s, n)
            post_h0 = res.neg_odds / (1 + res.neg_odds)
            post_h1 = res.pos_odds / (1 + res.pos_odds)
            supports = post_h0 >= prior.p_h0 - 1e-15 and post_h1 >= prior.p_h1 - 1e-15
            assert supports == (s + n >= 1.0)

    def test_reciprocity(self, grid):
        for r, s, n in zip(*grid):
            res = _odds(r, s, n)
            np.testing.assert_allclose(res.pos_odds * r, res.pos_lr, rtol=1e-14)
            np.testing.assert_allclose(res.neg_odds, r * res.neg_lr, rtol=1e-14)

    def test_fixpoint(self, grid):
        for r in grid[0]:
            res = _odds(r, 0.5, 0.5)
            assert res.neg_odds == pytest.approx(r, rel=1e-14)
            assert res.pos_odds == pytest.approx(1 / r, rel=1e-14)

    def test_required_sensitivity_is_tight(self, grid):
        for r, s, _ in zip(*grid):
            req = required_sensitivity(DesignPrior(r), s, TAU)
            if not req.feasible:
                assert req.sup_pos_odds <= TAU.tau_p or req.min_sensitivity is None
                continue
            chk = is_strong_design(DesignPrior(r), OperatingCharacteristics(s, min(req.min_sensitivity + 1e-9, 1 - 1e-12)), TAU)
            assert chk.weak_regression_only
            if req.min_sensitivity > 1e-6:
                below = is_strong_design(DesignPrior(r), OperatingCharacteristics(s, req.min_sensitivity - 1e-6), TAU)
                assert not below.weak_regression_only


class TestHypothesis:
    @settings(max_examples=300, deadline=None)
    @given(st.floats(0.01, 0.99))
    def test_symmetry_at_equipoise(self, x):
        res = _odds(1.0, x, x)
        assert res.neg_odds == pytest.approx(res.pos_odds, rel=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0.05, 20.0), st.floats(0.5, 0.99), st.floats(0.5, 0.99))
    def test_strong_implies_weak(self, r01, spec, sens):
        chk = is_strong_design(DesignPrior(r01), OperatingCharacteristics(spec, sens), TAU)
        if chk.strong:
            assert chk.weak_regression_only


class TestStrongDesign:
    def test_boundary_counts(self):
        chk = is_strong_design(DesignPrior(1.0), OperatingCharacteristics(0.95, 0.80), TAU)
        assert chk.strong and chk.weak_regression_only
        np.testing.assert_allclose(chk.margins, (0.0, 0.0), atol=1e-12)

    def test_optimistic_prior_not_strong(self):
        chk = is_strong_design(DesignPrior(0.56), OperatingCharacteristics(0.95, 0.80), TAU)
        assert not chk.strong
        assert chk.bacs.neg_odds == pytest.approx(2.66)

    def test_no_information_not_strong(self):
        chk = is_strong_design(DesignPrior(1.0), OperatingCharacteristics(0.5, 0.5), EvidenceThresholds(1.01, 1.01))
        assert not chk.strong

    def test_threshold_below_prior(self):
        # The odds clear the thresholds but tau_n does not exceed the prior odds.
        chk = is_strong_design(DesignPrior(5.0), OperatingCharacteristics(0.95, 0.95), EvidenceThresholds(4.75, 1.5))
        assert chk.weak_regression_only and not chk.strong

    def test_bad_thresholds(self):
        with pytest.raises(DomainError):
            EvidenceThresholds(0.0, 16.0)


class TestRequiredSensitivity:
    def test_infeasible_pessimistic_prior(self):
        req = required_sensitivity(DesignPrior(2.0), 0.95, TAU)
        assert not req.feasible
        assert req.sup_pos_odds == pytest.approx(10.0)

    def test_equipoise(self):
        req = required_sensitivity(DesignPrior(1.0), 0.95, TAU)
        assert req.min_sensitivity == pytest.approx(0.80, abs=1e-12)

    def test_phase1_prior(self):
        req = required_sensitivity(DesignPrior(0.56), 0.95, TAU)
        assert req.min_sensitivity == pytest.approx(1 - 0.56 * 0.95 / 4.75, abs=1e-12)


class TestBacsTable:
    def test_thirteen_rows(self):
        rows = bacs_table(TABLE1_GRID)
        assert len(rows) == 13
        assert rows[0]["neg_odds"] == "r01" and rows[0]["pos_odds"] == "1/r01"

    @pytest.mark.parametrize("r01,spec,sens,neg,pos", [
        (0.5, 0.95, 0.80, 2.375, 32.0),
        (2.0, 0.80, 0.80, 8.0, 2.0),
        (1.0, 0.90, 0.90, 9.0, 9.0),
    ])
    def test_rows(self, r01, spec, sens, neg, pos):
        row = next(r for r in bacs_table(TABLE1_GRID) if r["r01"] == r01 and r["specificity"] == spec
                   and r["sensitivity"] == sens)
        np.testing.assert_allclose([row["neg_odds"], row["pos_odds"]], [neg, pos], rtol=1e-12)

    def test_crossed_grid(self):
        rows = bacs_table([1.0, 2.0], [(0.9, 0.9)])
        assert [r["r01"] for r in rows] == [1.0, 2.0]

    def test_empty(self):
        with pytest.raises(DomainError):
            bacs_table([])

    def test_prior_free_row_requires_half(self):
        with pytest.raises(DomainError):
            bacs_table([(None, 0.9, 0.9)])
