"""Tests for synthesized-channel quantities, bounds, the symmetric lift and profiles"""

import numpy as np
import pytest

from polar_reading.analysis import (
    classify,
    conditional_entropy,
    holevo_lower_bound,
    lifted_cell,
    lifted_reliability,
    log2_threshold,
    one_step_report,
    polarization_profile,
    rate_reliability_bounds,
    reliability_from_views,
    roga_upper_bound,
    source_reliability,
    symmetric_lift,
    synthesized_rate,
    synthesized_reliability,
    trace_out_correspondence,
)
from polar_reading.cell import (
    CqEnsemble,
    ProbeState,
    ad_cell,
    cq_view,
    random_probe,
    random_qubit_cell,
    rate,
    reliability,
)
from polar_reading.errors import (
    CapacityExceededError,
    IncompletePrefixCoverageError,
    InvalidParameterError,
    ModelMismatchError,
)
from polar_reading.polar import SourceKind, SourceModel, synthesize_all
from tests.fixtures.reference_values import (
    AD_HALF_RATE,
    AD_HALF_Z,
    AD_HALF_Z_MINUS,
    INDUCED_N2_Z_SOURCE_1,
    INDUCED_PRIOR,
    TIGHT,
)

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
UNIFORM = SourceModel(SourceKind.IID_U, 0.5)
INDUCED = SourceModel(SourceKind.INDUCED_FROM_IID_X, INDUCED_PRIOR)


class TestSynthesizedQuantities:
    """Test I(W_N^(i)), Z(W_N^(i)) and source reliabilities"""

    def test_block_length_one(self, ad_half_cell, ket1):
        views = list(synthesize_all(ad_half_cell, ket1, UNIFORM, 1, 1))
        assert synthesized_rate(views) == pytest.approx(AD_HALF_RATE)
        assert reliability_from_views(views) == pytest.approx(AD_HALF_Z)

    def test_orthogonal_cell_is_perfect(self, orthogonal_cell, ket1):
        for i in (1, 2):
            views = list(synthesize_all(orthogonal_cell, ket1, UNIFORM, 2, i))
            assert synthesized_rate(views) == pytest.approx(1.0)
            assert reliability_from_views(views) == pytest.approx(0.0, abs=1e-7)

    def test_block_length_two_reliabilities(self, ad_half_cell, ket1):
        z = [synthesized_reliability(ad_half_cell, ket1, UNIFORM, 2, i) for i in (1, 2)]
        assert z[0] == pytest.approx(AD_HALF_Z_MINUS)
        assert z[1] == pytest.approx(0.5)

    def test_all_plus_index_squares_repeatedly(self, ad_half_cell, ket1):
        assert synthesized_reliability(ad_half_cell, ket1, UNIFORM, 4, 4) == pytest.approx(
            AD_HALF_Z**4
        )

    def test_rates_sum_to_block_information(self, ad_half_cell):
        cell = ad_half_cell
        probe = ProbeState((0.3, 0.0, -0.8))
        total = sum(
            synthesized_rate(list(synthesize_all(cell, probe, UNIFORM, 4, i))) for i in range(1, 5)
        )
        assert total == pytest.approx(4 * rate(cq_view(cell, probe)), abs=1e-8)

    def test_partial_views_rejected(self, ad_half_cell, ket1):
        views = list(synthesize_all(ad_half_cell, ket1, UNIFORM, 2, 2))
        with pytest.raises(IncompletePrefixCoverageError):
            synthesized_rate(views[:1])

    def test_duplicate_views_rejected(self, ad_half_cell, ket1):
        views = list(synthesize_all(ad_half_cell, ket1, UNIFORM, 2, 2))
        with pytest.raises(IncompletePrefixCoverageError):
            reliability_from_views([views[0], views[0]])

    def test_mixed_positions_rejected(self, ad_half_cell, ket1):
        a = list(synthesize_all(ad_half_cell, ket1, UNIFORM, 2, 1))
        b = list(synthesize_all(ad_half_cell, ket1, UNIFORM, 2, 2))
        with pytest.raises(IncompletePrefixCoverageError):
            synthesized_rate(a + b[:1])

    def test_source_reliability_induced(self):
        assert source_reliability(INDUCED, 2, 1) == pytest.approx(INDUCED_N2_Z_SOURCE_1)
        assert source_reliability(INDUCED, 2, 2) == pytest.approx(0.64)

    def test_source_reliability_uniform(self):
        for i in range(1, 5):
            assert source_reliability(UNIFORM, 4, i) == pytest.approx(1.0)

    def test_source_reliability_index_range(self):
        with pytest.raises(InvalidParameterError):
            source_reliability(UNIFORM, 4, 0)


class TestOneStepAndBounds:
    """Test one-step reports and the rate/reliability bounds"""

    def test_reference_cell_report(self, ad_half_cell, ket1):
        r = one_step_report(cq_view(ad_half_cell, ket1))
        assert r.rate == pytest.approx(AD_HALF_RATE)
        assert r.z_minus == pytest.approx(AD_HALF_Z_MINUS)
        assert r.z_plus == pytest.approx(0.5)
        assert r.rate_minus + r.rate_plus == pytest.approx(2 * r.rate)
        assert r.rate_minus <= r.rate <= r.rate_plus

    def test_conditional_entropy(self):
        assert conditional_entropy(CqEnsemble(0.5, KET0, KET1)) == pytest.approx(0.0, abs=1e-12)
        assert conditional_entropy(CqEnsemble(0.5, KET0, KET0)) == pytest.approx(1.0)

    def test_holevo_lower_bound_extremes(self):
        assert holevo_lower_bound(CqEnsemble(0.5, KET0, KET1)) == pytest.approx(1.0)
        assert holevo_lower_bound(CqEnsemble(0.5, KET0, KET0)) == pytest.approx(0.0, abs=1e-12)

    def test_bounds_at_extremes(self):
        assert rate_reliability_bounds(0.5, 0.0) == pytest.approx((1.0, 1.0))
        assert rate_reliability_bounds(0.5, 1.0) == pytest.approx((0.0, 0.0))
        assert roga_upper_bound(0.5, 0.0) == pytest.approx(1.0)
        assert roga_upper_bound(0.5, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_bounds_reject_reliability_above_ceiling(self):
        with pytest.raises(InvalidParameterError):
            rate_reliability_bounds(0.2, 0.9)

    def test_bounds_reject_bad_prior(self):
        with pytest.raises(InvalidParameterError):
            roga_upper_bound(1.0, 0.0)

    def test_bounds_sandwich_random_ensembles(self, rng):
        for _ in range(20):
            e = cq_view(random_qubit_cell(rng), random_probe(rng))
            low, high = rate_reliability_bounds(e.prior_p, reliability(e))
            assert low - TIGHT <= rate(e) <= high + TIGHT
            assert rate(e) <= roga_upper_bound(e.prior_p, reliability(e)) + TIGHT


class TestSymmetricLift:
    """Test the uniform-prior lift of a cq channel"""

    def test_dimension_and_prior(self, ad_half_cell, ket1):
        lift = symmetric_lift(cq_view(ad_half_cell, ket1))
        assert lift.lifted_dim == 4
        assert lift.ensemble.prior_p == 0.5

    def test_identities(self, rng):
        for _ in range(10):
            e = cq_view(random_qubit_cell(rng), random_probe(rng))
            lift = symmetric_lift(e).ensemble
            assert rate(lift) == pytest.approx(1.0 - conditional_entropy(e), abs=TIGHT)
            assert reliability(lift) == pytest.approx(reliability(e), abs=TIGHT)

    def test_lifted_cell_matches_lifted_ensemble(self, rng):
        cell = random_qubit_cell(rng)
        probe = random_probe(rng)
        lifted = cq_view(lifted_cell(cell), probe)
        expected = symmetric_lift(cq_view(cell, probe)).ensemble
        assert lifted_cell(cell).prior_p == 0.5
        assert np.allclose(lifted.state0, expected.state0)
        assert np.allclose(lifted.state1, expected.state1)


class TestTraceOut:
    """Test the lifted-to-asymmetric correspondence"""

    @pytest.mark.parametrize("block_length", [1, 2])
    def test_constant_and_deviation(self, block_length):
        cell = ad_cell(0.1, 0.6, INDUCED_PRIOR)
        probe = ProbeState((0.2, -0.1, -0.7))
        for i in range(1, block_length + 1):
            r = trace_out_correspondence(cell, probe, INDUCED, block_length, i)
            assert r.max_relative_deviation < 1e-9
            assert r.constant == pytest.approx(2.0**-block_length, rel=1e-9)
            assert r.expected_constant == 2.0**-block_length
            assert r.blocks_checked == 2 ** i

    def test_lifted_reliability_matches(self):
        cell = ad_cell(0.0, 0.5, INDUCED_PRIOR)
        probe = ProbeState.ket1()
        for i in (1, 2):
            assert lifted_reliability(cell, probe, 2, i) == pytest.approx(
                synthesized_reliability(cell, probe, INDUCED, 2, i), abs=TIGHT
            )

    def test_rejects_other_source_laws(self, ad_half_cell, ket1):
        with pytest.raises(ModelMismatchError):
            trace_out_correspondence(
                ad_half_cell, ket1, SourceModel(SourceKind.IID_U, 0.3), 2, 1
            )

    def test_uniform_iid_is_accepted(self, ad_half_cell, ket1):
        r = trace_out_correspondence(ad_half_cell, ket1, UNIFORM, 1, 1)
        assert r.max_relative_deviation < 1e-9

    def test_block_length_cap(self, ad_half_cell, ket1):
        with pytest.raises(CapacityExceededError):
            trace_out_correspondence(ad_half_cell, ket1, UNIFORM, 8, 1)
        with pytest.raises(CapacityExceededError):
            lifted_reliability(ad_half_cell, ket1, 8, 1)


class TestProfile:
    """Test thresholds, classification and polarization profiles"""

    def test_log2_threshold(self):
        assert log2_threshold(1, 0.3) == -1.0
        assert log2_threshold(8, 0.49) == pytest.approx(-(2.0**1.47))

    @pytest.mark.parametrize("beta", [-0.1, 0.5, 0.7])
    def test_log2_threshold_beta_range(self, beta):
        with pytest.raises(InvalidParameterError):
            log2_threshold(4, beta)

    def test_classify(self):
        assert classify(0.0, 1.0, -1.0) == (True, False)
        assert classify(1.0, 1.0, -1.0) == (False, True)
        assert classify(0.2, 0.0, -1.0) == (False, True)
        assert classify(0.5, 0.5, -2.0) == (False, False)

    def test_orthogonal_cell_is_all_good(self, orthogonal_cell, ket1):
        profile = polarization_profile(orthogonal_cell, ket1, UNIFORM, 4, 0.49)
        assert profile.good_count == 4
        assert profile.bad_count == 0

    def test_identical_cell_is_all_bad(self, identical_cell, ket1):
        profile = polarization_profile(identical_cell, ket1, UNIFORM, 4, 0.49)
        assert profile.good_count == 0
        assert profile.bad_count == 4
        assert profile.large_z_and_small_source() == 0
        for row in profile.rows:
            assert row.rate == pytest.approx(0.0, abs=1e-9)
            assert row.z == pytest.approx(row.z_source, abs=1e-9)

    def test_counts_document(self, ad_half_cell, ket1):
        counts = polarization_profile(ad_half_cell, ket1, UNIFORM, 2, 0.49).counts()
        assert counts["n"] == 1
        assert counts["block_length"] == 2
        assert counts["good"] + counts["bad"] + counts["unclassified"] == 2

    def test_spread_grows_with_block_length(self, ad_half_cell, ket1):
        spreads = [
            polarization_profile(ad_half_cell, ket1, UNIFORM, n_len, 0.49).spread
            for n_len in (1, 2, 4)
        ]
        assert spreads[0] == 0.0
        assert spreads[0] < spreads[1] < spreads[2]

    def test_thread_count_does_not_change_rows(self, mock_env_vars, ad_half_cell, ket1):
        mock_env_vars.setenv("POLAR_READING_THREADS", "1")
        serial = polarization_profile(ad_half_cell, ket1, INDUCED, 4, 0.49)
        mock_env_vars.setenv("POLAR_READING_THREADS", "4")
        threaded = polarization_profile(ad_half_cell, ket1, INDUCED, 4, 0.49)
        assert serial.rows == threaded.rows

    def test_rows_are_in_index_order(self, ad_half_cell, ket1):
        profile = polarization_profile(ad_half_cell, ket1, UNIFORM, 4, 0.49)
        assert [r.index for r in profile.rows] == [1, 2, 3, 4]
