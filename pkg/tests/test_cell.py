"""Tests for memory cells, probes and the classical-quantum view"""

import numpy as np
import pytest

from polar_reading.cell import (
    CqEnsemble,
    KrausChannel,
    MemoryCell,
    ProbeState,
    ad_cell,
    amplitude_damping,
    apply_channel,
    cq_view,
    joint_state,
    kraus_cell,
    random_kraus_channel,
    random_probe,
    random_qubit_cell,
    rate,
    reliability,
)
from polar_reading.errors import DimensionMismatchError, InvalidParameterError
from polar_reading.qmat import binary_entropy, check_density, random_density

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = 0.5 * np.ones((2, 2), dtype=complex)


class TestProbeState:
    """Test Bloch-vector probes"""

    def test_ket_conventions(self):
        assert np.allclose(ProbeState.ket0().density(), KET0)
        assert np.allclose(ProbeState.ket1().density(), KET1)

    def test_maximally_mixed(self):
        assert np.allclose(ProbeState.maximally_mixed().density(), np.eye(2) / 2)

    def test_rejects_vector_outside_ball(self):
        with pytest.raises(InvalidParameterError):
            ProbeState((1.0, 0.1, 0.0))

    def test_rejects_wrong_length(self):
        with pytest.raises(InvalidParameterError):
            ProbeState((0.0, 0.0))

    def test_random_probe_density_is_valid(self, rng):
        for _ in range(20):
            probe = random_probe(rng)
            assert probe.radius <= 1.0 + 1e-12
            check_density(probe.density())


class TestKrausChannel:
    """Test Kraus channel validation"""

    def test_rejects_non_trace_preserving(self):
        with pytest.raises(InvalidParameterError, match="trace preserving"):
            KrausChannel((np.eye(2) * 0.9,))

    def test_rejects_mixed_shapes(self):
        with pytest.raises(DimensionMismatchError):
            KrausChannel((np.eye(2), np.zeros((3, 3))))

    def test_rectangular_operators(self, rng):
        ch = random_kraus_channel(rng, dim_in=2, dim_out=4, n_ops=3)
        assert (ch.dim_in, ch.dim_out) == (2, 4)
        check_density(apply_channel(ch, random_density(rng, 2)))

    def test_cell_rejects_mismatched_channels(self, rng):
        with pytest.raises(DimensionMismatchError):
            MemoryCell(random_kraus_channel(rng, 2, 2), random_kraus_channel(rng, 2, 3), 0.5)

    @pytest.mark.parametrize("prior", [0.0, 1.0, -0.2])
    def test_cell_rejects_degenerate_prior(self, prior):
        with pytest.raises(InvalidParameterError):
            ad_cell(0.1, 0.2, prior)


class TestAmplitudeDamping:
    """Test the amplitude damping channel"""

    def test_zero_damping_is_identity(self, rng):
        rho = random_density(rng, 2)
        assert np.allclose(apply_channel(amplitude_damping(0.0), rho), rho)

    def test_full_damping_resets(self, rng):
        rho = random_density(rng, 2)
        assert np.allclose(apply_channel(amplitude_damping(1.0), rho), KET0)

    def test_partial_damping_of_excited_state(self):
        out = apply_channel(amplitude_damping(0.3), KET1)
        assert np.allclose(out, np.diag([0.3, 0.7]))

    def test_partial_damping_of_plus_state(self):
        out = apply_channel(amplitude_damping(0.3), PLUS)
        assert out[0, 0].real == pytest.approx(0.65)
        assert out[1, 1].real == pytest.approx(0.35)
        assert out[0, 1].real == pytest.approx(0.5 * np.sqrt(0.7))

    def test_rejects_gamma_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            amplitude_damping(1.5)

    def test_apply_channel_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            apply_channel(amplitude_damping(0.2), np.eye(3) / 3)


class TestCqView:
    """Test the cell seen as a cq channel"""

    def test_identical_channels(self, identical_cell, rng):
        e = cq_view(identical_cell, random_probe(rng))
        assert np.allclose(e.state0, e.state1)

    def test_orthogonal_read_with_ket1(self, orthogonal_cell, ket1):
        e = cq_view(orthogonal_cell, ket1)
        assert np.allclose(e.state0, KET1)
        assert np.allclose(e.state1, KET0)

    def test_maximally_mixed_probe(self, orthogonal_cell):
        e = cq_view(orthogonal_cell, ProbeState.maximally_mixed())
        assert np.allclose(e.state0, np.eye(2) / 2)
        assert np.allclose(e.state1, KET0)

    def test_accepts_density_matrix_probe(self, orthogonal_cell):
        e = cq_view(orthogonal_cell, KET1)
        assert np.allclose(e.state1, KET0)

    def test_kraus_cell_matches_ad_cell(self):
        a = amplitude_damping(0.4)
        cell = kraus_cell(a.kraus_ops, amplitude_damping(0.9).kraus_ops, 0.3)
        reference = ad_cell(0.4, 0.9, 0.3)
        probe = ProbeState((0.3, -0.2, 0.5))
        assert reliability(cq_view(cell, probe)) == pytest.approx(
            reliability(cq_view(reference, probe))
        )


class TestJointState:
    """Test rho^XB"""

    def test_orthogonal_uniform(self):
        e = CqEnsemble(0.5, KET0, KET1)
        assert np.allclose(joint_state(e), np.diag([0.5, 0.0, 0.0, 0.5]))

    def test_product_case(self, rng):
        sigma = random_density(rng, 2)
        e = CqEnsemble(0.3, sigma, sigma)
        assert np.allclose(joint_state(e), np.kron(np.diag([0.3, 0.7]), sigma))

    def test_unit_trace(self, rng):
        for _ in range(10):
            e = cq_view(random_qubit_cell(rng), random_probe(rng))
            assert np.trace(joint_state(e)).real == pytest.approx(1.0)


class TestRateAndReliability:
    """Test I(W) and Z(W)"""

    def test_identical_states_have_zero_rate(self, rng):
        sigma = random_density(rng, 2)
        assert rate(CqEnsemble(0.4, sigma, sigma)) == pytest.approx(0.0, abs=1e-10)

    def test_orthogonal_uniform_rate(self):
        assert rate(CqEnsemble(0.5, KET0, KET1)) == pytest.approx(1.0)

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.77])
    def test_orthogonal_rate_is_binary_entropy(self, p):
        assert rate(CqEnsemble(p, KET0, KET1)) == pytest.approx(binary_entropy(p))

    def test_orthogonal_reliability(self):
        assert reliability(CqEnsemble(0.3, KET0, KET1)) == pytest.approx(0.0, abs=1e-12)

    def test_identical_uniform_reliability(self):
        assert reliability(CqEnsemble(0.5, PLUS, PLUS)) == pytest.approx(1.0)

    def test_identical_skewed_reliability(self):
        assert reliability(CqEnsemble(0.2, PLUS, PLUS)) == pytest.approx(0.8)

    def test_ranges_on_random_cells(self, rng):
        for _ in range(25):
            e = cq_view(random_qubit_cell(rng), random_probe(rng))
            assert -1e-10 <= rate(e) <= binary_entropy(e.prior_p) + 1e-9
            assert 0.0 <= reliability(e) <= 2 * np.sqrt(e.prior_p * (1 - e.prior_p)) + 1e-9

    def test_ensemble_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            CqEnsemble(0.5, KET0, np.eye(3) / 3)
