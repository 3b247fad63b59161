"""Tests for the dense Hermitian matrix kernel"""

import numpy as np
import pytest

from polar_reading.errors import (
    DimensionMismatchError,
    NotHermitianError,
    PsdViolationError,
    TraceViolationError,
)
from polar_reading.qmat import (
    binary_entropy,
    check_density,
    check_hermitian,
    fidelity,
    hermitian_eigs,
    matrix_sqrt,
    partial_trace,
    pinv_sqrt,
    random_density,
    tensor,
    tensor_all,
    trace_distance,
    von_neumann_entropy,
)
from tests.fixtures.reference_values import H_QUARTER

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


class TestValidation:
    """Test Hermitian and density checks"""

    def test_accepts_hermitian_matrix(self):
        m = np.array([[1.0, 2 - 1j], [2 + 1j, 3.0]])
        assert np.array_equal(check_hermitian(m), m.astype(complex))

    def test_error_names_offending_entries(self):
        m = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(NotHermitianError, match=r"\[\d\]\[\d\]"):
            check_hermitian(m)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            check_hermitian(np.zeros((2, 3)))

    def test_rejects_wrong_trace(self):
        with pytest.raises(TraceViolationError):
            check_density(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(PsdViolationError):
            check_density(np.diag([1.5, -0.5]))

    def test_pinned_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            check_density(np.diag([1.5, -0.5]))


class TestSpectra:
    """Test eigendecomposition, square roots and pseudo-inverse square roots"""

    def test_identity_eigenvalues(self):
        w, _ = hermitian_eigs(np.eye(2))
        assert np.allclose(w, [1.0, 1.0])

    def test_eigenvalues_are_descending(self):
        w, _ = hermitian_eigs(np.diag([0.25, 0.75]))
        assert np.allclose(w, [0.75, 0.25])

    def test_pauli_x_spectrum(self):
        w, v = hermitian_eigs(PAULI_X)
        assert np.allclose(w, [1.0, -1.0])
        assert np.allclose(v.conj().T @ v, np.eye(2))

    def test_sqrt_of_diagonal(self):
        assert np.allclose(matrix_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_sqrt_of_projector_is_itself(self):
        plus = 0.5 * np.ones((2, 2), dtype=complex)
        assert np.allclose(matrix_sqrt(plus), plus)

    @pytest.mark.parametrize("dim, rank", [(2, 2), (3, 3), (4, 2), (8, 8)])
    def test_sqrt_squares_back(self, rng, dim, rank):
        for _ in range(10):
            m = 3.0 * random_density(rng, dim, rank)
            root = matrix_sqrt(m)
            assert np.linalg.norm(root @ root - m) <= 1e-9

    def test_sqrt_rejects_negative_operator(self):
        with pytest.raises(PsdViolationError):
            matrix_sqrt(np.diag([1.0, -0.1]))

    def test_pinv_sqrt_on_support(self):
        assert np.allclose(pinv_sqrt(np.diag([4.0, 0.0])), np.diag([0.5, 0.0]))

    def test_pinv_sqrt_drops_below_cut(self):
        assert np.allclose(pinv_sqrt(np.diag([9.0, 1e-20]), 1e-12), np.diag([1 / 3, 0.0]))

    def test_pinv_sqrt_of_identity(self):
        assert np.allclose(pinv_sqrt(np.eye(3)), np.eye(3))


class TestFidelity:
    """Test the root fidelity"""

    def test_identical_states(self, rng):
        rho = random_density(rng, 3)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_pure_states(self):
        assert fidelity(KET0, KET1) == pytest.approx(0.0, abs=1e-12)

    def test_commuting_case(self):
        assert fidelity(KET0, np.eye(2) / 2) == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_symmetric(self, rng):
        a, b = random_density(rng, 4), random_density(rng, 4)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)

    def test_multiplicative_under_tensor(self, rng):
        for _ in range(20):
            a1, b1 = random_density(rng, 2), random_density(rng, 2)
            a2, b2 = random_density(rng, 3), random_density(rng, 3)
            joint = fidelity(tensor(a1, a2), tensor(b1, b2))
            assert joint == pytest.approx(fidelity(a1, b1) * fidelity(a2, b2), abs=1e-9)

    def test_block_diagonal_decomposition(self, rng):
        for _ in range(20):
            p, q = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
            sigmas = [random_density(rng, 2) for _ in range(3)]
            taus = [random_density(rng, 2) for _ in range(3)]
            flags = [np.diag(np.eye(3)[x]) for x in range(3)]
            left = sum(p[x] * tensor(flags[x], sigmas[x]) for x in range(3))
            right = sum(q[x] * tensor(flags[x], taus[x]) for x in range(3))
            expected = sum(np.sqrt(p[x] * q[x]) * fidelity(sigmas[x], taus[x]) for x in range(3))
            assert fidelity(left, right) == pytest.approx(expected, abs=1e-9)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fidelity(np.eye(2) / 2, np.eye(3) / 3)


class TestEntropy:
    """Test von Neumann and binary entropy"""

    def test_pure_state(self):
        assert von_neumann_entropy(KET1) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed_qubit(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)

    def test_diagonal_state(self):
        assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(H_QUARTER)

    def test_additive_under_tensor(self, rng):
        for dims in [(2, 2), (2, 3), (4, 2)]:
            a, b = random_density(rng, dims[0]), random_density(rng, dims[1])
            total = von_neumann_entropy(tensor(a, b))
            assert total == pytest.approx(von_neumann_entropy(a) + von_neumann_entropy(b), abs=1e-9)

    def test_binary_entropy_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == pytest.approx(1.0)


class TestTensor:
    """Test tensor products and partial traces"""

    def test_identity_product(self):
        assert np.allclose(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_product_of_projectors(self):
        assert np.allclose(tensor(KET0, KET1), np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_trace_is_multiplicative(self, rng):
        a, b = random_density(rng, 2), random_density(rng, 3)
        assert np.trace(tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b))

    def test_empty_product_is_scalar_one(self):
        assert tensor_all([]).shape == (1, 1)

    def test_partial_trace_recovers_factors(self, rng):
        a, b, c = random_density(rng, 2), random_density(rng, 3), random_density(rng, 2)
        joint = tensor_all([a, b, c])
        assert np.allclose(partial_trace(joint, [2, 3, 2], keep=[1]), b)
        assert np.allclose(partial_trace(joint, [2, 3, 2], keep=[0, 2]), tensor(a, c))

    def test_partial_trace_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace(np.eye(4), [2, 3], keep=[0])


class TestTraceDistance:
    """Test the trace distance"""

    def test_orthogonal_states(self):
        assert trace_distance(KET0, KET1) == pytest.approx(1.0)

    def test_identical_states(self, rng):
        rho = random_density(rng, 3)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)


class TestRandomDensity:
    """Test the Ginibre sampler"""

    def test_valid_density(self, rng):
        for dim in range(2, 6):
            check_density(random_density(rng, dim))

    def test_rank_is_respected(self, rng):
        rho = random_density(rng, 4, rank=1)
        w, _ = hermitian_eigs(rho)
        assert w[0] == pytest.approx(1.0)
        assert np.allclose(w[1:], 0.0, atol=1e-12)
