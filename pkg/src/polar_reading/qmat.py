"""
Dense complex Hermitian matrix kernel.

Every operator is a square ``numpy`` array of dtype ``complex128``. Functions are pure and never
mutate their inputs. Information quantities are in bits.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from functools import reduce
from math import prod

import numpy as np
import numpy.typing as npt
import scipy.linalg as la
from scipy.special import entr

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    PsdViolationError,
    TraceViolationError,
)

logger = logging.getLogger(__name__)

Operator = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
SUPPORT_CUT = 1e-12


def as_operator(m: npt.ArrayLike) -> Operator:
    """Coerce ``m`` to a square complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {arr.shape}")
    return arr


def check_hermitian(m: npt.ArrayLike, tol: float = HERMITIAN_TOL) -> Operator:
    """
    Return ``m`` as an operator after checking Hermiticity.

    The tolerance is relative to the largest entry magnitude (absolute for entries below 1).
    The error names the worst offending entry pair.
    """
    op = as_operator(m)
    if op.size == 0:
        return op
    diff = np.abs(op - op.conj().T)
    scale = max(1.0, float(np.max(np.abs(op))))
    worst = np.unravel_index(int(np.argmax(diff)), diff.shape)
    if diff[worst] > tol * scale:
        j, k = int(worst[0]), int(worst[1])
        raise NotHermitianError(
            f"Matrix is not Hermitian: entries [{j}][{k}]={op[j, k]!r} and "
            f"[{k}][{j}]={op[k, j]!r} differ by {diff[worst]:.3e} from conjugate symmetry"
        )
    return op


def check_density(
    m: npt.ArrayLike, psd_tol: float = PSD_TOL, trace_tol: float = TRACE_TOL
) -> Operator:
    """Return ``m`` after checking it is a valid density operator (PSD, unit trace)."""
    op = check_hermitian(m)
    trace = float(np.trace(op).real)
    if abs(trace - 1.0) > trace_tol:
        raise TraceViolationError(f"Density operator has trace {trace!r}, expected 1")
    min_eig = float(np.min(np.linalg.eigvalsh(op)))
    if min_eig < -psd_tol:
        raise PsdViolationError(f"Density operator has eigenvalue {min_eig:.3e} < -{psd_tol}")
    return op


def hermitian_eigs(m: npt.ArrayLike) -> tuple[npt.NDArray[np.float64], Operator]:
    """
    Eigendecomposition of a Hermitian operator.

    Returns:
        Eigenvalues in descending order and the matching orthonormal eigenvectors as columns.
    """
    op = check_hermitian(m)
    w, v = np.linalg.eigh(op)
    return w[::-1].copy(), v[:, ::-1].copy()


def _from_spectrum(w: npt.NDArray[np.float64], v: Operator) -> Operator:
    return (v * w) @ v.conj().T


def matrix_sqrt(m: npt.ArrayLike, psd_clip: float = PSD_TOL) -> Operator:
    """Principal square root of a PSD operator; eigenvalues in [-psd_clip, 0) are set to zero."""
    w, v = hermitian_eigs(m)
    if w.size and w[-1] < -psd_clip:
        raise PsdViolationError(
            f"Cannot take square root: eigenvalue {w[-1]:.3e} is below -{psd_clip}"
        )
    return _from_spectrum(np.sqrt(np.clip(w, 0.0, None)), v)


def pinv_sqrt(m: npt.ArrayLike, support_cut: float = SUPPORT_CUT) -> Operator:
    """Inverse square root on the support of ``m``: eigenvalues <= support_cut are dropped."""
    w, v = hermitian_eigs(m)
    inv = np.zeros_like(w)
    on_support = w > support_cut
    inv[on_support] = 1.0 / np.sqrt(w[on_support])
    return _from_spectrum(inv, v)


def fidelity(rho: npt.ArrayLike, sigma: npt.ArrayLike) -> float:
    """
    Root fidelity F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1.

    The trace norm is taken as the sum of singular values, which stays accurate for near-singular
    inputs where sqrt(sqrt(rho) sigma sqrt(rho)) loses precision.
    """
    a = as_operator(rho)
    b = as_operator(sigma)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Fidelity of {a.shape} and {b.shape} operators")
    return float(np.sum(la.svdvals(matrix_sqrt(a) @ matrix_sqrt(b))))


def shannon_entropy(probs: npt.ArrayLike) -> float:
    """Entropy in bits of a probability vector (0 log 0 := 0)."""
    p = np.clip(np.asarray(probs, dtype=np.float64), 0.0, None)
    return float(np.sum(entr(p)) / np.log(2.0))


def binary_entropy(p: float) -> float:
    return shannon_entropy([p, 1.0 - p])


def von_neumann_entropy(rho: npt.ArrayLike) -> float:
    """Von Neumann entropy in bits."""
    op = check_density(rho)
    return shannon_entropy(np.linalg.eigvalsh(op))


def tensor(a: npt.ArrayLike, b: npt.ArrayLike) -> Operator:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def tensor_all(ops: Sequence[npt.ArrayLike]) -> Operator:
    if not ops:
        return np.ones((1, 1), dtype=np.complex128)
    return reduce(tensor, ops)


def partial_trace(op: npt.ArrayLike, dims: Sequence[int], keep: Sequence[int]) -> Operator:
    """Trace out every subsystem not listed in ``keep`` (subsystem order is preserved)."""
    arr = as_operator(op)
    if prod(dims) != arr.shape[0]:
        raise DimensionMismatchError(f"Subsystem dims {list(dims)} do not match {arr.shape}")
    n = len(dims)
    t = arr.reshape(tuple(dims) * 2)
    for k in sorted(set(range(len(dims))) - set(keep), reverse=True):
        t = np.trace(t, axis1=k, axis2=k + n)
        n -= 1
    kept = prod(dims[k] for k in sorted(keep))
    return t.reshape(kept, kept)


def trace_distance(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    x = as_operator(a)
    y = as_operator(b)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"Trace distance of {x.shape} and {y.shape} operators")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(x - y))))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> Operator:
    """Random density operator from the Ginibre ensemble (full rank unless ``rank`` is given)."""
    r = dim if rank is None else rank
    g = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
