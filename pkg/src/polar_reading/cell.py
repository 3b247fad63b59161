"""
Quantum memory cells, probe states and the classical-quantum view of a cell.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from .errors import DimensionMismatchError, InvalidParameterError
from .qmat import (
    Operator,
    check_density,
    fidelity,
    random_density,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

BLOCH_TOL = 1e-12
TP_TOL = 1e-10


@dataclass(frozen=True)
class ProbeState:
    """A qubit probe given by its Bloch vector; |0> is (0, 0, 1) and |1> is (0, 0, -1)."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        vec = tuple(float(c) for c in self.bloch)
        if len(vec) != 3 or not all(np.isfinite(vec)):
            raise InvalidParameterError(f"Bloch vector must be 3 finite reals, got {self.bloch!r}")
        if float(np.dot(vec, vec)) > 1.0 + BLOCH_TOL:
            raise InvalidParameterError(f"Bloch vector {vec} lies outside the unit ball")
        object.__setattr__(self, "bloch", vec)

    @classmethod
    def ket0(cls) -> ProbeState:
        return cls((0.0, 0.0, 1.0))

    @classmethod
    def ket1(cls) -> ProbeState:
        return cls((0.0, 0.0, -1.0))

    @classmethod
    def maximally_mixed(cls) -> ProbeState:
        return cls((0.0, 0.0, 0.0))

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.bloch))

    def density(self) -> Operator:
        rx, ry, rz = self.bloch
        return 0.5 * (np.eye(2, dtype=np.complex128) + rx * PAULI_X + ry * PAULI_Y + rz * PAULI_Z)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map in Kraus form; operators may be rectangular (dim_out x dim_in)."""

    kraus_ops: tuple[Operator, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(a, dtype=np.complex128) for a in self.kraus_ops)
        if not ops:
            raise InvalidParameterError("A Kraus channel needs at least one operator")
        shape = ops[0].shape
        if any(a.ndim != 2 or a.shape != shape for a in ops):
            raise DimensionMismatchError("All Kraus operators must share one 2-D shape")
        completeness = sum(a.conj().T @ a for a in ops)
        deviation = float(np.max(np.abs(completeness - np.eye(shape[1]))))
        if deviation > TP_TOL:
            raise InvalidParameterError(
                f"Kraus operators are not trace preserving: |sum A^dag A - I| = {deviation:.3e}"
            )
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_ops[0].shape[0]


@dataclass(frozen=True, eq=False)
class MemoryCell:
    """A binary-labelled pair of channels with label prior ``prior_p`` = P(X=0)."""

    channel0: KrausChannel
    channel1: KrausChannel
    prior_p: float

    def __post_init__(self):
        if not 0.0 < self.prior_p < 1.0:
            raise InvalidParameterError(f"prior_p must lie strictly in (0, 1), got {self.prior_p}")
        c0, c1 = self.channel0, self.channel1
        if (c0.dim_in, c0.dim_out) != (c1.dim_in, c1.dim_out):
            raise DimensionMismatchError(
                f"Cell channels differ in shape: {(c0.dim_out, c0.dim_in)} vs "
                f"{(c1.dim_out, c1.dim_in)}"
            )
        object.__setattr__(self, "prior_p", float(self.prior_p))

    def channel(self, x: int) -> KrausChannel:
        return self.channel1 if x else self.channel0

    @property
    def dim_in(self) -> int:
        return self.channel0.dim_in

    @property
    def dim_out(self) -> int:
        return self.channel0.dim_out

    @property
    def priors(self) -> tuple[float, float]:
        return self.prior_p, 1.0 - self.prior_p


@dataclass(frozen=True, eq=False)
class CqEnsemble:
    """A prior p = P(X=0) with the two output states of a classical-quantum channel."""

    prior_p: float
    state0: Operator
    state1: Operator

    def __post_init__(self):
        if not 0.0 < self.prior_p < 1.0:
            raise InvalidParameterError(f"prior_p must lie strictly in (0, 1), got {self.prior_p}")
        s0 = check_density(self.state0)
        s1 = check_density(self.state1)
        if s0.shape != s1.shape:
            raise DimensionMismatchError(
                f"Ensemble states differ in shape: {s0.shape} vs {s1.shape}"
            )
        object.__setattr__(self, "prior_p", float(self.prior_p))
        object.__setattr__(self, "state0", s0)
        object.__setattr__(self, "state1", s1)

    @property
    def dim(self) -> int:
        return self.state0.shape[0]

    @property
    def priors(self) -> tuple[float, float]:
        return self.prior_p, 1.0 - self.prior_p

    @property
    def states(self) -> tuple[Operator, Operator]:
        return self.state0, self.state1

    def average_state(self) -> Operator:
        return self.prior_p * self.state0 + (1.0 - self.prior_p) * self.state1


def amplitude_damping(gamma: float) -> KrausChannel:
    """Qubit amplitude damping: A0 = diag(1, sqrt(1-gamma)), A1 = sqrt(gamma) |0><1|."""
    if not 0.0 <= gamma <= 1.0:
        raise InvalidParameterError(f"Damping parameter must be in [0, 1], got {gamma}")
    a0 = np.diag([1.0, np.sqrt(1.0 - gamma)]).astype(np.complex128)
    a1 = np.zeros((2, 2), dtype=np.complex128)
    a1[0, 1] = np.sqrt(gamma)
    return KrausChannel((a0, a1))


def ad_cell(gamma0: float, gamma1: float, prior_p: float) -> MemoryCell:
    """Memory cell whose label x selects amplitude damping with parameter gamma_x."""
    return MemoryCell(amplitude_damping(gamma0), amplitude_damping(gamma1), prior_p)


def kraus_cell(
    ops0: Sequence[npt.ArrayLike], ops1: Sequence[npt.ArrayLike], prior_p: float
) -> MemoryCell:
    return MemoryCell(KrausChannel(tuple(ops0)), KrausChannel(tuple(ops1)), prior_p)


def probe_density(probe: ProbeState | npt.ArrayLike) -> Operator:
    """Density operator of a probe given either as a Bloch vector or as a matrix."""
    if isinstance(probe, ProbeState):
        return probe.density()
    return check_density(probe)


def apply_channel(ch: KrausChannel, rho: ProbeState | npt.ArrayLike) -> Operator:
    state = probe_density(rho)
    if state.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatchError(
            f"Channel expects a {ch.dim_in}-dimensional input, got shape {state.shape}"
        )
    return sum(a @ state @ a.conj().T for a in ch.kraus_ops)


def cq_view(cell: MemoryCell, probe: ProbeState | npt.ArrayLike) -> CqEnsemble:
    """The cell seen as a classical-quantum channel for a fixed probe."""
    rho = probe_density(probe)
    return CqEnsemble(
        cell.prior_p, apply_channel(cell.channel0, rho), apply_channel(cell.channel1, rho)
    )


def joint_state(e: CqEnsemble) -> Operator:
    """rho^XB = p |0><0| (x) rho0 + (1-p) |1><1| (x) rho1, basis ordered (x, b)."""
    p0, p1 = e.priors
    return la.block_diag(p0 * e.state0, p1 * e.state1).astype(np.complex128)


def rate(e: CqEnsemble) -> float:
    """Holevo information I(X;B) in bits."""
    p0, p1 = e.priors
    return (
        von_neumann_entropy(e.average_state())
        - p0 * von_neumann_entropy(e.state0)
        - p1 * von_neumann_entropy(e.state1)
    )


def reliability(e: CqEnsemble) -> float:
    """Z = 2 sqrt(p(1-p)) F(rho0, rho1)."""
    p0, p1 = e.priors
    return 2.0 * np.sqrt(p0 * p1) * fidelity(e.state0, e.state1)


# -----------------------------------------------------------------------------
# RANDOM INSTANCES
# -----------------------------------------------------------------------------


def random_kraus_channel(
    rng: np.random.Generator, dim_in: int = 2, dim_out: int | None = None, n_ops: int = 2
) -> KrausChannel:
    """Random CPTP map from a random isometry dim_in -> dim_out * n_ops (Stinespring form)."""
    d_out = dim_in if dim_out is None else dim_out
    g = rng.normal(size=(d_out * n_ops, dim_in)) + 1j * rng.normal(size=(d_out * n_ops, dim_in))
    isometry, _ = np.linalg.qr(g)
    return KrausChannel(tuple(isometry[k * d_out : (k + 1) * d_out, :] for k in range(n_ops)))


def random_prior(rng: np.random.Generator) -> float:
    return float(rng.uniform(0.05, 0.95))


def random_qubit_cell(rng: np.random.Generator, prior_p: float | None = None) -> MemoryCell:
    p = random_prior(rng) if prior_p is None else prior_p
    return MemoryCell(random_kraus_channel(rng), random_kraus_channel(rng), p)


def random_ad_cell(rng: np.random.Generator, prior_p: float | None = None) -> MemoryCell:
    p = random_prior(rng) if prior_p is None else prior_p
    gamma0, gamma1 = rng.uniform(0.0, 1.0, size=2)
    return ad_cell(float(gamma0), float(gamma1), p)


def random_probe(rng: np.random.Generator) -> ProbeState:
    """Probe drawn uniformly from the Bloch ball."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    radius = rng.uniform() ** (1.0 / 3.0)
    return ProbeState(tuple(float(c) for c in radius * direction))


def random_ensemble(
    rng: np.random.Generator, dim: int = 2, prior_p: float | None = None, rank: int | None = None
) -> CqEnsemble:
    p = random_prior(rng) if prior_p is None else prior_p
    return CqEnsemble(p, random_density(rng, dim, rank), random_density(rng, dim, rank))

