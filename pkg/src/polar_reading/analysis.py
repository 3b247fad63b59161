"""
Information quantities and bound checks for memory cells and their synthesized channels.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from . import settings
from .cell import (
    CqEnsemble,
    KrausChannel,
    MemoryCell,
    ProbeState,
    rate,
    reliability,
)
from .errors import (
    CapacityExceededError,
    IncompletePrefixCoverageError,
    InvalidParameterError,
    ModelMismatchError,
)
from .polar import (
    SourceKind,
    SourceModel,
    SynthesizedChannelView,
    level_of,
    one_step_transform,
    prefix_marginal,
    synthesize,
    synthesize_all,
)
from .qmat import Operator, binary_entropy, fidelity, matrix_sqrt, von_neumann_entropy

logger = logging.getLogger(__name__)

COVERAGE_TOL = 1e-9
LIFT_MAX_N = 4


# -----------------------------------------------------------------------------
# SYNTHESIZED CHANNELS
# -----------------------------------------------------------------------------


def _check_coverage(views: Sequence[SynthesizedChannelView]) -> None:
    if not views:
        raise IncompletePrefixCoverageError("No synthesized views supplied")
    positions = {(v.block_length, v.index) for v in views}
    if len(positions) != 1:
        raise IncompletePrefixCoverageError(f"Views mix channel positions {sorted(positions)}")
    prefixes = [v.prefix for v in views]
    if len(set(prefixes)) != len(prefixes):
        raise IncompletePrefixCoverageError("Duplicate prefixes among the supplied views")
    covered = sum(v.prefix_probability for v in views)
    if abs(covered - 1.0) > COVERAGE_TOL:
        raise IncompletePrefixCoverageError(
            f"Views cover prefix probability {covered:.12f}; every positive-probability prefix "
            f"must be supplied"
        )


def synthesized_rate(views: Sequence[SynthesizedChannelView]) -> float:
    """
    I(U_i ; U_1^{i-1} B^N) from the views of every positive-probability prefix.

    The prefix register is classical, so the quantity splits into I(U_i ; U_1^{i-1}) plus the
    prefix-averaged Holevo information of the conditional ensembles.
    """
    _check_coverage(views)
    p_zero = sum(v.joint_probabilities[0] for v in views)
    source_part = binary_entropy(p_zero) - sum(
        v.prefix_probability * binary_entropy(v.cond_prior) for v in views
    )
    quantum_part = sum(v.prefix_probability * rate(v.ensemble()) for v in views)
    return source_part + quantum_part


def reliability_from_views(views: Sequence[SynthesizedChannelView]) -> float:
    """Z = 2 sum_prefix sqrt(p(prefix,0) p(prefix,1)) F(cond_state0, cond_state1)."""
    _check_coverage(views)
    total = 0.0
    for v in views:
        p0, p1 = v.joint_probabilities
        total += np.sqrt(p0 * p1) * fidelity(v.cond_state0, v.cond_state1)
    return 2.0 * total


def synthesized_reliability(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    block_length: int,
    i: int,
) -> float:
    return reliability_from_views(list(synthesize_all(cell, probe, model, block_length, i)))


def source_reliability(model: SourceModel, block_length: int, i: int) -> float:
    """Z(U_i | U_1^{i-1}) = 2 sum_prefix sqrt(p(prefix,0) p(prefix,1))."""
    level_of(block_length)
    if not 1 <= i <= block_length:
        raise InvalidParameterError(f"Index i={i} outside 1..{block_length}")
    joint = prefix_marginal(model, block_length, i).reshape(-1, 2)
    return float(2.0 * np.sum(np.sqrt(joint[:, 0] * joint[:, 1])))


# -----------------------------------------------------------------------------
# ONE-STEP SPLIT AND BOUNDS
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class OneStepReport:
    rate: float
    rate_minus: float
    rate_plus: float
    z: float
    z_minus: float
    z_plus: float


def one_step_report(e: CqEnsemble) -> OneStepReport:
    split = one_step_transform(e)
    return OneStepReport(
        rate=rate(e),
        rate_minus=rate(split.minus),
        rate_plus=rate(split.plus),
        z=reliability(e),
        z_minus=reliability(split.minus),
        z_plus=reliability(split.plus),
    )


def conditional_entropy(e: CqEnsemble) -> float:
    """H(X|B) of the joint state rho^XB."""
    p0, p1 = e.priors
    joint = (
        binary_entropy(p0) + p0 * von_neumann_entropy(e.state0) + p1 * von_neumann_entropy(e.state1)
    )
    return joint - von_neumann_entropy(e.average_state())


def holevo_lower_bound(e: CqEnsemble) -> float:
    """I >= -log2 Tr{(p0 sqrt(rho0) + p1 sqrt(rho1))^2}."""
    p0, p1 = e.priors
    m = p0 * matrix_sqrt(e.state0) + p1 * matrix_sqrt(e.state1)
    return float(-np.log2(np.trace(m @ m).real))


def _check_reliability_range(p: float, z: float, slack: float = 1e-9) -> float:
    if not 0.0 < p < 1.0:
        raise InvalidParameterError(f"Prior must lie strictly in (0, 1), got {p}")
    z_max = 2.0 * np.sqrt(p * (1.0 - p))
    if z < -slack or z > z_max + slack:
        raise InvalidParameterError(f"Z={z} outside [0, 2 sqrt(p(1-p))] = [0, {z_max}]")
    return float(np.clip(z, 0.0, z_max))


def roga_upper_bound(p: float, z: float) -> float:
    """H(sigma) for sigma = ((p, Z/2), (Z/2, 1-p)), an upper bound on the rate."""
    z = _check_reliability_range(p, z)
    radius = np.sqrt((2.0 * p - 1.0) ** 2 + z**2)
    return binary_entropy(0.5 * (1.0 + min(radius, 1.0)))


def rate_reliability_bounds(p: float, z: float) -> tuple[float, float]:
    """(h(p) - log2(1 + Z), sqrt(4 p (1-p) - Z^2)); the lower bound may be negative."""
    z = _check_reliability_range(p, z)
    lower = binary_entropy(p) - float(np.log2(1.0 + z))
    upper = float(np.sqrt(max(4.0 * p * (1.0 - p) - z**2, 0.0)))
    return lower, upper


# -----------------------------------------------------------------------------
# SYMMETRIC LIFT
# -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymmetricLift:
    """
    The uniform-input channel u~ -> sum_u p(u) |u~ xor u><u~ xor u| (x) rho_u.

    The classical register Z~ is the first tensor factor of each lifted state.
    """

    base: CqEnsemble
    ensemble: CqEnsemble

    @property
    def lifted_dim(self) -> int:
        return 2 * self.base.dim


def symmetric_lift(e: CqEnsemble) -> SymmetricLift:
    p0, p1 = e.priors
    lifted0 = la.block_diag(p0 * e.state0, p1 * e.state1)
    lifted1 = la.block_diag(p1 * e.state1, p0 * e.state0)
    return SymmetricLift(
        base=e,
        ensemble=CqEnsemble(0.5, lifted0.astype(np.complex128), lifted1.astype(np.complex128)),
    )


def lifted_cell(cell: MemoryCell) -> MemoryCell:
    """The per-copy symmetric lift as a memory cell with uniform prior."""
    registers = np.eye(2, dtype=np.complex128)
    channels = []
    for u_tilde in (0, 1):
        ops = []
        for u, weight in zip((0, 1), cell.priors, strict=True):
            column = registers[:, [u_tilde ^ u]]
            ops.extend(np.sqrt(weight) * np.kron(column, a) for a in cell.channel(u).kraus_ops)
        channels.append(KrausChannel(tuple(ops)))
    return MemoryCell(channels[0], channels[1], 0.5)


@dataclass(frozen=True)
class CorrespondenceReport:
    block_length: int
    index: int
    max_relative_deviation: float
    constant: float
    expected_constant: float
    blocks_checked: int


def _require_induced_law(model: SourceModel) -> None:
    if model.kind is SourceKind.INDUCED_FROM_IID_X or model.prior_p == 0.5:
        return
    raise ModelMismatchError(
        "The symmetric lift reproduces the i.i.d.-X induced source law; use "
        f"{SourceKind.INDUCED_FROM_IID_X.value} or prior 0.5 (got {model.kind.value}, "
        f"p={model.prior_p})"
    )


def _zero_register_indices(copies: int, dim_out: int) -> list[int]:
    """Indices of the lifted product basis whose Z~ registers are all |0>."""
    stride = 2 * dim_out
    return [
        sum(b * stride ** (copies - 1 - j) for j, b in enumerate(bits))
        for bits in itertools.product(range(dim_out), repeat=copies)
    ]


def trace_out_correspondence(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    block_length: int,
    i: int,
) -> CorrespondenceReport:
    """
    Project the lifted synthesized joint state onto Z~^N = |0...0> and compare it with the
    asymmetric synthesized joint state, block by block over (prefix, u_i).

    The proportionality constant is fitted over all blocks; the deviation is the largest
    relative Frobenius distance from the fitted multiple.
    """
    if block_length > LIFT_MAX_N:
        raise CapacityExceededError(
            f"Trace-out correspondence is limited to N<={LIFT_MAX_N} (lift doubles each copy)"
        )
    _require_induced_law(model)
    lift = lifted_cell(cell)
    uniform = SourceModel(SourceKind.IID_U, 0.5)
    keep = _zero_register_indices(block_length, cell.dim_out)
    projected: list[Operator] = []
    asymmetric: list[Operator] = []
    for lifted_view in synthesize_all(lift, probe, uniform, block_length, i):
        view = synthesize(cell, probe, model, block_length, i, lifted_view.prefix)
        lifted_joint = lifted_view.joint_probabilities
        joint = view.joint_probabilities
        for b, state in enumerate((lifted_view.cond_state0, lifted_view.cond_state1)):
            projected.append(lifted_joint[b] * state[np.ix_(keep, keep)])
            asymmetric.append(joint[b] * (view.cond_state1 if b else view.cond_state0))
    numerator = sum(np.vdot(a, p).real for a, p in zip(asymmetric, projected, strict=True))
    denominator = sum(np.vdot(a, a).real for a in asymmetric)
    constant = float(numerator / denominator)
    deviation = max(
        float(np.linalg.norm(p - constant * a) / np.linalg.norm(constant * a))
        for a, p in zip(asymmetric, projected, strict=True)
    )
    logger.info(
        f"Trace-out correspondence N={block_length} i={i}: constant={constant:.6e}, "
        f"max relative deviation={deviation:.3e}"
    )
    return CorrespondenceReport(
        block_length=block_length,
        index=i,
        max_relative_deviation=deviation,
        constant=constant,
        expected_constant=2.0**-block_length,
        blocks_checked=len(asymmetric),
    )


def lifted_reliability(
    cell: MemoryCell, probe: ProbeState | npt.ArrayLike, block_length: int, i: int
) -> float:
    """Z of the i-th synthesized channel of the lifted cell under a uniform source."""
    if block_length > LIFT_MAX_N:
        raise CapacityExceededError(f"Lifted channels are limited to N<={LIFT_MAX_N}")
    uniform = SourceModel(SourceKind.IID_U, 0.5)
    return synthesized_reliability(lifted_cell(cell), probe, uniform, block_length, i)


# -----------------------------------------------------------------------------
# POLARIZATION PROFILE
# -----------------------------------------------------------------------------


def log2_threshold(block_length: int, beta: float) -> float:
    """log2 of 2^{-2^{n beta}}, kept in log space so large n never underflows."""
    if not 0.0 <= beta < 0.5:
        raise InvalidParameterError(f"beta must lie in [0, 1/2), got {beta}")
    return -(2.0 ** (level_of(block_length) * beta))


def _at_most(value: float, log2_delta: float) -> bool:
    if value <= 0.0:
        return True
    return bool(np.log2(value) <= log2_delta)


@dataclass(frozen=True)
class ProfileRow:
    index: int
    rate: float
    z: float
    z_source: float
    is_good: bool
    is_bad: bool


@dataclass(frozen=True)
class PolarizationProfile:
    block_length: int
    beta: float
    log2_delta: float
    rows: tuple[ProfileRow, ...]

    @property
    def delta(self) -> float:
        return 2.0**self.log2_delta

    @property
    def good_count(self) -> int:
        return sum(r.is_good for r in self.rows)

    @property
    def bad_count(self) -> int:
        return sum(r.is_bad for r in self.rows)

    @property
    def z_values(self) -> list[float]:
        return [r.z for r in self.rows]

    @property
    def spread(self) -> float:
        return max(self.z_values) - min(self.z_values)

    def large_z_and_small_source(self) -> int:
        """Size of {Z_i >= 1 - delta} intersected with {Zsrc_i <= delta}."""
        return sum(
            _at_most(1.0 - r.z, self.log2_delta) and _at_most(r.z_source, self.log2_delta)
            for r in self.rows
        )

    def counts(self) -> dict[str, int | float]:
        return {
            "n": level_of(self.block_length),
            "block_length": self.block_length,
            "beta": self.beta,
            "delta": self.delta,
            "good": self.good_count,
            "bad": self.bad_count,
            "unclassified": self.block_length - self.good_count - self.bad_count,
            "large_z_and_small_source": self.large_z_and_small_source(),
        }


def classify(z: float, z_source: float, log2_delta: float) -> tuple[bool, bool]:
    """
    (good, bad) with good: Z <= delta and Zsrc >= 1 - delta; bad: Z >= 1 - delta or
    Zsrc <= delta.
    """
    good = _at_most(z, log2_delta) and _at_most(1.0 - z_source, log2_delta)
    bad = _at_most(1.0 - z, log2_delta) or _at_most(z_source, log2_delta)
    return good, bad


def _profile_row(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    block_length: int,
    i: int,
    log2_delta: float,
) -> ProfileRow:
    views = list(synthesize_all(cell, probe, model, block_length, i))
    i_rate = synthesized_rate(views)
    z = reliability_from_views(views)
    z_source = source_reliability(model, block_length, i)
    good, bad = classify(z, z_source, log2_delta)
    logger.info(
        f"Profile N={block_length} i={i}: I={i_rate:.6f} Z={z:.6f} Zsrc={z_source:.6f} "
        f"good={good} bad={bad}"
    )
    return ProfileRow(i, i_rate, z, z_source, good, bad)


def polarization_profile(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    block_length: int,
    beta: float,
) -> PolarizationProfile:
    """Rate, reliability and source reliability of every synthesized channel W_N^(i)."""
    log2_delta = log2_threshold(block_length, beta)
    settings.require_exact(block_length)
    with ThreadPoolExecutor(max_workers=settings.worker_threads()) as pool:
        rows = tuple(
            pool.map(
                lambda i: _profile_row(cell, probe, model, block_length, i, log2_delta),
                range(1, block_length + 1),
            )
        )
    return PolarizationProfile(block_length, beta, log2_delta, rows)
