"""
Polar transform, channel combining and exact synthesized channels.

Bit vectors are ordered u_1..u_N. Source tables are indexed by the integer whose most
significant bit is u_1, so the rows sharing a prefix u_1^i form one contiguous block.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import StrEnum
from functools import cache, reduce

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from . import settings
from .cell import CqEnsemble, MemoryCell, ProbeState, apply_channel, probe_density
from .errors import (
    CapacityExceededError,
    DimensionMismatchError,
    IncompletePrefixCoverageError,
    InvalidParameterError,
    ZeroProbabilityPrefixError,
)
from .qmat import Operator, tensor_all

logger = logging.getLogger(__name__)

Bits = npt.NDArray[np.uint8]

KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)


# -----------------------------------------------------------------------------
# TRANSFORM
# -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PolarTransform:
    """G_N = R_N F^(x)n over GF(2), with R_N the bit-reversal permutation."""

    n: int
    matrix: Bits

    @property
    def size(self) -> int:
        return 1 << self.n

    def rows(self) -> list[str]:
        return ["".join(str(int(b)) for b in row) for row in self.matrix]


def bit_reverse(j: int, n: int) -> int:
    out = 0
    for _ in range(n):
        out = (out << 1) | (j & 1)
        j >>= 1
    return out


def level_of(block_length: int) -> int:
    """n such that 2^n == block_length."""
    if block_length < 1 or block_length & (block_length - 1):
        raise InvalidParameterError(f"Block length must be a power of two, got {block_length}")
    return block_length.bit_length() - 1


@cache
def polar_transform(n: int) -> PolarTransform:
    if n < 0:
        raise InvalidParameterError(f"Transform level must be >= 0, got {n}")
    cap = settings.max_transform_level()
    if n > cap:
        raise CapacityExceededError(
            f"Transform level n={n} exceeds the cap n<={cap}; raise "
            f"{settings.MAX_TRANSFORM_LEVEL_ENV} to allow it"
        )
    kron_power = reduce(np.kron, [KERNEL] * n, np.ones((1, 1), dtype=np.uint8)).astype(np.uint8)
    order = [bit_reverse(j, n) for j in range(1 << n)]
    matrix = kron_power[order, :]
    matrix.setflags(write=False)
    return PolarTransform(n, matrix)


def encode_bits(u: npt.ArrayLike, t: PolarTransform) -> Bits:
    """x = u G_N mod 2."""
    bits = np.asarray(u, dtype=np.int64)
    if bits.shape != (t.size,):
        raise DimensionMismatchError(f"Expected {t.size} bits, got shape {bits.shape}")
    return ((bits @ t.matrix) % 2).astype(np.uint8)


def bits_to_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def index_to_bits(k: int, length: int) -> tuple[int, ...]:
    return tuple((k >> (length - 1 - j)) & 1 for j in range(length))


@cache
def all_bit_vectors(block_length: int) -> Bits:
    """Every u in {0,1}^N as rows, in table-index order."""
    shifts = np.arange(block_length - 1, -1, -1)
    table = ((np.arange(1 << block_length)[:, None] >> shifts) & 1).astype(np.uint8)
    table.setflags(write=False)
    return table


@cache
def all_codewords(block_length: int) -> Bits:
    """x = u G_N for every u, in table-index order."""
    t = polar_transform(level_of(block_length))
    words = ((all_bit_vectors(block_length).astype(np.int64) @ t.matrix) % 2).astype(np.uint8)
    words.setflags(write=False)
    return words


# -----------------------------------------------------------------------------
# SOURCE MODELS
# -----------------------------------------------------------------------------


class SourceKind(StrEnum):
    IID_U = "iid_u"
    INDUCED_FROM_IID_X = "induced_from_iid_x"


@dataclass(frozen=True)
class SourceModel:
    """
    Law of U^N.

    IID_U draws every U_j independently with P(U_j=0) = prior_p. INDUCED_FROM_IID_X draws
    X^N i.i.d. with P(X_j=0) = prior_p and sets U^N = X^N G_N (G_N is an involution).
    """

    kind: SourceKind
    prior_p: float

    def __post_init__(self):
        if not 0.0 < self.prior_p < 1.0:
            raise InvalidParameterError(f"prior_p must lie strictly in (0, 1), got {self.prior_p}")
        object.__setattr__(self, "kind", SourceKind(self.kind))
        object.__setattr__(self, "prior_p", float(self.prior_p))

    def probability(self, u: Sequence[int]) -> float:
        table = source_table(self, len(u))
        return float(table[bits_to_index(u)])


def source_distribution(model: SourceModel, n: int) -> npt.NDArray[np.float64]:
    """Probability of every u^N (N = 2^n) in table-index order."""
    return source_table(model, 1 << n)


@cache
def source_table(model: SourceModel, block_length: int) -> npt.NDArray[np.float64]:
    level_of(block_length)
    settings.require_table(block_length)
    p = model.prior_p
    if model.kind is SourceKind.IID_U:
        letters = all_bit_vectors(block_length)
    else:
        letters = all_codewords(block_length)
    table = np.prod(np.where(letters == 0, p, 1.0 - p), axis=1)
    table.setflags(write=False)
    return table


def prefix_marginal(model: SourceModel, block_length: int, length: int) -> npt.NDArray[np.float64]:
    """P(U_1^length = prefix) for every prefix, indexed with u_1 as the most significant bit."""
    table = source_table(model, block_length)
    return table.reshape(1 << length, 1 << (block_length - length)).sum(axis=1)


def conditional_one(model: SourceModel, block_length: int, prefix: Sequence[int]) -> float | None:
    """P(U_i = 1 | U_1^{i-1} = prefix), or None when the prefix has probability zero."""
    i = len(prefix) + 1
    joint = prefix_marginal(model, block_length, i)
    k = bits_to_index(prefix)
    total = joint[2 * k] + joint[2 * k + 1]
    if total <= 0.0:
        return None
    return float(joint[2 * k + 1] / total)


# -----------------------------------------------------------------------------
# SYNTHESIZED CHANNELS
# -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SynthesizedChannelView:
    """
    W_N^(i) seen from one decoded prefix u_1^{i-1}.

    ``cond_state_b`` is the normalized average output given (prefix, U_i=b); ``cond_prior`` is
    P(U_i=0 | prefix) and ``prefix_probability`` is P(U_1^{i-1}=prefix).
    """

    block_length: int
    index: int
    prefix: tuple[int, ...]
    cond_state0: Operator
    cond_state1: Operator
    cond_prior: float
    prefix_probability: float

    @property
    def joint_probabilities(self) -> tuple[float, float]:
        return (
            self.prefix_probability * self.cond_prior,
            self.prefix_probability * (1.0 - self.cond_prior),
        )

    def ensemble(self) -> CqEnsemble:
        return CqEnsemble(self.cond_prior, self.cond_state0, self.cond_state1)


def label_outputs(cell: MemoryCell, probe: ProbeState | npt.ArrayLike) -> tuple[Operator, Operator]:
    rho = probe_density(probe)
    return apply_channel(cell.channel0, rho), apply_channel(cell.channel1, rho)


def channel_output(
    cell: MemoryCell, probe: ProbeState | npt.ArrayLike, x: Sequence[int]
) -> Operator:
    """The product state (x)_j W^{x_j}(rho)."""
    outputs = label_outputs(cell, probe)
    return tensor_all([outputs[int(b)] for b in x])


def _check_position(block_length: int, i: int, prefix: Sequence[int] | None = None) -> None:
    level_of(block_length)
    if not 1 <= i <= block_length:
        raise InvalidParameterError(f"Index i={i} outside 1..{block_length}")
    if prefix is not None and len(prefix) != i - 1:
        raise DimensionMismatchError(f"Prefix for i={i} must have {i - 1} bits, got {len(prefix)}")


def _conditional_sum(
    outputs: tuple[Operator, Operator],
    table: npt.NDArray[np.float64],
    codewords: Bits,
    first: int,
    count: int,
) -> tuple[Operator | None, float]:
    """Weighted sum of product outputs over table rows first..first+count-1, in index order."""
    acc: Operator | None = None
    weight = 0.0
    for k in range(first, first + count):
        w = float(table[k])
        if w == 0.0:
            continue
        term = w * tensor_all([outputs[b] for b in codewords[k]])
        acc = term if acc is None else acc + term
        weight += w
    return acc, weight


def synthesize(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    block_length: int,
    i: int,
    prefix: Sequence[int],
) -> SynthesizedChannelView:
    """Exact conditional outputs of W_N^(i) by brute-force enumeration of the 2^{N-i} suffixes."""
    _check_position(block_length, i, prefix)
    settings.require_exact(block_length)
    return _synthesize(
        label_outputs(cell, probe), model, block_length, i, tuple(int(b) for b in prefix)
    )


def _synthesize(
    outputs: tuple[Operator, Operator],
    model: SourceModel,
    block_length: int,
    i: int,
    prefix: tuple[int, ...],
) -> SynthesizedChannelView:
    table = source_table(model, block_length)
    codewords = all_codewords(block_length)
    suffixes = 1 << (block_length - i)
    base = bits_to_index(prefix) << 1
    states = []
    weights = []
    for b in (0, 1):
        acc, weight = _conditional_sum(outputs, table, codewords, (base | b) * suffixes, suffixes)
        states.append(acc)
        weights.append(weight)
    total = weights[0] + weights[1]
    if total <= 0.0:
        raise ZeroProbabilityPrefixError(f"Prefix {prefix} has probability zero under {model}")
    if states[0] is None or states[1] is None:
        raise ZeroProbabilityPrefixError(
            f"Bit {i} is deterministic after prefix {prefix}; conditional output undefined"
        )
    normalized = [0.5 * (s + s.conj().T) / w for s, w in zip(states, weights, strict=True)]
    return SynthesizedChannelView(
        block_length=block_length,
        index=i,
        prefix=prefix,
        cond_state0=normalized[0],
        cond_state1=normalized[1],
        cond_prior=weights[0] / total,
        prefix_probability=total,
    )


def synthesize_all(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    block_length: int,
    i: int,
) -> Iterator[SynthesizedChannelView]:
    """Views for every positive-probability prefix u_1^{i-1}, in lexicographic order."""
    _check_position(block_length, i)
    settings.require_exact(block_length)
    outputs = label_outputs(cell, probe)
    marginal = prefix_marginal(model, block_length, i - 1)
    for k in range(1 << (i - 1)):
        if marginal[k] <= 0.0:
            continue
        yield _synthesize(outputs, model, block_length, i, index_to_bits(k, i - 1))


def full_ensemble(views: Sequence[SynthesizedChannelView]) -> CqEnsemble:
    """
    The cq channel u_i -> sum_prefix p(prefix | u_i) |prefix><prefix| (x) cond_state_{u_i}.

    The prefix register holds one block per supplied view, in the order given.
    """
    if not views:
        raise IncompletePrefixCoverageError("No synthesized views supplied")
    joint = np.array([v.joint_probabilities for v in views])
    marginal = joint.sum(axis=0)
    blocks0 = [w / marginal[0] * v.cond_state0 for w, v in zip(joint[:, 0], views, strict=True)]
    blocks1 = [w / marginal[1] * v.cond_state1 for w, v in zip(joint[:, 1], views, strict=True)]
    return CqEnsemble(
        float(marginal[0] / marginal.sum()),
        la.block_diag(*blocks0).astype(np.complex128),
        la.block_diag(*blocks1).astype(np.complex128),
    )


@dataclass(frozen=True, eq=False)
class OneStepSplit:
    """
    (W^-, W^+) for one combining step with U1, U2 i.i.d. with P(U=0) = p.

    ``minus`` outputs on B1 B2; ``plus`` outputs on U1 B1 B2 with U1 held in a classical register
    (block u1 of the block-diagonal state).
    """

    minus: CqEnsemble
    plus: CqEnsemble


def one_step_transform(e: CqEnsemble) -> OneStepSplit:
    p_u = e.priors
    rho = e.states
    minus = [
        sum(p_u[u2] * np.kron(rho[u1 ^ u2], rho[u2]) for u2 in (0, 1)) for u1 in (0, 1)
    ]
    plus = [
        la.block_diag(*(p_u[u1] * np.kron(rho[u1 ^ u2], rho[u2]) for u1 in (0, 1)))
        for u2 in (0, 1)
    ]
    return OneStepSplit(
        minus=CqEnsemble(e.prior_p, minus[0], minus[1]),
        plus=CqEnsemble(e.prior_p, plus[0].astype(np.complex128), plus[1].astype(np.complex128)),
    )
