"""
Pretty-good measurements, the quantum successive-cancellation decoder and error estimates.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import numpy.typing as npt
from scipy.stats import binomtest

from . import settings
from .analysis import PolarizationProfile
from .cell import MemoryCell, ProbeState
from .coding import CodeConstruction, FrozenMaps, encode_message
from .errors import (
    DecoderAbortError,
    DimensionMismatchError,
    InvalidParameterError,
    TraceViolationError,
    ZeroProbabilityPrefixError,
)
from .polar import (
    SourceKind,
    SourceModel,
    encode_bits,
    label_outputs,
    polar_transform,
    synthesize,
)
from .qmat import (
    SUPPORT_CUT,
    Operator,
    as_operator,
    fidelity,
    hermitian_eigs,
    matrix_sqrt,
    pinv_sqrt,
    tensor_all,
)

logger = logging.getLogger(__name__)

POVM_PSD_TOL = 1e-10
POVM_SUM_TOL = 1e-9
PRIOR_SUM_TOL = 1e-9
OUTCOME_SUM_TOL = 1e-9


# -----------------------------------------------------------------------------
# MEASUREMENTS
# -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[Operator, ...]

    def __post_init__(self):
        elements = tuple(as_operator(e) for e in self.elements)
        dim = elements[0].shape[0]
        for k, e in enumerate(elements):
            low = float(hermitian_eigs(e)[0][-1])
            if low < -POVM_PSD_TOL:
                raise InvalidParameterError(f"POVM element {k} has eigenvalue {low:.3e}")
        gap = float(np.max(np.abs(sum(elements) - np.eye(dim))))
        if gap > POVM_SUM_TOL:
            raise InvalidParameterError(f"POVM elements sum to identity only within {gap:.3e}")
        object.__setattr__(self, "elements", elements)

    def probabilities(self, rho: Operator) -> npt.NDArray[np.float64]:
        return np.array([np.trace(e @ rho).real for e in self.elements])


def _check_ensemble(priors: Sequence[float], states: Sequence[npt.ArrayLike]) -> list[Operator]:
    if len(priors) != len(states) or not states:
        raise DimensionMismatchError(f"{len(priors)} priors for {len(states)} states")
    if abs(sum(priors) - 1.0) > PRIOR_SUM_TOL or min(priors) < 0.0:
        raise InvalidParameterError(f"Priors {list(priors)} are not a probability vector")
    ops = [as_operator(s) for s in states]
    if len({s.shape for s in ops}) != 1:
        raise DimensionMismatchError("Ensemble states differ in dimension")
    return ops


def square_root_measurement(
    priors: Sequence[float], states: Sequence[npt.ArrayLike], support_cut: float = SUPPORT_CUT
) -> Povm:
    """
    Lambda_u = S^{-1/2} p_u rho_u S^{-1/2} with S = sum_u p_u rho_u.

    ``support_cut`` is relative to the largest eigenvalue of S. The identity on the complement of
    supp(S) goes to the element with the largest prior.
    """
    ops = _check_ensemble(priors, states)
    average = sum(p * s for p, s in zip(priors, ops, strict=True))
    largest = float(hermitian_eigs(average)[0][0])
    inv_sqrt = pinv_sqrt(average, support_cut * largest)
    elements = [inv_sqrt @ (p * s) @ inv_sqrt for p, s in zip(priors, ops, strict=True)]
    elements = [0.5 * (e + e.conj().T) for e in elements]
    residue = np.eye(average.shape[0]) - sum(elements)
    elements[int(np.argmax(priors))] += residue
    return Povm(tuple(elements))


def error_probability(
    priors: Sequence[float], states: Sequence[npt.ArrayLike], povm: Povm
) -> float:
    ops = _check_ensemble(priors, states)
    success = sum(
        p * np.trace(e @ s).real for p, e, s in zip(priors, povm.elements, ops, strict=True)
    )
    return float(1.0 - success)


def barnum_knill_bound(priors: Sequence[float], states: Sequence[npt.ArrayLike]) -> float:
    """sum_{u != v} sqrt(p_u p_v) F(rho_u, rho_v)."""
    ops = _check_ensemble(priors, states)
    total = 0.0
    for u in range(len(ops)):
        for v in range(u + 1, len(ops)):
            total += 2.0 * np.sqrt(priors[u] * priors[v]) * fidelity(ops[u], ops[v])
    return float(total)


# -----------------------------------------------------------------------------
# SUCCESSIVE CANCELLATION
# -----------------------------------------------------------------------------


class StepKind(StrEnum):
    INFO = "info"
    FROZEN = "frozen"


@dataclass(frozen=True)
class DecodeStep:
    index: int
    kind: StepKind
    probabilities: tuple[float, float]
    outcome: int
    prior_fallback: bool = False


@dataclass(frozen=True)
class DecodeTrace:
    true_u: tuple[int, ...]
    decoded: tuple[int, ...]
    steps: tuple[DecodeStep, ...]
    path_probability: float

    @property
    def success(self) -> bool:
        return self.decoded == self.true_u

    @property
    def first_error_index(self) -> int | None:
        for j, (a, b) in enumerate(zip(self.true_u, self.decoded, strict=True), start=1):
            if a != b:
                return j
        return None


@dataclass(frozen=True, eq=False)
class _Measurement:
    povm: Povm
    sqrt_elements: tuple[Operator, Operator]
    prior_fallback: bool


class SuccessiveCancellationDecoder:
    """
    Quantum SC decoder that tracks the post-measurement state on B^N.

    Frozen indices replay lambda_j on the decoded prefix without touching the state. Information
    indices measure the binary square-root measurement built from the conditional synthesized
    states given the decoded prefix, then apply rho -> sqrt(L) rho sqrt(L) / Tr{L rho}.
    Measurements are cached per (index, prefix).
    """

    def __init__(
        self,
        cell: MemoryCell,
        probe: ProbeState | npt.ArrayLike,
        model: SourceModel,
        construction: CodeConstruction,
        maps: FrozenMaps,
        strict: bool = False,
        support_cut: float = SUPPORT_CUT,
    ):
        settings.require_exact(construction.block_length)
        self.cell = cell
        self.probe = probe
        self.model = model
        self.construction = construction
        self.maps = maps
        self.strict = strict
        self.support_cut = support_cut
        self._outputs = label_outputs(cell, probe)
        self._info = frozenset(construction.info_set)
        self._transform = polar_transform(construction.n)
        self._measurements: dict[tuple[int, tuple[int, ...]], _Measurement] = {}

    def _measurement(self, i: int, prefix: tuple[int, ...]) -> _Measurement:
        # Concurrent builds of one key are identical; the first one published wins.
        key = (i, prefix)
        cached = self._measurements.get(key)
        if cached is None:
            cached = self._measurements.setdefault(key, self._build_measurement(i, prefix))
        return cached

    def _build_measurement(self, i: int, prefix: tuple[int, ...]) -> _Measurement:
        n_len = self.construction.block_length
        fallback = False
        try:
            view = synthesize(self.cell, self.probe, self.model, n_len, i, prefix)
            priors = (view.cond_prior, 1.0 - view.cond_prior)
        except ZeroProbabilityPrefixError as e:
            if self.strict:
                logger.error(f"Decoder abort at i={i}: {e}")
                raise DecoderAbortError(f"Decoded prefix {prefix} has probability zero") from e
            logger.warning(f"Decoded prefix {prefix} has probability zero; using prior 1/2")
            uniform = SourceModel(SourceKind.IID_U, 0.5)
            view = synthesize(self.cell, self.probe, uniform, n_len, i, prefix)
            priors = (0.5, 0.5)
            fallback = True
        povm = square_root_measurement(
            priors, (view.cond_state0, view.cond_state1), self.support_cut
        )
        sqrt_elements = (matrix_sqrt(povm.elements[0]), matrix_sqrt(povm.elements[1]))
        return _Measurement(povm, sqrt_elements, fallback)

    def received_state(self, true_u: Sequence[int]) -> Operator:
        x = encode_bits(true_u, self._transform)
        return tensor_all([self._outputs[b] for b in x])

    def decode(self, true_u: Sequence[int], rng: np.random.Generator) -> DecodeTrace:
        truth = tuple(int(b) for b in true_u)
        if len(truth) != self.construction.block_length:
            raise DimensionMismatchError(
                f"Expected {self.construction.block_length} bits, got {len(truth)}"
            )
        rho = self.received_state(truth)
        decoded: list[int] = []
        steps: list[DecodeStep] = []
        path_probability = 1.0
        for j in range(1, self.construction.block_length + 1):
            prefix = tuple(decoded)
            if j not in self._info:
                bit = self.maps.value(j, prefix)
                certain = (0.0, 1.0) if bit else (1.0, 0.0)
                steps.append(DecodeStep(j, StepKind.FROZEN, certain, bit))
                decoded.append(bit)
                continue
            measurement = self._measurement(j, prefix)
            raw = measurement.povm.probabilities(rho)
            drift = abs(float(raw.sum()) - 1.0)
            if drift > OUTCOME_SUM_TOL:
                raise TraceViolationError(
                    f"Outcome probabilities at i={j} sum to 1 only within {drift:.3e}"
                )
            probs = np.clip(raw, 0.0, None)
            probs = probs / probs.sum()
            bit = 0 if rng.random() < probs[0] else 1
            root = measurement.sqrt_elements[bit]
            rho = root @ rho @ root.conj().T / probs[bit]
            rho = 0.5 * (rho + rho.conj().T)
            path_probability *= float(probs[bit])
            steps.append(
                DecodeStep(
                    j,
                    StepKind.INFO,
                    (float(probs[0]), float(probs[1])),
                    bit,
                    measurement.prior_fallback,
                )
            )
            decoded.append(bit)
        return DecodeTrace(truth, tuple(decoded), tuple(steps), path_probability)


def sc_decode(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    construction: CodeConstruction,
    maps: FrozenMaps,
    true_u: Sequence[int],
    rng_seed: int,
    strict: bool = False,
) -> DecodeTrace:
    decoder = SuccessiveCancellationDecoder(cell, probe, model, construction, maps, strict)
    return decoder.decode(true_u, np.random.default_rng(rng_seed))


# -----------------------------------------------------------------------------
# BOUNDS AND MONTE CARLO
# -----------------------------------------------------------------------------


def _info_reliabilities(profile: PolarizationProfile, info_set: Sequence[int]) -> list[float]:
    by_index = {r.index: r.z for r in profile.rows}
    return [by_index[i] for i in sorted(info_set)]


def union_bound_rhs(profile: PolarizationProfile, info_set: Sequence[int], c: float = 1.0) -> float:
    """(1 + c + 1/c)/2 * sum_{i in A} Z_i; smallest at c = 1."""
    if c <= 0.0:
        raise InvalidParameterError(f"c must be positive, got {c}")
    return (1.0 + c + 1.0 / c) / 2.0 * sum(_info_reliabilities(profile, info_set))


def sequential_union_bound(
    profile: PolarizationProfile, info_set: Sequence[int], c: float = 1.0
) -> float:
    """
    Position-weighted quantum union bound over the decoded information indices.

    Each step error is bounded by Z_i / 2; the first step carries weight 2 + 1/c, middle steps
    2 + c + 1/c and the last step 1 + c. A single measurement carries weight 1.
    """
    if c <= 0.0:
        raise InvalidParameterError(f"c must be positive, got {c}")
    half_z = [0.5 * z for z in _info_reliabilities(profile, info_set)]
    if len(half_z) <= 1:
        return sum(half_z)
    middle = sum(half_z[1:-1])
    return (2.0 + 1.0 / c) * half_z[0] + (2.0 + c + 1.0 / c) * middle + (1.0 + c) * half_z[-1]


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    success: bool
    first_error_index: int | None


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    errors: int
    wilson_low: float
    wilson_high: float
    records: tuple[TrialRecord, ...]

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def monte_carlo_error(
    cell: MemoryCell,
    probe: ProbeState | npt.ArrayLike,
    model: SourceModel,
    construction: CodeConstruction,
    maps: FrozenMaps,
    trials: int,
    master_seed: int,
    strict: bool = False,
) -> MonteCarloResult:
    """
    Block error rate of the SC decoder with uniform message bits.

    Every trial draws its message and measurement outcomes from its own counter-derived stream,
    so the estimate does not depend on the number of worker threads.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    decoder = SuccessiveCancellationDecoder(cell, probe, model, construction, maps, strict)
    k = len(construction.info_set)

    def run(trial: int) -> TrialRecord:
        rng = trial_rng(master_seed, trial)
        msg = rng.integers(0, 2, size=k)
        u, _ = encode_message(msg, construction, maps)
        trace = decoder.decode(u, rng)
        return TrialRecord(trial, trace.success, trace.first_error_index)

    with ThreadPoolExecutor(max_workers=settings.worker_threads()) as pool:
        records = tuple(pool.map(run, range(trials)))
    errors = sum(not r.success for r in records)
    interval = binomtest(errors, trials).proportion_ci(confidence_level=0.95, method="wilson")
    logger.info(
        f"Monte Carlo N={construction.block_length} A={list(construction.info_set)}: "
        f"{errors}/{trials} block errors"
    )
    return MonteCarloResult(
        trials=trials,
        errors=errors,
        wilson_low=float(interval.low),
        wilson_high=float(interval.high),
        records=records,
    )
