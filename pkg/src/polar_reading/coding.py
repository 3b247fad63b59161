"""
Code construction and encoding with prefix-dependent frozen bits.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .analysis import PolarizationProfile, log2_threshold
from .errors import DimensionMismatchError, InfeasibleConstructionError, InvalidParameterError
from .polar import (
    Bits,
    SourceModel,
    bits_to_index,
    encode_bits,
    level_of,
    polar_transform,
    prefix_marginal,
)

logger = logging.getLogger(__name__)

DEFAULT_BETA = 0.49
UINT64_MAX = 2**64 - 1


def default_threshold(block_length: int, beta: float = DEFAULT_BETA) -> float:
    """1 - 2^{-2^{n beta}}: the 'large reliability' level of the good-channel criterion."""
    return 1.0 - 2.0 ** log2_threshold(block_length, beta)


@dataclass(frozen=True)
class CodeConstruction:
    """Block length, 1-based information set and the parameters that produced it."""

    block_length: int
    info_set: tuple[int, ...]
    target_rate: float
    z_threshold: float
    zsrc_threshold: float
    frozen_seed: int

    def __post_init__(self):
        level_of(self.block_length)
        if not 0 <= self.frozen_seed <= UINT64_MAX:
            raise InvalidParameterError("frozen_seed must be a 64-bit unsigned integer")
        info = tuple(sorted(int(i) for i in self.info_set))
        if len(set(info)) != len(info) or any(not 1 <= i <= self.block_length for i in info):
            raise InvalidParameterError(f"Information set {info} is not a subset of 1..N")
        if len(info) > math.floor(self.target_rate * self.block_length + 1e-12):
            raise InvalidParameterError(
                f"|A|={len(info)} exceeds target rate {self.target_rate} at N={self.block_length}"
            )
        object.__setattr__(self, "info_set", info)

    @property
    def n(self) -> int:
        return level_of(self.block_length)

    @property
    def frozen_set(self) -> tuple[int, ...]:
        info = set(self.info_set)
        return tuple(j for j in range(1, self.block_length + 1) if j not in info)

    @property
    def achieved_rate(self) -> float:
        return len(self.info_set) / self.block_length

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "info_set": list(self.info_set),
            "target_rate": self.target_rate,
            "z_threshold": self.z_threshold,
            "zsrc_threshold": self.zsrc_threshold,
            "frozen_seed": self.frozen_seed,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> CodeConstruction:
        return cls(
            block_length=1 << int(data["n"]),
            info_set=tuple(data["info_set"]),
            target_rate=float(data["target_rate"]),
            z_threshold=float(data["z_threshold"]),
            zsrc_threshold=float(data["zsrc_threshold"]),
            frozen_seed=int(data["frozen_seed"]),
        )


def select_information_set(
    profile: PolarizationProfile,
    target_rate: float,
    z_threshold: float | None = None,
    zsrc_threshold: float | None = None,
    frozen_seed: int = 0,
) -> CodeConstruction:
    """
    Pick the floor(R N) indices with the smallest Z_i, then shrink.

    Ties on Z go to the larger Zsrc, then to the smaller index. Indices with Z_i above
    ``z_threshold`` are dropped first; afterwards the worst Zsrc violator is dropped one at a time
    until every selected index has Zsrc_i >= ``zsrc_threshold``. Without an explicit
    ``z_threshold`` no index is dropped for its Z value.
    """
    if not 0.0 < target_rate <= 1.0:
        raise InvalidParameterError(f"Target rate must lie in (0, 1], got {target_rate}")
    n_len = profile.block_length
    z_cut = 1.0 if z_threshold is None else z_threshold
    zsrc_cut = default_threshold(n_len, profile.beta) if zsrc_threshold is None else zsrc_threshold

    ranked = sorted(profile.rows, key=lambda r: (r.z, -r.z_source, r.index))
    selected = ranked[: math.floor(target_rate * n_len + 1e-12)]

    too_noisy = [r.index for r in selected if r.z > z_cut]
    if too_noisy:
        logger.warning(f"Dropping indices {too_noisy}: Z above z_threshold={z_cut:.6g}")
    selected = [r for r in selected if r.z <= z_cut]

    while True:
        violators = [r for r in selected if r.z_source < zsrc_cut]
        if not violators:
            break
        worst = min(violators, key=lambda r: (r.z_source, -r.index))
        logger.warning(
            f"Dropping index {worst.index}: Zsrc={worst.z_source:.6g} below "
            f"zsrc_threshold={zsrc_cut:.6g}"
        )
        selected.remove(worst)

    if not selected:
        raise InfeasibleConstructionError(
            f"No index satisfies Z <= {z_cut:.6g} and Zsrc >= {zsrc_cut:.6g} at N={n_len}, "
            f"R={target_rate}"
        )
    construction = CodeConstruction(
        block_length=n_len,
        info_set=tuple(r.index for r in selected),
        target_rate=target_rate,
        z_threshold=z_cut,
        zsrc_threshold=zsrc_cut,
        frozen_seed=frozen_seed,
    )
    logger.info(
        f"Constructed N={n_len} code: A={list(construction.info_set)}, "
        f"rate={construction.achieved_rate:.4f}"
    )
    return construction


def selection_dominance_holds(profile: PolarizationProfile, construction: CodeConstruction) -> bool:
    """max Z over A <= min Z over the frozen indices that meet the Zsrc constraint."""
    by_index = {r.index: r for r in profile.rows}
    worst_selected = max(by_index[i].z for i in construction.info_set)
    eligible = [
        by_index[j].z
        for j in construction.frozen_set
        if by_index[j].z_source >= construction.zsrc_threshold
    ]
    return not eligible or worst_selected <= min(eligible)


@dataclass(frozen=True, eq=False)
class FrozenMaps:
    """
    Shared-randomness frozen-bit maps lambda_j.

    lambda_j(prefix) = 1 exactly when a Philox uniform keyed by the seed at counter
    (j, prefix) falls below P(U_j = 1 | U_1^{j-1} = prefix).
    """

    model: SourceModel
    block_length: int
    seed: int
    _marginals: dict[int, np.ndarray] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        for length in range(self.block_length + 1):
            self._marginals[length] = prefix_marginal(self.model, self.block_length, length)

    def probability_one(self, j: int, prefix: Sequence[int]) -> float:
        """P(U_j = 1 | prefix); 0 when the prefix itself has probability zero."""
        k = bits_to_index(prefix)
        total = self._marginals[j - 1][k]
        if total <= 0.0:
            return 0.0
        return float(self._marginals[j][2 * k + 1] / total)

    def uniform(self, j: int, prefix: Sequence[int]) -> float:
        counter = [j, bits_to_index(prefix), len(prefix), 0]
        generator = np.random.Generator(np.random.Philox(key=self.seed, counter=counter))
        return float(generator.random())

    def value(self, j: int, prefix: Sequence[int]) -> int:
        if len(prefix) != j - 1:
            raise DimensionMismatchError(f"lambda_{j} takes {j - 1} prefix bits, got {len(prefix)}")
        return int(self.uniform(j, prefix) < self.probability_one(j, prefix))


def sample_frozen_maps(model: SourceModel, construction: CodeConstruction) -> FrozenMaps:
    return FrozenMaps(model, construction.block_length, construction.frozen_seed)


def encode_message(
    msg: Sequence[int], construction: CodeConstruction, maps: FrozenMaps
) -> tuple[Bits, Bits]:
    """Fill u in ascending order (message bits on A, lambda_j on A^c) and return (u, u G_N)."""
    if len(msg) != len(construction.info_set):
        raise DimensionMismatchError(
            f"Message has {len(msg)} bits but the information set has {len(construction.info_set)}"
        )
    info = dict(zip(construction.info_set, (int(b) for b in msg), strict=True))
    u: list[int] = []
    for j in range(1, construction.block_length + 1):
        u.append(info[j] if j in info else maps.value(j, u))
    u_bits = np.array(u, dtype=np.uint8)
    return u_bits, encode_bits(u_bits, polar_transform(construction.n))
