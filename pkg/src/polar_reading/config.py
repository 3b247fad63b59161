"""
Experiment configuration: one JSON file validated before any computation, plus flag overrides.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .cell import KrausChannel, MemoryCell, ProbeState, ad_cell
from .errors import ConfigError
from .polar import SourceKind, SourceModel
from .probe import ProbeObjective, SweepAxis

logger = logging.getLogger(__name__)

UINT64_MAX = 2**64 - 1

# A Kraus operator as rows of [re, im] pairs
ComplexMatrix = list[list[tuple[float, float]]]


def _to_matrix(rows: ComplexMatrix) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class AdCellSpec(_Strict):
    type: Literal["ad"]
    gamma0: float = Field(ge=0.0, le=1.0)
    gamma1: float = Field(ge=0.0, le=1.0)
    prior_p: float = Field(gt=0.0, lt=1.0)

    def build(self) -> MemoryCell:
        return ad_cell(self.gamma0, self.gamma1, self.prior_p)


class KrausCellSpec(_Strict):
    type: Literal["kraus"]
    ops0: list[ComplexMatrix] = Field(min_length=1)
    ops1: list[ComplexMatrix] = Field(min_length=1)
    prior_p: float = Field(gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_channels(self) -> KrausCellSpec:
        # raises a ValueError subclass, which pydantic reports as a validation error
        self.build()
        return self

    def build(self) -> MemoryCell:
        return MemoryCell(
            KrausChannel(tuple(_to_matrix(a) for a in self.ops0)),
            KrausChannel(tuple(_to_matrix(a) for a in self.ops1)),
            self.prior_p,
        )


CellSpec = Annotated[AdCellSpec | KrausCellSpec, Field(discriminator="type")]


class ProbeSpec(_Strict):
    bloch: tuple[float, float, float] = (0.0, 0.0, -1.0)

    @model_validator(mode="after")
    def _check_ball(self) -> ProbeSpec:
        ProbeState(self.bloch)
        return self


class ExperimentConfig(_Strict):
    cell: CellSpec
    probe: ProbeSpec = ProbeSpec()
    source_model: SourceKind = SourceKind.INDUCED_FROM_IID_X
    n: int = Field(default=3, ge=0)
    beta: float = Field(default=0.49, ge=0.0, lt=0.5)
    target_rate: float = Field(default=0.25, gt=0.0, le=1.0)
    z_threshold: float | None = None
    zsrc_threshold: float | None = None
    frozen_seed: int = Field(default=0, ge=0, le=UINT64_MAX)
    rng_seed: int = Field(default=0, ge=0)
    trials: int = Field(default=2000, ge=1)
    union_c: float = Field(default=1.0, gt=0.0)
    probe_objective: ProbeObjective = ProbeObjective.RATE
    grid_per_axis: int = Field(default=21, ge=3)
    refine_iters: int = Field(default=200, ge=0)
    sweep_axis: SweepAxis = SweepAxis.Z
    sweep_samples: int = Field(default=41, ge=2)
    verify_instances: int = Field(default=100, ge=1)
    strict_decoder: bool = False
    out_dir: str = "results"

    @property
    def block_length(self) -> int:
        return 1 << self.n

    def build_cell(self) -> MemoryCell:
        return self.cell.build()

    def build_probe(self) -> ProbeState:
        return ProbeState(self.probe.bloch)

    def source(self) -> SourceModel:
        return SourceModel(self.source_model, self.cell.prior_p)


def apply_overrides(
    data: dict[str, Any],
    n: int | None = None,
    prior: float | None = None,
    seed: int | None = None,
    trials: int | None = None,
    out_dir: str | None = None,
) -> dict[str, Any]:
    """Return a copy of the raw config with command-line flags applied; flags win over the file."""
    merged = json.loads(json.dumps(data))
    if n is not None:
        merged["n"] = n
    if prior is not None:
        merged.setdefault("cell", {})["prior_p"] = prior
    if seed is not None:
        merged["rng_seed"] = seed
        merged["frozen_seed"] = seed
    if trials is not None:
        merged["trials"] = trials
    if out_dir is not None:
        merged["out_dir"] = out_dir
    return merged


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        logger.error(f"Invalid experiment configuration: {e.error_count()} error(s)")
        raise ConfigError(str(e)) from e


def load_config(path: str | Path, **overrides: Any) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must hold a JSON object")
    return parse_config(apply_overrides(data, **overrides))
