"""
Probe-state objectives over the Bloch ball: evaluation, grid-plus-simplex optimization and sweeps.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize

from . import settings
from .cell import MemoryCell, ProbeState, cq_view, rate, reliability
from .errors import DimensionMismatchError, InvalidParameterError
from .polar import one_step_transform

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-8
CARDINAL_PROBES = (
    (1.0, 0.0, 0.0),
    (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 0.0, -1.0),
)

BlochVector = tuple[float, float, float]


class ProbeObjective(StrEnum):
    RATE = "rate"
    GAP = "gap"


class SweepAxis(StrEnum):
    Z = "z"
    XZ = "xz"


def evaluate_objective(cell: MemoryCell, probe: ProbeState, obj: ProbeObjective) -> float:
    """I(W) for RATE; I(W+) - I(W-) of one combining step with i.i.d. inputs for GAP."""
    if cell.dim_in != 2:
        raise DimensionMismatchError(f"Probe objectives need a qubit cell, got {cell.dim_in}-dim")
    e = cq_view(cell, probe)
    if ProbeObjective(obj) is ProbeObjective.RATE:
        return rate(e)
    split = one_step_transform(e)
    return rate(split.plus) - rate(split.minus)


def is_degenerate(cell: MemoryCell) -> bool:
    """True when Z sits at its ceiling 2 sqrt(p(1-p)) for all six cardinal probes."""
    p0, p1 = cell.priors
    ceiling = 2.0 * np.sqrt(p0 * p1)
    return all(
        ceiling - reliability(cq_view(cell, ProbeState(b))) <= DEGENERACY_TOL
        for b in CARDINAL_PROBES
    )


def _project(r: npt.ArrayLike) -> BlochVector:
    vec = np.asarray(r, dtype=np.float64)
    vec = vec / max(1.0, float(np.linalg.norm(vec)))
    return float(vec[0]), float(vec[1]), float(vec[2])


def ball_grid(grid_per_axis: int) -> list[BlochVector]:
    """Cubic grid on [-1, 1]^3 restricted to the closed unit ball."""
    axis = np.linspace(-1.0, 1.0, grid_per_axis)
    points = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    inside = points[np.sum(points**2, axis=1) <= 1.0 + 1e-12]
    return [_project(p) for p in inside]


def _evaluate_many(
    cell: MemoryCell, obj: ProbeObjective, points: list[BlochVector]
) -> list[float]:
    with ThreadPoolExecutor(max_workers=settings.worker_threads()) as pool:
        return list(pool.map(lambda b: evaluate_objective(cell, ProbeState(b), obj), points))


@dataclass(frozen=True)
class ProbeOptimum:
    best_bloch: BlochVector
    best_value: float
    bloch_radius: float
    trajectory: tuple[tuple[BlochVector, float], ...]
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "best_bloch": list(self.best_bloch),
            "best_value": self.best_value,
            "bloch_radius": self.bloch_radius,
            "degenerate": self.degenerate,
            "trajectory": [{"bloch": list(b), "value": v} for b, v in self.trajectory],
        }


def optimize_probe(
    cell: MemoryCell,
    obj: ProbeObjective,
    grid_per_axis: int = 21,
    refine_iters: int = 200,
    seed: int = 0,
    tol: float = 1e-10,
) -> ProbeOptimum:
    """
    Maximize the objective over the Bloch ball.

    A coarse grid over the closed ball picks the start; Nelder-Mead then refines on
    r -> r / max(1, |r|) from a seeded initial simplex. The trajectory holds the grid winner
    followed by every refinement evaluation, and the optimum is the best entry of the trajectory.
    """
    if grid_per_axis < 3:
        raise InvalidParameterError(f"grid_per_axis must be >= 3, got {grid_per_axis}")
    if refine_iters < 0:
        raise InvalidParameterError(f"refine_iters must be >= 0, got {refine_iters}")
    obj = ProbeObjective(obj)
    if is_degenerate(cell):
        logger.warning("Cell channels are indistinguishable at every cardinal probe")
        return ProbeOptimum((0.0, 0.0, -1.0), 0.0, 1.0, (), degenerate=True)

    grid = ball_grid(grid_per_axis)
    values = _evaluate_many(cell, obj, grid)
    start = int(np.argmax(values))
    trajectory: list[tuple[BlochVector, float]] = [(grid[start], values[start])]

    def negated(r: npt.NDArray[np.float64]) -> float:
        bloch = _project(r)
        value = evaluate_objective(cell, ProbeState(bloch), obj)
        trajectory.append((bloch, value))
        return -value

    if refine_iters > 0:
        rng = np.random.default_rng(seed)
        step = 2.0 / (grid_per_axis - 1)
        x0 = np.array(grid[start])
        signs = rng.choice([-1.0, 1.0], size=3)
        simplex = np.vstack([x0, x0 + step * np.diag(signs)])
        minimize(
            negated,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": refine_iters,
                "xatol": tol,
                "fatol": tol,
                "initial_simplex": simplex,
            },
        )

    best_bloch, best_value = max(trajectory, key=lambda t: t[1])
    radius = float(np.linalg.norm(best_bloch))
    logger.info(
        f"Probe optimum for {obj.value}: bloch={best_bloch} value={best_value:.6f} "
        f"radius={radius:.6f} after {len(trajectory) - 1} refinement evaluations"
    )
    return ProbeOptimum(best_bloch, best_value, radius, tuple(trajectory))


@dataclass(frozen=True)
class SweepPoint:
    bloch: BlochVector
    value: float


def sweep_points(axis: SweepAxis, samples: int) -> list[BlochVector]:
    """
    Z: ``samples`` points from |1> (0, 0, -1) to |0> (0, 0, 1).
    XZ: ``samples`` directions in the xz-plane, each sampled at ``samples`` radii from 0 to 1.
    """
    if samples < 2:
        raise InvalidParameterError(f"samples must be >= 2, got {samples}")
    if SweepAxis(axis) is SweepAxis.Z:
        return [(0.0, 0.0, float(z)) for z in np.linspace(-1.0, 1.0, samples)]
    points = []
    for theta in np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False):
        for r in np.linspace(0.0, 1.0, samples):
            points.append(_project((r * np.sin(theta), 0.0, r * np.cos(theta))))
    return points


def probe_sweep(
    cell: MemoryCell, obj: ProbeObjective, axis: SweepAxis, samples: int
) -> list[SweepPoint]:
    points = sweep_points(axis, samples)
    values = _evaluate_many(cell, ProbeObjective(obj), points)
    return [SweepPoint(b, v) for b, v in zip(points, values, strict=True)]
