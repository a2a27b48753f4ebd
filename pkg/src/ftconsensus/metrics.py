"""Disagreement measures and event detection on recorded trajectories."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph
from .integrator import Trajectory

DEFAULT_EPSILON = 1e-2


@dataclass
class ConsensusReport:
    scenario: str
    variant: str
    consensus_time: float | None
    consensus_value: float | None
    bound: float | None
    within_bound: bool | None  # None when no finite bound or no consensus
    condition_satisfied: bool
    max_spread_final: float
    max_control: float
    conservation_error: float
    reaching_time: float | None = None
    reaching_bound: float | None = None


def disagreement(g: Graph, x) -> np.ndarray | float:
    """``V = 1/4 * sum_ij a_ij (x_j - x_i)**2``; ``x`` may be one state or rows of states."""
    x = np.asarray(x, dtype=float)
    r = x[..., np.newaxis, :] - x[..., :, np.newaxis]
    v = 0.25 * (g.weights * r * r).sum(axis=(-2, -1))
    return float(v) if v.ndim == 0 else v


def max_spread(x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.max() - x.min())


def sustained_below(times: np.ndarray, values: np.ndarray, epsilon: float) -> float | None:
    """Earliest time from which ``values < epsilon`` holds at every later sample."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    above = np.flatnonzero(~(values < epsilon))
    if above.size == 0:
        return float(times[0])
    last = above[-1]
    if last + 1 >= len(times):
        return None
    return float(times[last + 1])


def consensus_time(traj: Trajectory, epsilon: float = DEFAULT_EPSILON) -> tuple[float, float] | None:
    """``(t*, value)`` where spread stays below ``epsilon`` from ``t*`` to the horizon.

    ``value`` is the mean of the final recorded state.
    """
    t = sustained_below(traj.times, traj.spread, epsilon)
    if t is None:
        return None
    return t, float(traj.x[-1].mean())


def reaching_time(traj: Trajectory, epsilon: float = DEFAULT_EPSILON) -> float | None:
    """Earliest time from which ``max_i |s_i| < epsilon`` holds to the horizon."""
    if traj.surface is None:
        raise ValueError("trajectory has no sliding-surface records")
    return sustained_below(traj.times, np.abs(traj.surface).max(axis=1), epsilon)


def max_control(traj: Trajectory) -> float:
    if traj.controls.size == 0:
        return 0.0
    return float(np.abs(traj.controls).max())


def conservation_error(traj: Trajectory, p: Sequence[float] | None = None) -> float:
    """Largest drift of ``sum_i w_i x_i`` from its initial value, ``w = p`` or ``1/n``."""
    w = np.full(traj.n, 1.0 / traj.n) if p is None else np.asarray(p, dtype=float)
    weighted = traj.x @ w
    return float(np.abs(weighted - weighted[0]).max())


def deviation_energy(x, p: Sequence[float] | None = None) -> np.ndarray | float:
    """``1/2 * sum_i (x_i - x*)**2`` with ``x* = sum_i w_i x_i``, ``w = p`` or ``1/n``.

    Nonincreasing along average-protocol trajectories, unlike ``disagreement``.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    w = np.full(n, 1.0 / n) if p is None else np.asarray(p, dtype=float)
    center = (x @ w)[..., np.newaxis]
    v = 0.5 * ((x - center) ** 2).sum(axis=-1)
    return float(v) if np.ndim(v) == 0 else v
