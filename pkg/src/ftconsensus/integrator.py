"""Deterministic fixed-step integration with trajectory recording."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .state import SwarmState

# rhs(t, y) -> (dy/dt, control applied at (t, y)), both flat arrays
RHS = Callable[[float, np.ndarray], tuple[np.ndarray, np.ndarray]]

METHODS = ("euler", "rk4")
MAX_ROWS = 100_000


class IntegrationError(RuntimeError):
    """A state component became non-finite during integration."""

    def __init__(self, t: float, component: int, value: float):
        super().__init__(f"non-finite state component {component} ({value!r}) at t={t!r}")
        self.t = t
        self.component = component
        self.value = value


@dataclass(frozen=True)
class IntegratorSettings:
    method: str = "rk4"
    dt: float = 1e-4
    t_end: float = 3.0
    record_every: int | None = None  # None: smallest factor keeping rows <= MAX_ROWS

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end >= self.dt and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be >= dt, got t_end={self.t_end!r}, dt={self.dt!r}")
        if self.record_every is not None and (
            int(self.record_every) != self.record_every or self.record_every < 1
        ):
            raise ValueError(f"record_every must be a positive integer, got {self.record_every!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def resolved_record_every(self) -> int:
        if self.record_every is not None:
            return int(self.record_every)
        return max(1, math.ceil((self.n_steps + 1) / MAX_ROWS))


@dataclass(eq=False)
class Trajectory:
    """Recorded samples of an integration, one row per recorded time.

    ``controls`` holds the control evaluated at the start of each step.
    ``disagreement`` and ``surface`` are filled in by callers that know the
    graph or the sliding manifold.
    """

    times: np.ndarray
    x: np.ndarray
    theta: np.ndarray
    controls: np.ndarray
    eta: np.ndarray | None = None
    integral: np.ndarray | None = None
    surface: np.ndarray | None = None
    disagreement: np.ndarray | None = None
    dt: float = 0.0
    record_every: int = 1

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def sliding(self) -> bool:
        return self.eta is not None

    @property
    def spread(self) -> np.ndarray:
        """Max pairwise spread ``max(x) - min(x)`` per sample."""
        return self.x.max(axis=1) - self.x.min(axis=1)

    @property
    def max_abs_u(self) -> np.ndarray:
        return np.abs(self.controls).max(axis=1)

    def state(self, k: int) -> SwarmState:
        return SwarmState(
            float(self.times[k]),
            self.x[k],
            self.theta[k],
            None if self.eta is None else self.eta[k],
            None if self.integral is None else self.integral[k],
        )


def _check_finite(t: float, y: np.ndarray) -> None:
    if not np.isfinite(y).all():
        k = int(np.flatnonzero(~np.isfinite(y))[0])
        raise IntegrationError(t, k, float(y[k]))


def integrate(rhs: RHS, s0: SwarmState, settings: IntegratorSettings) -> Trajectory:
    """Advance ``s0`` to ``settings.t_end`` with fixed steps of ``settings.dt``.

    Sample ``k`` sits at ``s0.t + k * record_every * dt``; the final state is
    recorded only when the step count is a multiple of ``record_every``.
    """
    n, sliding = s0.n, s0.sliding
    dt = settings.dt
    steps = settings.n_steps
    every = settings.resolved_record_every()
    rows = steps // every + 1
    t0 = float(s0.t)

    y = s0.pack()
    _check_finite(t0, y)
    ys = np.empty((rows, y.shape[0]))
    us = np.empty((rows, n))
    half = 0.5 * dt
    sixth = dt / 6.0
    rk4 = settings.method == "rk4"

    row = 0
    for k in range(steps + 1):
        t = t0 + k * dt
        k1, u = rhs(t, y)
        if k % every == 0:
            ys[row] = y
            us[row] = u
            row += 1
        if k == steps:
            break
        if rk4:
            k2, _ = rhs(t + half, y + half * k1)
            k3, _ = rhs(t + half, y + half * k2)
            k4, _ = rhs(t + dt, y + dt * k3)
            y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        else:
            y = y + dt * k1
        _check_finite(t + dt, y)

    times = t0 + np.arange(rows) * (every * dt)
    return Trajectory(
        times=times,
        x=ys[:, :n],
        theta=ys[:, n : 2 * n],
        controls=us,
        eta=ys[:, 2 * n : 3 * n] if sliding else None,
        integral=ys[:, 3 * n : 4 * n] if sliding else None,
        dt=dt,
        record_every=every,
    )
