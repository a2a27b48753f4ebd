"""Scalar fixed-time regulator driven by a decaying adaptive gain.

    x' = -theta * sgn(x)
    theta' = -lambda * theta + rho * |x|,   theta(0) = 0

While ``x`` keeps its sign, ``V = |x|`` and ``theta`` obey a linear pair whose
solution is an exponentially damped oscillation; ``V`` therefore hits zero
within half a period ``pi / omega`` where ``omega = sqrt(rho - lambda**2 / 4)``,
no matter how large ``|x(0)|`` is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrator import IntegratorSettings, Trajectory, integrate
from .state import SwarmState


class ConditionError(ValueError):
    """A gain condition needed for a finite time bound does not hold."""

    def __init__(self, message: str, value: float, threshold: float):
        super().__init__(message)
        self.value = value
        self.threshold = threshold


@dataclass(frozen=True)
class ScalarGains:
    lam: float
    rho: float

    def __post_init__(self):
        # lam = 0 is the undamped limit; the bound still holds there
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam!r}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho!r}")


@dataclass(frozen=True)
class ScalarState:
    x: float
    theta: float = 0.0


def sgn(v):
    """Sign with ``sgn(0) = 0``."""
    return np.sign(v)


def scalar_rhs(s: ScalarState, g: ScalarGains) -> tuple[float, float]:
    dx = -s.theta * float(sgn(s.x))
    dtheta = -g.lam * s.theta + g.rho * abs(s.x)
    return dx, dtheta


def _omega(g: ScalarGains) -> float:
    radicand = g.rho - g.lam**2 / 4.0
    if not radicand > 0:
        raise ConditionError(
            f"condition rho > lambda^2/4 violated: rho={g.rho!r}, lambda^2/4={g.lam**2 / 4.0!r}",
            g.rho,
            g.lam**2 / 4.0,
        )
    return math.sqrt(radicand)


def bound_scalar(g: ScalarGains) -> float:
    """Deadline ``pi / sqrt(rho - lambda^2/4)`` valid for every initial condition."""
    return math.pi / _omega(g)


def first_zero_time(g: ScalarGains) -> float:
    """First positive zero of ``cos(wt) + lambda/(2w) sin(wt)``; always below ``pi / w``."""
    w = _omega(g)
    return (math.pi - math.atan2(2.0 * w, g.lam)) / w


def analytic_abs_x(t, x0_abs: float, g: ScalarGains):
    """Closed-form ``|x(t)|`` for ``theta(0) = 0``, clamped to zero after the first zero.

    Inverting ``(s + lambda) / ((s + lambda/2)**2 + w**2)`` by partial
    fractions gives ``exp(-lambda t/2) * (cos(wt) + lambda/(2w) * sin(wt))``.
    Accepts scalar or array ``t``.
    """
    w = _omega(g)
    t_arr = np.asarray(t, dtype=float)
    v = x0_abs * np.exp(-0.5 * g.lam * t_arr) * (
        np.cos(w * t_arr) + (g.lam / (2.0 * w)) * np.sin(w * t_arr)
    )
    v = np.where(t_arr >= first_zero_time(g), 0.0, np.maximum(v, 0.0))
    return float(v) if np.ndim(v) == 0 else v


def _scalar_ode(g: ScalarGains):
    lam, rho = g.lam, g.rho

    def rhs(t: float, y: np.ndarray):
        x, theta = y[0], y[1]
        u = -theta * np.sign(x)
        dy = np.array([u, -lam * theta + rho * abs(x)])
        return dy, np.array([u])

    return rhs


def simulate_scalar(
    x0: float, g: ScalarGains, dt: float = 1e-4, t_end: float = 4.0, method: str = "rk4"
) -> Trajectory:
    """Integrate the scalar regulator as a one-agent trajectory (``x[:, 0]``, ``theta[:, 0]``)."""
    settings = IntegratorSettings(method=method, dt=dt, t_end=t_end)
    return integrate(_scalar_ode(g), SwarmState.initial([x0]), settings)


def first_time_below(traj: Trajectory, threshold: float) -> float | None:
    """First recorded time with ``|x| < threshold`` (not necessarily sustained)."""
    hits = np.flatnonzero(np.abs(traj.x[:, 0]) < threshold)
    return float(traj.times[hits[0]]) if hits.size else None
