"""Adaptive-gain consensus protocols for single-integrator agents.

Every protocol shares the gain law

    theta_i' = -lambda * theta_i + rho * sum_j a_ij (x_j - x_i)**2,  theta_i(0) = 0

and differs in how the gain scales an inverse of relative states:

* ``FIXED_TIME``:   u_i = theta_i * inv(sum_j a_ij (x_j - x_i))
* ``AVERAGE``:      u_i = sum_j a_ij (theta_i + theta_j) inv(x_j - x_i)
* ``WEIGHTED``:     the average law divided by a preassigned weight p_i
* ``SLIDING_MODE``: the average law plus a reaching term -(eta_i + d) sgn(s_i)

``inv(z)`` is ``z / (z**2 + gamma)`` for ``gamma > 0`` and ``1 / z`` for ``gamma == 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .disturbance import DisturbanceSpec, evaluate
from .graph import Graph, min_positive_weight
from .scalar import ConditionError
from .state import SwarmState

WEIGHT_SUM_TOL = 1e-12


class Variant(str, enum.Enum):
    FIXED_TIME = "fixed_time"
    AVERAGE = "average"
    WEIGHTED = "weighted"
    SLIDING_MODE = "sliding_mode"


class SingularityError(ZeroDivisionError):
    """Exact inverse of a zero relative state with a nonzero gain in front of it."""

    def __init__(self, agent: int, neighbor: int | None = None, t: float | None = None):
        term = f"agent {agent}" if neighbor is None else f"edge ({agent}, {neighbor})"
        when = "" if t is None else f" at t={t!r}"
        super().__init__(f"singular inverse for {term}{when}: relative state is 0 and gamma=0")
        self.agent = agent
        self.neighbor = neighbor
        self.t = t


@dataclass(frozen=True)
class ProtocolConfig:
    variant: Variant
    lam: float
    rho: float
    gamma: float = 0.01
    p: tuple[float, ...] | None = None
    omega_s: float | None = None
    mu: float | None = None
    d: float = 0.0
    xbar: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho!r}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma!r}")
        if self.p is not None:
            object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if self.xbar is not None:
            object.__setattr__(self, "xbar", tuple(float(v) for v in self.xbar))

        if self.variant is Variant.WEIGHTED:
            if self.p is None:
                raise ValueError("weighted protocol requires weights p")
            if any(not v > 0 for v in self.p):
                raise ValueError(f"every weight p_i must be positive, got {self.p}")
            if abs(math.fsum(self.p) - 1.0) >= WEIGHT_SUM_TOL:
                raise ValueError(f"weights p must sum to 1, got sum {math.fsum(self.p)!r}")
        if self.variant is Variant.SLIDING_MODE:
            if self.omega_s is None or not self.omega_s > 0:
                raise ValueError(f"omega_s must be positive, got {self.omega_s!r}")
            if self.mu is None or not self.mu > 0:
                raise ValueError(f"mu must be positive, got {self.mu!r}")
            if not self.d >= 0:
                raise ValueError(f"disturbance bound d must be nonnegative, got {self.d!r}")

    def check_size(self, n: int) -> None:
        """Raise if per-agent parameters do not match ``n`` agents."""
        if self.p is not None and len(self.p) != n:
            raise ValueError(f"p has {len(self.p)} entries, expected {n}")
        if self.xbar is not None and len(self.xbar) != n:
            raise ValueError(f"xbar has {len(self.xbar)} entries, expected {n}")

    @property
    def K(self) -> float | None:
        """Largest preassigned weight, when weights are configured."""
        return max(self.p) if self.p is not None else None


def regularized_inverse(z, gamma: float):
    """``z / (z**2 + gamma)``; the exact ``1 / z`` when ``gamma == 0``. Odd in ``z``."""
    if gamma > 0:
        return z / (z * z + gamma)
    if np.any(np.asarray(z) == 0):
        raise SingularityError(int(np.flatnonzero(np.atleast_1d(z) == 0)[0]))
    return 1.0 / z


def _scaled_inverse(coeff: np.ndarray, z: np.ndarray, gamma: float) -> np.ndarray:
    """Elementwise ``coeff * inv(z)``, taken as zero wherever ``coeff == 0``."""
    if gamma > 0:
        return coeff * z / (z * z + gamma)
    active = coeff != 0
    bad = active & (z == 0)
    if bad.any():
        where = np.argwhere(bad)[0]
        raise SingularityError(*(int(v) for v in where))
    out = np.zeros(np.shape(z))
    out[active] = coeff[active] / z[active]
    return out


def _relative(x: np.ndarray) -> np.ndarray:
    # entry (i, j) is x_j - x_i
    return x[np.newaxis, :] - x[:, np.newaxis]


def _edge_control(a: np.ndarray, x: np.ndarray, theta: np.ndarray, gamma: float) -> np.ndarray:
    coupling = a * (theta[:, np.newaxis] + theta[np.newaxis, :])
    return _scaled_inverse(coupling, _relative(x), gamma).sum(axis=1)


def control_fixed_time(g: Graph, s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    aggregate = (g.weights * _relative(s.x)).sum(axis=1)
    return _scaled_inverse(np.asarray(s.theta, dtype=float), aggregate, c.gamma)


def control_average(g: Graph, s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    return _edge_control(g.weights, s.x, s.theta, c.gamma)


def control_weighted(g: Graph, s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    if c.p is None:
        raise ValueError("weighted protocol requires weights p")
    return _edge_control(g.weights, s.x, s.theta, c.gamma) / np.asarray(c.p)


def theta_rhs(g: Graph, s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    r = _relative(s.x)
    return -c.lam * s.theta + c.rho * (g.weights * r * r).sum(axis=1)


def sliding_surface(s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    """``s_i = x_i - xbar_i - integral_i``."""
    xbar = 0.0 if c.xbar is None else np.asarray(c.xbar)
    return s.x - xbar - s.integral


def control_sliding(g: Graph, s: SwarmState, c: ProtocolConfig) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(u, nominal)``; ``nominal`` also drives the control integral."""
    nominal = _edge_control(g.weights, s.x, s.theta, c.gamma)
    u = nominal - (s.eta + c.d) * np.sign(sliding_surface(s, c))
    return u, nominal


def eta_rhs(s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    return -c.omega_s * s.eta + c.mu * np.abs(sliding_surface(s, c))


def control(g: Graph, s: SwarmState, c: ProtocolConfig) -> np.ndarray:
    """Applied control for any variant."""
    if c.variant is Variant.FIXED_TIME:
        return control_fixed_time(g, s, c)
    if c.variant is Variant.AVERAGE:
        return control_average(g, s, c)
    if c.variant is Variant.WEIGHTED:
        return control_weighted(g, s, c)
    return control_sliding(g, s, c)[0]


@dataclass(frozen=True)
class ConditionCheck:
    """Sufficient gain condition for a variant. For the sliding-mode protocol
    ``satisfied`` requires both the consensus (rho) and reaching (mu) parts."""

    satisfied: bool
    threshold: float
    reaching_satisfied: bool | None = None
    reaching_threshold: float | None = None


def _rho_threshold(variant: Variant, lam: float, n: int | None, kappa: float | None, K: float | None) -> float:
    if variant is Variant.FIXED_TIME:
        return lam**2 / 16.0
    if n is None or kappa is None:
        raise ValueError(f"{variant.value} condition needs n and kappa")
    if variant is Variant.WEIGHTED:
        if K is None:
            raise ValueError("weighted condition needs K = max p_i")
        return K**3 * n**3 / (8.0 * kappa**2) * lam**2
    return n / (8.0 * kappa**2) * lam**2


def check_condition(
    variant: Variant | str,
    lam: float,
    rho: float,
    mu: float | None = None,
    omega_s: float | None = None,
    n: int | None = None,
    kappa: float | None = None,
    K: float | None = None,
) -> ConditionCheck:
    variant = Variant(variant)
    threshold = _rho_threshold(variant, lam, n, kappa, K)
    if variant is not Variant.SLIDING_MODE:
        return ConditionCheck(rho > threshold, threshold)
    if mu is None or omega_s is None:
        raise ValueError("sliding-mode condition needs mu and omega_s")
    reaching_threshold = omega_s**2 / 4.0
    reaching_ok = mu > reaching_threshold
    return ConditionCheck(rho > threshold and reaching_ok, threshold, reaching_ok, reaching_threshold)


def check_config(g: Graph, c: ProtocolConfig) -> ConditionCheck:
    return check_condition(c.variant, c.lam, c.rho, c.mu, c.omega_s, g.n, min_positive_weight(g), c.K)


@dataclass(frozen=True)
class TimeBound:
    total: float
    consensus: float
    reaching: float | None = None

    def __float__(self) -> float:
        return self.total


def _half_period(radicand: float, name: str) -> float:
    if not radicand > 0:
        raise ConditionError(f"radicand {name} is not positive ({radicand!r}); no finite bound", radicand, 0.0)
    return math.pi / math.sqrt(radicand)


def bound_consensus_time(
    variant: Variant | str,
    lam: float,
    rho: float,
    mu: float | None = None,
    omega_s: float | None = None,
    n: int | None = None,
    kappa: float | None = None,
    K: float | None = None,
) -> TimeBound:
    """Initial-condition-free deadline on the consensus time of ``variant``."""
    variant = Variant(variant)
    if variant is Variant.FIXED_TIME:
        t = _half_period(4.0 * rho - lam**2 / 4.0, "4*rho - lambda^2/4")
        return TimeBound(t, t)
    if n is None or kappa is None:
        raise ValueError(f"{variant.value} bound needs n and kappa")
    if variant is Variant.WEIGHTED:
        if K is None:
            raise ValueError("weighted bound needs K = max p_i")
        t = _half_period(
            2.0 * kappa**2 * rho / (K**3 * n**3) - lam**2 / 4.0,
            "2*kappa^2*rho/(K^3*n^3) - lambda^2/4",
        )
        return TimeBound(t, t)
    consensus = _half_period(2.0 * kappa**2 * rho / n - lam**2 / 4.0, "2*kappa^2*rho/n - lambda^2/4")
    if variant is Variant.AVERAGE:
        return TimeBound(consensus, consensus)
    if mu is None or omega_s is None:
        raise ValueError("sliding-mode bound needs mu and omega_s")
    reaching = reaching_bound(mu, omega_s)
    return TimeBound(reaching + consensus, consensus, reaching)


def reaching_bound(mu: float, omega_s: float) -> float:
    """Deadline for reaching the sliding manifold, ``pi / sqrt(mu - omega_s^2/4)``."""
    return _half_period(mu - omega_s**2 / 4.0, "mu - omega_s^2/4")


def build_rhs(g: Graph, c: ProtocolConfig, disturbance: DisturbanceSpec | None = None):
    """Closed-loop vector field ``rhs(t, y) -> (dy, u)`` over the packed swarm state.

    Agents see ``x' = u + disturbance(t)``; the sliding-mode variant also
    integrates ``eta`` and the nominal control. Regularized protocols run on
    compiled kernels; ``gamma == 0`` goes through the reference functions so
    singular inverses are reported.
    """
    n = g.n
    c.check_size(n)
    noise = None if disturbance is None or disturbance.is_zero else disturbance
    if noise is not None:
        evaluate(noise, 0.0, n)  # size check up front
    zeros = np.zeros(n)

    def delta(t):
        return zeros if noise is None else evaluate(noise, t, n)

    if c.gamma == 0:
        return _with_time(_reference_rhs(g, c, delta))

    from . import _kernels

    a = np.ascontiguousarray(g.weights, dtype=float)
    lam, rho, gamma = float(c.lam), float(c.rho), float(c.gamma)
    if c.variant is Variant.FIXED_TIME:
        return lambda t, y: _kernels.fixed_time_field(y, a, lam, rho, gamma, delta(t))
    if c.variant is Variant.SLIDING_MODE:
        xbar = np.zeros(n) if c.xbar is None else np.array(c.xbar, dtype=float)
        d, omega_s, mu = float(c.d), float(c.omega_s), float(c.mu)
        return lambda t, y: _kernels.sliding_field(y, a, xbar, lam, rho, gamma, d, omega_s, mu, delta(t))
    inv_p = np.ones(n) if c.variant is Variant.AVERAGE else 1.0 / np.array(c.p, dtype=float)
    return lambda t, y: _kernels.weighted_field(y, a, inv_p, lam, rho, gamma, delta(t))


def _reference_rhs(g: Graph, c: ProtocolConfig, delta):
    n = g.n
    sliding = c.variant is Variant.SLIDING_MODE

    def rhs(t, y):
        s = SwarmState.unpack(t, y, n, sliding)
        dtheta = theta_rhs(g, s, c)
        if sliding:
            u, nominal = control_sliding(g, s, c)
            return np.concatenate((u + delta(t), dtheta, eta_rhs(s, c), nominal)), u
        u = control(g, s, c)
        return np.concatenate((u + delta(t), dtheta)), u

    return rhs


def _with_time(rhs):
    def wrapped(t, y):
        try:
            return rhs(t, y)
        except SingularityError as exc:
            raise SingularityError(exc.agent, exc.neighbor, t) from None

    return wrapped
