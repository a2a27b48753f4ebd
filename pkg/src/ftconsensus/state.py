"""Per-agent state of a swarm and its packing into a flat ODE vector."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class SwarmState:
    """Agent states ``x``, adaptive gains ``theta`` and, for the sliding-mode
    protocol, reaching gains ``eta`` and the accumulated nominal control
    ``integral``.

    Packed layout is ``[x, theta]`` or ``[x, theta, eta, integral]``.
    """

    t: float
    x: np.ndarray
    theta: np.ndarray
    eta: np.ndarray | None = None
    integral: np.ndarray | None = None

    @classmethod
    def initial(cls, x0: Sequence[float], sliding: bool = False, t: float = 0.0) -> "SwarmState":
        """Start state with all gains (and the control integral) at zero."""
        x = np.array(x0, dtype=float)
        zeros = np.zeros_like(x)
        if sliding:
            return cls(t, x, zeros, zeros.copy(), zeros.copy())
        return cls(t, x, zeros)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def sliding(self) -> bool:
        return self.eta is not None

    def pack(self) -> np.ndarray:
        parts = [self.x, self.theta]
        if self.sliding:
            parts += [self.eta, self.integral]
        return np.concatenate(parts).astype(float)

    @classmethod
    def unpack(cls, t: float, y: np.ndarray, n: int, sliding: bool) -> "SwarmState":
        if sliding:
            return cls(t, y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n])
        return cls(t, y[:n], y[n : 2 * n])
