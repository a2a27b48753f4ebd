"""Bounded sinusoidal disturbances added to each agent's velocity."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

WAVEFORMS = ("sine", "cosine", "zero")


@dataclass(frozen=True)
class Term:
    """``amplitude * wave(frequency * t + phase)``."""

    waveform: str
    amplitude: float = 0.0
    frequency: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.waveform not in WAVEFORMS:
            raise ValueError(f"waveform must be one of {WAVEFORMS}, got {self.waveform!r}")


@dataclass(frozen=True)
class DisturbanceSpec:
    """Per-agent lists of terms. An empty ``agents`` tuple is the zero spec for any ``n``."""

    agents: tuple[tuple[Term, ...], ...] = ()
    _compiled: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        agents = tuple(tuple(terms) for terms in self.agents)
        object.__setattr__(self, "agents", agents)
        idx, amp, freq, phase, is_cos = [], [], [], [], []
        for i, terms in enumerate(agents):
            for term in terms:
                if term.waveform == "zero":
                    continue
                idx.append(i)
                amp.append(term.amplitude)
                freq.append(term.frequency)
                phase.append(term.phase)
                is_cos.append(term.waveform == "cosine")
        compiled = (
            np.array(idx, dtype=int),
            np.array(amp, dtype=float),
            np.array(freq, dtype=float),
            np.array(phase, dtype=float),
            np.array(is_cos, dtype=bool),
        )
        object.__setattr__(self, "_compiled", compiled)

    @property
    def is_zero(self) -> bool:
        return self._compiled[0].size == 0 or not np.any(self._compiled[1])


def evaluate(spec: DisturbanceSpec, t: float, n: int) -> np.ndarray:
    if spec.agents and len(spec.agents) != n:
        raise ValueError(f"disturbance has {len(spec.agents)} agent entries, expected {n}")
    idx, amp, freq, phase, is_cos = spec._compiled
    if idx.size == 0:
        return np.zeros(n)
    arg = freq * t + phase
    vals = amp * np.where(is_cos, np.cos(arg), np.sin(arg))
    return np.bincount(idx, weights=vals, minlength=n)


def implied_bound(spec: DisturbanceSpec) -> float:
    """Per-agent sum of absolute amplitudes, maximised over agents."""
    if not spec.agents:
        return 0.0
    return max(
        (sum(abs(t.amplitude) for t in terms if t.waveform != "zero") for terms in spec.agents),
        default=0.0,
    )


def from_lists(agents: Sequence[Sequence[dict]]) -> DisturbanceSpec:
    """Build a spec from plain dicts ``{"waveform", "amplitude", "frequency", "phase"}``."""
    return DisturbanceSpec(tuple(tuple(Term(**term) for term in terms) for terms in agents))


def to_lists(spec: DisturbanceSpec) -> list[list[dict]]:
    return [
        [
            {
                "waveform": t.waveform,
                "amplitude": t.amplitude,
                "frequency": t.frequency,
                "phase": t.phase,
            }
            for t in terms
        ]
        for terms in spec.agents
    ]


def example4_disturbance() -> DisturbanceSpec:
    """sin(10t), 0.8 sin(10t), 0.5 sin(10t), cos(10t), 0.8 cos(10t), 0.5 cos(10t)."""
    waves = [("sine", 1.0), ("sine", 0.8), ("sine", 0.5), ("cosine", 1.0), ("cosine", 0.8), ("cosine", 0.5)]
    return DisturbanceSpec(tuple((Term(w, a, 10.0),) for w, a in waves))
