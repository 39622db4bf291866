"""Dispersion relations, conserved mode occupations and the entanglement
spectrum function eta(k) for free-fermion quenches.

Units: lattice spacing 1, hopping timescale 1. Momenta live on the
Brillouin zone [-pi, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Dispersion",
    "ModeOccupation",
    "QuenchSpec",
    "hopping_dispersion",
    "linear_dispersion",
    "dimer_occupation",
    "flat_occupation",
    "thermal_occupation",
    "eta",
    "eta_clamped",
    "OCCUPATION_CLAMP",
]

OCCUPATION_CLAMP = 1e-12

# Sign of the nearest-neighbour term of the dimer occupation, n(k) = (1 + s cos k)/2.
# Fixed by exact evolution of the dimer state on a finite ring (see corr.ring_oracle_correlation).
DIMER_SIGN = 1

SuperlevelFn = Callable[[float, int], list]


@dataclass(frozen=True)
class Dispersion:
    """Band energy and group velocity on the Brillouin zone.

    ``superlevel(u, side)`` optionally returns the closed-form set
    ``{k in half-zone : side * v(k) > u}`` as a list of ``(lo, hi)`` pairs,
    where ``side = +1`` selects (0, pi) and ``side = -1`` selects (-pi, 0).
    Without it, window solving falls back to bracketing and bisection.
    """

    energy: Callable
    velocity: Callable
    v_max: float
    name: str = "custom"
    superlevel: Optional[SuperlevelFn] = None


@dataclass(frozen=True)
class ModeOccupation:
    """Conserved occupation n(k) of the post-quench modes."""

    n: Callable
    name: str = "custom"
    parity_even: bool = True
    log_ratio: Optional[Callable] = None

    def __call__(self, k):
        return self.n(k)

    def eta(self, k):
        """eta(k) = log[(1 - n(k)) / n(k)].

        ``log_ratio``, when given, is a cancellation-free closed form and is used
        unclamped; it may diverge only at isolated momenta that quadrature nodes
        never reach. Otherwise n(k) is clamped to [eps, 1 - eps] first.
        """
        if self.log_ratio is None:
            return eta_clamped(self.n(k))
        return self.log_ratio(k)


@dataclass(frozen=True)
class QuenchSpec:
    dispersion: Dispersion
    occupation: ModeOccupation
    subsystem_length: int
    time: float

    def __post_init__(self):
        if int(self.subsystem_length) != self.subsystem_length or self.subsystem_length < 2:
            raise ValueError(f"subsystem length must be an integer >= 2, got {self.subsystem_length!r}")
        if not (self.time >= 0.0):
            raise ValueError(f"time must be >= 0, got {self.time!r}")

    @property
    def ell(self) -> int:
        return int(self.subsystem_length)


def _hopping_superlevel(u: float, side: int) -> list:
    if u < 0.0:
        return [(0.0, math.pi)] if side > 0 else [(-math.pi, 0.0)]
    if u >= 1.0:
        return []
    a = math.asin(u)
    if side > 0:
        return [(a, math.pi - a)]
    return [(-math.pi + a, -a)]


def hopping_dispersion() -> Dispersion:
    """Nearest-neighbour chain H = -1/2 sum_i (c_i^dag c_{i+1} + h.c.): e(k) = -cos k, v(k) = sin k."""
    return Dispersion(
        energy=lambda k: -np.cos(k),
        velocity=np.sin,
        v_max=1.0,
        name="hopping",
        superlevel=_hopping_superlevel,
    )


def linear_dispersion(v: float = 1.0) -> Dispersion:
    """Linear band e(k) = v k on the symmetric interval (-pi, pi); constant speed |v|."""
    speed = abs(float(v))

    def superlevel(u: float, side: int) -> list:
        if speed > u:
            return [(0.0, math.pi)] if side > 0 else [(-math.pi, 0.0)]
        return []

    return Dispersion(
        energy=lambda k: v * np.asarray(k, dtype=float),
        velocity=lambda k: np.full(np.shape(k), float(v)) if np.ndim(k) else float(v),
        v_max=speed,
        name="linear",
        superlevel=superlevel,
    )


def dimer_occupation() -> ModeOccupation:
    """Occupation after the quench from the dimer state: n(k) = (1 + cos k)/2."""
    if DIMER_SIGN > 0:
        n = lambda k: np.cos(0.5 * np.asarray(k, dtype=float)) ** 2  # noqa: E731
        ratio = lambda k: 2.0 * np.log(np.abs(np.tan(0.5 * np.asarray(k, dtype=float))))  # noqa: E731
    else:
        n = lambda k: np.sin(0.5 * np.asarray(k, dtype=float)) ** 2  # noqa: E731
        ratio = lambda k: -2.0 * np.log(np.abs(np.tan(0.5 * np.asarray(k, dtype=float))))  # noqa: E731
    return ModeOccupation(n=n, name="dimer", log_ratio=ratio)


def flat_occupation(value: float) -> ModeOccupation:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"occupation must lie in [0, 1], got {value}")
    return ModeOccupation(n=lambda k: np.full(np.shape(k), float(value)), name=f"flat({value:g})")


def thermal_occupation(beta: float, dispersion: Dispersion) -> ModeOccupation:
    """Fermi-Dirac occupation with eta(k) = beta * e(k)."""
    return ModeOccupation(
        n=lambda k: 0.5 * (1.0 - np.tanh(0.5 * beta * dispersion.energy(k))),
        name=f"thermal(beta={beta:g})",
        log_ratio=lambda k: beta * np.asarray(dispersion.energy(k), dtype=float),
    )


def eta(n_value):
    """log[(1 - n) / n] for 0 < n < 1; raises ValueError outside the open interval."""
    n_arr = np.asarray(n_value, dtype=float)
    if np.any(~((n_arr > 0.0) & (n_arr < 1.0))):
        raise ValueError("eta requires 0 < n < 1 strictly")
    out = np.log1p(-n_arr) - np.log(n_arr)
    return float(out) if out.ndim == 0 else out


def eta_clamped(n_value, eps: float = OCCUPATION_CLAMP):
    """eta after clamping n to [eps, 1 - eps]."""
    n_arr = np.clip(np.asarray(n_value, dtype=float), eps, 1.0 - eps)
    out = np.log1p(-n_arr) - np.log(n_arr)
    return float(out) if out.ndim == 0 else out
