"""Momentum-space windows and quadrature over the Brillouin zone.

A window is the set of momenta in one half-zone whose quasiparticles are
shared with the complement of the interval [0, ell] at time t. Integration
uses 15-point Gauss-Legendre panels with global adaptive bisection; Gauss
nodes never touch panel ends, so the logarithmic divergence of eta at
k = 0, +-pi is integrable without any change of variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .model import Dispersion

__all__ = [
    "KWindow",
    "QuadratureError",
    "solve_window_right",
    "solve_window_left",
    "speed_superlevel",
    "integrate",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-8
MAX_DEPTH = 60
MAX_PANELS = 200_000

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)
_TWO_PI = 2.0 * math.pi


class QuadratureError(ArithmeticError):
    """Adaptive subdivision did not reach the requested tolerance."""


@dataclass(frozen=True)
class KWindow:
    """Disjoint, ordered momentum intervals inside one half-zone.

    ``side`` is +1 for (0, pi) and -1 for (-pi, 0).
    """

    intervals: tuple = ()
    side: int = 1

    def __post_init__(self):
        lo_zone, hi_zone = (0.0, math.pi) if self.side > 0 else (-math.pi, 0.0)
        prev = -math.inf
        for lo, hi in self.intervals:
            if not (lo_zone <= lo < hi <= hi_zone) or lo < prev:
                raise ValueError(f"malformed window {self.intervals} for side {self.side}")
            prev = hi

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    @property
    def empty(self) -> bool:
        return not self.intervals

    def mirrored(self) -> "KWindow":
        """Image under k -> -k."""
        return KWindow(tuple((-hi, -lo) for lo, hi in reversed(self.intervals)), -self.side)


def _full(side: int) -> KWindow:
    return KWindow(((0.0, math.pi),) if side > 0 else ((-math.pi, 0.0),), side)


def _bracketed_superlevel(velocity: Callable, u: float, side: int, samples: int = 2049) -> list:
    """{k in half-zone : side * v(k) > u} by splitting into monotone branches and bisecting."""
    lo_zone, hi_zone = (0.0, math.pi) if side > 0 else (-math.pi, 0.0)
    ks = np.linspace(lo_zone, hi_zone, samples)
    g = side * np.asarray(velocity(ks), dtype=float) - u

    def gf(k):
        return side * float(velocity(k)) - u

    # Monotone branches: break at sampled extrema of v.
    dv = np.diff(g)
    breaks = [0]
    for i in range(1, len(dv)):
        if dv[i] * dv[i - 1] < 0:
            breaks.append(i)
    breaks.append(len(ks) - 1)

    roots = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        ga, gb = g[a], g[b]
        if ga == 0.0:
            roots.append(ks[a])
        if ga * gb < 0:
            roots.append(brentq(gf, ks[a], ks[b], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    roots = sorted(set(roots))

    edges = [lo_zone, *[r for r in roots if lo_zone < r < hi_zone], hi_zone]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0:
            continue
        if gf(0.5 * (lo + hi)) > 0:
            if out and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return out


def speed_superlevel(disp: Dispersion, u: float, side: int) -> KWindow:
    """Momenta in the half-zone ``side`` moving away from their edge faster than u."""
    if disp.superlevel is not None:
        iv = disp.superlevel(u, side)
    else:
        iv = _bracketed_superlevel(disp.velocity, u, side)
    return KWindow(tuple((float(a), float(b)) for a, b in iv), side)


def solve_window_right(x: float, t: float, disp: Dispersion, ell: float) -> KWindow:
    """{k in (0, pi) : min(2 v(k) t, ell) > x}; the full half-zone for x <= 0."""
    if x <= 0.0:
        return _full(1)
    if x >= ell or t <= 0.0:
        return KWindow((), 1)
    return speed_superlevel(disp, x / (2.0 * t), 1)


def solve_window_left(x: float, t: float, disp: Dispersion, ell: float) -> KWindow:
    """{k in (-pi, 0) : min(2 |v(k)| t, ell) > ell - x}; the full half-zone for x >= ell.

    Left movers are shared when they sit within 2|v|t of the right edge.
    """
    if x >= ell:
        return _full(-1)
    if x <= 0.0 or t <= 0.0:
        return KWindow((), -1)
    return speed_superlevel(disp, (ell - x) / (2.0 * t), -1)


def _gauss(f: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """15-point Gauss-Legendre estimate of int_a^b f on each panel; rows follow panels."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    k = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(k.ravel()))
    vals = vals.reshape(k.shape + vals.shape[1:])
    w = (half[:, None] * _WEIGHTS[None, :])
    return np.einsum("pn,pn...->p...", w, vals)


def integrate(
    f: Callable,
    window: KWindow | Sequence,
    tol: float = DEFAULT_TOL,
    breakpoints: Sequence[float] = (),
) -> complex | np.ndarray:
    """Return int_window dk/(2 pi) f(k) with estimated absolute error <= tol.

    ``f`` takes a 1-d array of momenta and returns values of shape
    ``(len(k),)`` or ``(len(k), m)``; vector-valued integrands share panels and
    the error bound applies componentwise.
    """
    intervals = window.intervals if isinstance(window, KWindow) else tuple(window)
    edges = []
    for lo, hi in intervals:
        cuts = sorted({lo, hi, *[p for p in (*breakpoints, -math.pi, 0.0, math.pi) if lo < p < hi]})
        edges.extend(zip(cuts[:-1], cuts[1:]))
    edges = [(lo, hi) for lo, hi in edges if hi > lo]
    if not edges:
        probe = np.asarray(f(np.array([0.5])))
        return np.zeros(probe.shape[1:], dtype=complex) if probe.ndim > 1 else 0.0 + 0.0j

    a = np.array([e[0] for e in edges])
    b = np.array([e[1] for e in edges])
    tol_k = tol * _TWO_PI  # tolerance on int dk, before the 1/(2 pi)

    def refine(a, b):
        m = 0.5 * (a + b)
        coarse = _gauss(f, a, b)
        fine = _gauss(f, a, m) + _gauss(f, m, b)
        # Factor 2: at a log-singular panel end bisection only halves the error,
        # so |coarse - fine| is no larger than the error of `fine` itself.
        diff = 2.0 * np.abs(coarse - fine)
        err = diff.reshape(len(a), -1).max(axis=1)
        return fine, err

    vals, errs = refine(a, b)
    done_val = np.zeros(vals.shape[1:], dtype=complex)
    done_err = 0.0
    while True:
        total = errs.sum() + done_err
        if total <= tol_k:
            break
        # Split the largest-error panels until the untouched remainder fits in half the budget.
        order = np.argsort(errs)[::-1]
        tail = np.cumsum(errs[order][::-1])[::-1]  # tail[i] = sum of errs[order][i:]
        fits = tail <= 0.5 * tol_k - done_err
        n_split = max(int(np.argmax(fits)) if fits.any() else len(order), 1)
        split = order[:n_split]
        keep = order[n_split:]

        width = b[split] - a[split]
        if np.any(width < math.pi * 2.0 ** -MAX_DEPTH) or len(a) + n_split > MAX_PANELS:
            raise QuadratureError(
                f"adaptive quadrature did not converge: error {total / _TWO_PI:.3e} > tol {tol:.3e}"
            )
        # Unsplit panels are final; their combined error stays within half the budget.
        done_val = done_val + vals[keep].sum(axis=0)
        done_err += errs[keep].sum()
        m = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], m])
        nb = np.concatenate([m, b[split]])
        a, b = na, nb
        vals, errs = refine(a, b)

    result = (done_val + vals.sum(axis=0)) / _TWO_PI
    if np.ndim(result) == 0:
        return complex(result)
    return result
