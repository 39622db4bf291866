"""Subsystem two-point functions C[i, j] = <c_i^dag c_j> for the dimer quench.

Sites are labelled 1..ell in formulas and stored 0-based. The dimer state
pairs sites (1, 2), (3, 4), ..., so the subsystem starts on a dimer boundary.

Closed form after the quench to H = -1/2 sum_i (c_i^dag c_{i+1} + h.c.):

    C_ij(t) = C_ij(inf) + i (j - i)/(4 t) e^{i pi (i + j)/2} J_{j-i}(2t),
    C_ij(inf) = delta_ij / 2 + (delta_{i,j+1} + delta_{i,j-1}) / 4.

The Bessel part is evaluated as i e^{i pi (i+j)/2} (J_{n-1} + J_{n+1})(2t) / 4
with n = j - i, which is the same quantity without the 1/t at t = 0.
Constants were matched once against ``ring_oracle_correlation`` and are
frozen by a golden test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModeOccupation
from .quad import integrate
from .specfun import bessel_j_row

__all__ = [
    "CorrelationMatrix",
    "WrapAroundError",
    "dimer_correlation",
    "gge_correlation",
    "ring_oracle_correlation",
    "dump_matrix",
    "load_matrix",
]

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-10


class WrapAroundError(ValueError):
    """The ring is too small for the requested evolution time."""


@dataclass(frozen=True)
class CorrelationMatrix:
    entries: np.ndarray
    label: str
    time: float = math.inf

    def __post_init__(self):
        c = np.asarray(self.entries)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"correlation matrix must be square, got shape {c.shape}")
        herm = np.max(np.abs(c - c.conj().T)) if c.size else 0.0
        if herm > HERMITIAN_TOL:
            raise ValueError(f"correlation matrix not Hermitian: max |C - C^dag| = {herm:.3e}")
        ev = np.linalg.eigvalsh(c)
        if ev.size and (ev[0] < -SPECTRUM_TOL or ev[-1] > 1.0 + SPECTRUM_TOL):
            raise ValueError(f"correlation spectrum outside [0, 1]: [{ev[0]:.3e}, {ev[-1]:.3e}]")

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def _dimer_stationary(ell: int) -> np.ndarray:
    c = np.diag(np.full(ell, 0.5)).astype(complex)
    off = np.full(ell - 1, 0.25)
    c += np.diag(off, 1) + np.diag(off, -1)
    return c


def dimer_correlation(ell: int, t: float) -> CorrelationMatrix:
    """Exact C_A on sites 1..ell at time t after the dimer quench."""
    if ell < 2:
        raise ValueError(f"ell must be >= 2, got {ell}")
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if math.isinf(t):
        return CorrelationMatrix(_dimer_stationary(ell), "gge", t)

    row = bessel_j_row(ell, 2.0 * t)
    n = np.arange(-(ell - 1), ell)
    jm = np.array([row[m - 1] for m in n])
    jp = np.array([row[m + 1] for m in n])
    bessel_sum = (jm + jp) / 4.0  # = n J_n(2t) / (4t)

    i = np.arange(1, ell + 1)[:, None]
    j = np.arange(1, ell + 1)[None, :]
    phase = np.array([1.0, 1.0j, -1.0, -1.0j])[(i + j) % 4]  # e^{i pi (i+j)/2}, exact
    c = _dimer_stationary(ell) + 1j * phase * bessel_sum[(j - i) + (ell - 1)]
    np.fill_diagonal(c, 0.5)
    c = 0.5 * (c + c.conj().T)
    return CorrelationMatrix(c, "dimer-t", float(t))


def gge_correlation(ell: int, occ: ModeOccupation, tol: float = 1e-12) -> CorrelationMatrix:
    """Stationary Toeplitz matrix C[i, j] = int dk/2pi n(k) e^{i k (i - j)}."""
    if ell < 2:
        raise ValueError(f"ell must be >= 2, got {ell}")
    d = np.arange(ell)
    full = [(-math.pi, 0.0), (0.0, math.pi)]
    symbol = integrate(lambda k: np.asarray(occ(k))[:, None] * np.exp(1j * np.outer(k, d)), full, tol)
    symbol = np.where(np.abs(symbol) < 1e2 * tol, 0.0, symbol)
    idx = np.arange(ell)
    lag = idx[:, None] - idx[None, :]
    c = np.where(lag >= 0, symbol[np.abs(lag)], np.conj(symbol[np.abs(lag)]))
    return CorrelationMatrix(c, "gge")


def _ring_propagator_offsets(L: int, t: float) -> np.ndarray:
    """u[d] = (1/L) sum_k e^{i k d} e^{i t cos k}: c_j(t) = sum_m u[(j - m) mod L] c_m."""
    k = 2.0 * math.pi * np.arange(L) / L
    return np.fft.ifft(np.exp(1j * t * np.cos(k)))


def ring_oracle_correlation(ell: int, L: int, t: float) -> CorrelationMatrix:
    """Brute-force C_A from exact evolution of the dimer state on an L-site ring.

    Builds C(0) of prod_j (c_{2j}^dag + c_{2j-1}^dag)|0> / 2^{L/4} site by site
    and applies the plane-wave propagator of the hopping ring. Independent of
    the Bessel closed form.
    """
    if L % 2 or L < 4 * ell:
        raise ValueError(f"need even L >= 4 ell, got L={L}, ell={ell}")
    if 2.0 * t >= L / 2 - ell:
        raise WrapAroundError(f"2 v_max t = {2 * t:g} reaches L/2 - ell = {L / 2 - ell:g}")

    # C(0) is block diagonal: one 2x2 block <c_a^dag c_b> = 1/2 per dimer (a, b).
    block = np.full((2, 2), 0.5)

    u = _ring_propagator_offsets(L, t)
    rows = np.arange(ell)[:, None]
    cols = np.arange(L)[None, :]
    prop = u[(rows - cols) % L].reshape(ell, L // 2, 2)  # ell x L propagator rows, grouped by dimer
    c = np.einsum("iar,rs,jas->ij", np.conj(prop), block, prop, optimize=True)
    return CorrelationMatrix(0.5 * (c + c.conj().T), "ring-oracle", float(t))


def dump_matrix(path, c) -> None:
    """Row-major complex pairs as little-endian 8-byte floats."""
    np.ascontiguousarray(np.asarray(getattr(c, "entries", c), dtype="<c16")).tofile(path)


def load_matrix(path, ell: int) -> np.ndarray:
    data = np.fromfile(path, dtype="<c16")
    if data.size != ell * ell:
        raise ValueError(f"{path}: expected {ell * ell} complex entries, found {data.size}")
    return data.reshape(ell, ell)
