"""Single-particle entanglement Hamiltonian from a correlation matrix.

For a Gaussian state C = 1 / (1 + e^h). Correlation eigenvalues within
``cutoff`` of 0 or 1 belong to the high part of the entanglement spectrum;
they are projected out and the remaining operator is returned in the full
site basis (zero on the discarded eigenspace).

With C[i, j] = <c_i^dag c_j> the returned h = log[(1 - C)/C] is the
transpose of the coefficient matrix: rho_A ~ exp(-sum_ij h[i, j] c_j^dag c_i).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .corr import CorrelationMatrix

__all__ = [
    "EntanglementHamiltonian",
    "CouplingProfile",
    "DegenerateSpectrumWarning",
    "DEFAULT_CUTOFF",
    "extract_eh",
    "coupling_profile",
    "log_ratio_spectrum",
]

DEFAULT_CUTOFF = 1e-4
_ZETA_FLOOR = 1e-300
_DEGENERACY_GAP = 1e-13


class DegenerateSpectrumWarning(UserWarning):
    """Eigenvalues straddling the cutoff are degenerate; the projection is basis dependent."""


@dataclass(frozen=True)
class EntanglementHamiltonian:
    matrix: np.ndarray
    kept_modes: int
    cutoff: float
    zeta: np.ndarray  # kept correlation eigenvalues, ascending
    time: float = math.inf

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectrum(self) -> np.ndarray:
        """Single-particle entanglement energies of the kept modes."""
        return log_ratio_spectrum(self.zeta)


@dataclass(frozen=True)
class CouplingProfile:
    distance: int
    values: np.ndarray  # values[j] = h[j, j + z], 0-based j
    time: float
    length: int


def log_ratio_spectrum(zeta) -> np.ndarray:
    """log[(1 - zeta) / zeta] with both zeta and 1 - zeta floored at 1e-300."""
    zeta = np.asarray(zeta, dtype=float)
    p = np.maximum(zeta, _ZETA_FLOOR)
    q = np.maximum(1.0 - zeta, _ZETA_FLOOR)
    return np.log(q) - np.log(p)


def extract_eh(c: CorrelationMatrix | np.ndarray, cutoff: float = DEFAULT_CUTOFF) -> EntanglementHamiltonian:
    """Diagonalize C, drop eigenvalues outside [cutoff, 1 - cutoff], map the rest by log[(1-z)/z]."""
    if not 0.0 <= cutoff < 0.5:
        raise ValueError(f"cutoff must lie in [0, 1/2), got {cutoff}")
    mat = np.asarray(getattr(c, "entries", c))
    time = getattr(c, "time", math.inf)

    zeta, u = np.linalg.eigh(mat)
    if cutoff > 0.0:
        keep = (zeta >= cutoff) & (zeta <= 1.0 - cutoff)
        if keep.any() and not keep.all():
            kept, dropped = zeta[keep], zeta[~keep]
            gap = np.min(np.abs(kept[:, None] - dropped[None, :]))
            if gap < _DEGENERACY_GAP:
                warnings.warn(
                    f"correlation eigenvalues within {gap:.1e} of each other straddle the cutoff {cutoff:g}",
                    DegenerateSpectrumWarning,
                    stacklevel=2,
                )
    else:
        keep = np.ones_like(zeta, dtype=bool)

    zk = zeta[keep]
    uk = u[:, keep]
    h = (uk * log_ratio_spectrum(zk)) @ uk.conj().T
    h = 0.5 * (h + h.conj().T)
    return EntanglementHamiltonian(h, int(keep.sum()), float(cutoff), zk, time)


def coupling_profile(h: EntanglementHamiltonian, z: int) -> CouplingProfile:
    """The z-th superdiagonal h[j, j + z], j = 0 .. ell - z - 1."""
    ell = h.size
    if not 0 <= z < ell:
        raise ValueError(f"distance must satisfy 0 <= z < {ell}, got {z}")
    return CouplingProfile(int(z), np.diagonal(h.matrix, offset=z).copy(), h.time, ell)
