"""Comparison of exact and predicted entanglement Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corr import CorrelationMatrix
from .peschel import CouplingProfile, EntanglementHamiltonian
from .qpp import KernelPrediction, renyi_density

__all__ = [
    "ComparisonReport",
    "DEFAULT_EXCLUSION",
    "LIGHT_CONE_MARGIN",
    "compare",
    "included_sites",
    "renyi_exact",
    "light_cone_scan",
]

DEFAULT_EXCLUSION = 0.05
LIGHT_CONE_MARGIN = 0.05
_ZETA_FLOOR = 1e-300


@dataclass(frozen=True)
class ComparisonReport:
    distance: int
    time: float
    length: int
    max_abs_error: float
    rms_error: float
    peak_coupling: float
    excluded_fraction: float
    parity_violation: float

    @property
    def relative_error(self) -> float:
        return self.max_abs_error / self.peak_coupling if self.peak_coupling > 0 else 0.0


def included_sites(ell: int, z: int, exclusion: float) -> np.ndarray:
    """Mask over j = 0 .. ell-z-1 keeping exclusion*ell <= j <= (1 - exclusion)*ell - z."""
    j = np.arange(ell - z)
    return (j >= exclusion * ell) & (j <= (1.0 - exclusion) * ell - z)


def compare(profile: CouplingProfile, prediction: KernelPrediction, exclusion: float = DEFAULT_EXCLUSION) -> ComparisonReport:
    """Error norms between exact couplings h[j, j+z] and the predicted kernel, edges excluded.

    The parity violation measures the component forbidden by the dimer
    structure (imaginary part at odd z, real part at even z > 0) relative to
    the peak exact coupling.
    """
    if not 0.0 <= exclusion < 0.5:
        raise ValueError(f"exclusion must lie in [0, 1/2), got {exclusion}")
    if (profile.length, profile.distance) != (prediction.length, prediction.distance):
        raise ValueError(
            f"shape mismatch: profile (ell={profile.length}, z={profile.distance}) "
            f"vs prediction (ell={prediction.length}, z={prediction.distance})"
        )
    exact = np.asarray(profile.values)
    pred = np.asarray(prediction.couplings)
    if exact.shape != pred.shape:
        raise ValueError(f"shape mismatch: {exact.shape} vs {pred.shape}")

    ell, z = profile.length, profile.distance
    mask = included_sites(ell, z, exclusion)
    diff = np.abs(exact[mask] - pred[mask])
    peak = float(np.max(np.abs(exact[mask]))) if mask.any() else 0.0
    wrong = np.abs(exact[mask].real if (z > 0 and z % 2 == 0) else exact[mask].imag)
    parity = float(wrong.max()) / peak if peak > 0 and wrong.size else 0.0
    return ComparisonReport(
        distance=z,
        time=profile.time,
        length=ell,
        max_abs_error=float(diff.max()) if diff.size else 0.0,
        rms_error=float(np.sqrt(np.mean(diff**2))) if diff.size else 0.0,
        peak_coupling=peak,
        excluded_fraction=1.0 - mask.sum() / mask.size,
        parity_violation=parity,
    )


def renyi_exact(c: CorrelationMatrix | np.ndarray, alpha: float) -> float:
    """Renyi entropy sum_a h_alpha(zeta_a) over the correlation eigenvalues."""
    zeta = np.linalg.eigvalsh(np.asarray(getattr(c, "entries", c)))
    zeta = np.clip(zeta, _ZETA_FLOOR, 1.0 - _ZETA_FLOOR)
    return float(np.sum(renyi_density(zeta, alpha)))


def light_cone_scan(h: EntanglementHamiltonian, t: float, z: int, v_max: float = 1.0) -> float:
    """Largest |h[j, j+z]| between the two light cones, keeping a 5% margin from each front."""
    ell = h.size
    if 4.0 * v_max * t >= ell:
        raise ValueError(f"light cones have merged: 4 v_max t = {4 * v_max * t:g} >= ell = {ell}")
    margin = LIGHT_CONE_MARGIN * ell
    lo = 2.0 * v_max * t + margin
    hi = ell - 2.0 * v_max * t - margin
    vals = np.abs(np.diagonal(h.matrix, offset=z))
    j = np.arange(vals.size)
    sel = (j >= lo) & (j <= hi)
    return float(vals[sel].max()) if sel.any() else 0.0
