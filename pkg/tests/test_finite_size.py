"""Finite-size behaviour behind the stationary-coupling and profile comparisons."""

import numpy as np
import pytest

from qpeh.analysis import compare
from qpeh.corr import dimer_correlation, gge_correlation
from qpeh.model import QuenchSpec
from qpeh.peschel import coupling_profile, extract_eh
from qpeh.qpp import gge_coupling, predict_profiles


def central_gap(ell, dimer):
    h = extract_eh(gge_correlation(ell, dimer), 0.0).matrix
    c = ell // 2
    z = np.arange(1, 10, 2)
    return np.abs(h[c, c + z] - gge_coupling(z, dimer))


def test_stationary_coupling_gap_scales_as_inverse_length(dimer):
    scaled = [ell * central_gap(ell, dimer) for ell in (100, 200, 400)]
    for s in scaled:
        np.testing.assert_allclose(s, 2.77, rtol=0.05)
    # same law at every odd distance, so the infinite-length limit is gge_coupling
    assert np.ptp(scaled[-1]) < 0.05


def test_odd_coupling_magnitude_is_two_over_z(dimer):
    h = extract_eh(gge_correlation(800, dimer), 0.0).matrix
    z = np.arange(1, 10, 2)
    np.testing.assert_allclose(np.abs(h[400, 400 + z]), 2.0 / z, atol=5e-3)


@pytest.mark.parametrize("z", [1, 3])
def test_profile_error_shrinks_with_length(hopping, dimer, z):
    errs = []
    for ell in (200, 400, 800):
        t = 0.2 * ell
        prof = coupling_profile(extract_eh(dimer_correlation(ell, t), 1e-4), z)
        pred = predict_profiles(QuenchSpec(hopping, dimer, ell, t), [z])[z]
        errs.append(compare(prof, pred, 0.05).relative_error)
    assert errs[0] > errs[1] > errs[2]
